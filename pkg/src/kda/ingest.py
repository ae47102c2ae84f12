"""Dataset directory loading and file-name metadata.

Two on-disk layouts are understood, both one folder per account:

* the long form, where test files carry a bracketed capture time,
  the account id, and the typed password::

      [2009-12-30 14.07.01]12345(-loginliaoxiaoying)_1_n.txt

  and the training file is ``[12345(-regliaoxiaoying)].txt``;

* the short form, where test files are ``<time>-<index>_<g>_<p>.txt``
  and the training file is literally ``[].txt``.

The two trailing flags are a genuine/intruder marker ("1"/"0") and a
positive/negative marker ("y"/"n"). Which flag drives the
genuine-versus-intruder partition is selectable, because collected
datasets have been observed to disagree about which one is
authoritative.

Sample files hold one password entry per line as an even-length stream
of alternating press/release timestamps in integer milliseconds.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from kda.core import KeystrokeSample, validate_sample

PARTITION_MODES = ("genuine_flag", "positive_flag")


class SampleFormatError(ValueError):
    """A sample file line that cannot be tokenized into timestamps."""


class FilenameError(ValueError):
    """A file name matching neither recognized grammar."""


@dataclass(frozen=True)
class TestFileMeta:
    """Metadata carried by a test file's name.

    ``style`` records which grammar matched ("long" or "short") so the
    original name can be rebuilt exactly. Short-form names carry no
    account id or password; the account is implied by the folder.
    """

    style: str
    is_genuine: bool
    is_positive: bool
    account_id: str = ""
    password: str | None = None
    capture_time: str | None = None
    index: int | None = None


# long form: [YYYY-MM-DD HH.MM.SS]ID(-loginPSW)_G_P.txt
_LONG_TEST_RE = re.compile(
    r"^\[(?P<time>[^\[\]]+)\]"
    r"(?P<id>[^()\[\]_]*)"
    r"(?:\(-(?:login|LOGIN|Login)(?P<psw>[^()]*)\))?"
    r"_(?P<g>[01])_(?P<p>[yn])\.txt$"
)

# short form: time-index_G_P.txt (time is digits, possibly with dots)
_SHORT_TEST_RE = re.compile(
    r"^(?P<time>[0-9][0-9.]*)-(?P<index>[0-9]+)_(?P<g>[01])_(?P<p>[yn])\.txt$"
)

# training files: [ID(-regPSW)].txt, [ID].txt, or the bare [].txt
_TRAINING_RE = re.compile(
    r"^\[(?P<id>[^()\[\]]*)(?:\(-(?:reg|REG|Reg)(?P<psw>[^()]*)\))?\]\.txt$"
)


def is_training_filename(name: str) -> bool:
    return _TRAINING_RE.match(name) is not None


def parse_test_filename(name: str) -> TestFileMeta:
    """Extract flags and identity fields from a test file name.

    Raises FilenameError when the name matches neither grammar; callers
    that walk directories treat that as "skip this file".
    """
    m = _LONG_TEST_RE.match(name)
    if m:
        return TestFileMeta(
            style="long",
            account_id=m.group("id"),
            password=m.group("psw"),
            capture_time=m.group("time"),
            is_genuine=m.group("g") == "1",
            is_positive=m.group("p") == "y",
        )
    m = _SHORT_TEST_RE.match(name)
    if m:
        return TestFileMeta(
            style="short",
            capture_time=m.group("time"),
            index=int(m.group("index")),
            is_genuine=m.group("g") == "1",
            is_positive=m.group("p") == "y",
        )
    raise FilenameError(f"unrecognized file name: {name!r}")


def build_test_filename(meta: TestFileMeta) -> str:
    """Inverse of parse_test_filename for both grammars."""
    g = "1" if meta.is_genuine else "0"
    p = "y" if meta.is_positive else "n"
    if meta.style == "long":
        psw = f"(-login{meta.password})" if meta.password is not None else ""
        return f"[{meta.capture_time}]{meta.account_id}{psw}_{g}_{p}.txt"
    if meta.style == "short":
        return f"{meta.capture_time}-{meta.index}_{g}_{p}.txt"
    raise ValueError(f"unknown filename style {meta.style!r}")


def build_training_filename(account_id: str = "", password: str | None = None) -> str:
    psw = f"(-reg{password})" if password is not None else ""
    return f"[{account_id}{psw}].txt"


def parse_sample_file(
    text: str, label: str = "unlabeled"
) -> tuple[list[KeystrokeSample], list[str]]:
    """Split file contents into one sample per non-blank line.

    Tokens may be separated by any mix of whitespace and commas. Lines
    whose token stream is structurally broken (odd count, non-numeric
    token) raise SampleFormatError; lines that tokenize but violate
    sample invariants are returned in the rejects list instead, so a
    loader can keep the good samples from a partially dirty file.
    """
    samples: list[KeystrokeSample] = []
    rejects: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.replace(",", " ").split()
        if not tokens:
            continue
        if len(tokens) % 2 != 0:
            raise SampleFormatError(f"line {lineno}: odd timestamp count ({len(tokens)})")
        values = []
        for col, tok in enumerate(tokens, start=1):
            try:
                values.append(int(tok))
            except ValueError:
                raise SampleFormatError(
                    f"line {lineno}, token {col}: non-numeric timestamp {tok!r}"
                ) from None
        sample = KeystrokeSample(
            presses=tuple(values[0::2]), releases=tuple(values[1::2]), label=label
        )
        violations = validate_sample(sample)
        if violations:
            rejects.append(f"line {lineno}: " + "; ".join(violations))
        else:
            samples.append(sample)
    return samples, rejects


def render_sample_line(sample: KeystrokeSample) -> str:
    parts = []
    for press, release in zip(sample.presses, sample.releases):
        parts.append(str(press))
        parts.append(str(release))
    return " ".join(parts)


@dataclass
class AccountData:
    """All samples loaded for one account, plus per-account rejects."""

    training: list[KeystrokeSample] = field(default_factory=list)
    genuine_tests: list[KeystrokeSample] = field(default_factory=list)
    intruder_tests: list[KeystrokeSample] = field(default_factory=list)
    rejects: list[str] = field(default_factory=list)


@dataclass
class Dataset:
    name: str
    accounts: dict[str, AccountData] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def account_ids(self) -> list[str]:
        return sorted(self.accounts)


def load_dataset(root_dir: str | Path, partition_by: str = "genuine_flag") -> Dataset:
    """Walk one-folder-per-account ``root_dir`` into a Dataset.

    ``partition_by`` selects which filename flag splits test files into
    genuine versus intruder pools: "genuine_flag" uses the 0/1 marker,
    "positive_flag" uses the y/n marker. Files that fail to parse are
    skipped with a warning; accounts without a usable training file are
    skipped entirely.
    """
    if partition_by not in PARTITION_MODES:
        raise ValueError(f"partition_by must be one of {PARTITION_MODES}, got {partition_by!r}")
    root = Path(root_dir)
    dataset = Dataset(name=root.name)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {root}")

    for folder in sorted(p for p in root.iterdir() if p.is_dir()):
        account = AccountData()
        account_id = folder.name
        for path in sorted(p for p in folder.iterdir() if p.is_file()):
            name = path.name
            if is_training_filename(name):
                kind = "training"
            else:
                try:
                    meta = parse_test_filename(name)
                except FilenameError:
                    dataset.warnings.append(f"{account_id}/{name}: unrecognized name, skipped")
                    continue
                flag = meta.is_genuine if partition_by == "genuine_flag" else meta.is_positive
                kind = "genuine" if flag else "intruder"
            try:
                samples, rejects = parse_sample_file(path.read_text(), label=_LABEL[kind])
            except SampleFormatError as exc:
                dataset.warnings.append(f"{account_id}/{name}: {exc}, file skipped")
                continue
            account.rejects.extend(f"{name}: {r}" for r in rejects)
            if kind == "training":
                account.training.extend(samples)
            elif kind == "genuine":
                account.genuine_tests.extend(samples)
            else:
                account.intruder_tests.extend(samples)
        if account.training:
            dataset.accounts[account_id] = account
        else:
            dataset.warnings.append(f"{account_id}: no training samples, account skipped")
    return dataset


_LABEL = {"training": "training", "genuine": "genuine", "intruder": "intruder"}


def loader_report(dataset: Dataset) -> str:
    """Line-oriented summary: per-account counts, then rejects and warnings."""
    lines = [f"dataset {dataset.name}: {len(dataset.accounts)} accounts"]
    for account_id in dataset.account_ids:
        acc = dataset.accounts[account_id]
        lines.append(
            f"  {account_id}: training={len(acc.training)} "
            f"genuine={len(acc.genuine_tests)} intruder={len(acc.intruder_tests)} "
            f"rejects={len(acc.rejects)}"
        )
        for reject in acc.rejects:
            lines.append(f"    reject {reject}")
    for warning in dataset.warnings:
        lines.append(f"  warning: {warning}")
    return "\n".join(lines)
