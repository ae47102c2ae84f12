"""Synthetic typists: seeded rhythm profiles and dataset fixtures.

Each subject is a RhythmProfile carrying per-key dwell means and
per-gap flight means in integer milliseconds. Samples are drawn with
independent Gaussian jitter on every segment, rounded to integers, and
clamped so they always satisfy the sample invariants (dwell >= 1 ms,
presses non-decreasing).

Determinism contract: everything derives from (seed, subject index)
through numpy SeedSequence spawning, so per-subject streams are stable
regardless of generation order and across platforms.

Stream layout per subject index i under root seed s:

    SeedSequence([s, i, 0])  genuine profile draw
    SeedSequence([s, i, 1])  genuine sample draws (training + tests)
    SeedSequence([s, i, 2])  intruder profile draw
    SeedSequence([s, i, 3])  intruder sample draws
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from kda.core import KeystrokeSample
from kda.ingest import (
    AccountData,
    Dataset,
    TestFileMeta,
    build_test_filename,
    build_training_filename,
    render_sample_line,
)

DWELL_MEAN_RANGE = (60, 180)  # ms, inclusive
FLIGHT_MEAN_RANGE = (40, 300)
JITTER_RANGE = (5.0, 30.0)

INTRUDER_MODES = ("independent_profile", "shifted_profile", "same_profile")
NAMING_STYLES = ("long", "short")


@dataclass(frozen=True)
class RhythmProfile:
    """Per-key timing means for one typist and one password."""

    dwell_means: tuple[int, ...]
    flight_means: tuple[int, ...]
    jitter_std: float

    def __post_init__(self) -> None:
        if not self.dwell_means:
            raise ValueError("at least one key required")
        if len(self.flight_means) != len(self.dwell_means) - 1:
            raise ValueError(
                f"need {len(self.dwell_means) - 1} flight means, got {len(self.flight_means)}"
            )
        if self.jitter_std < 0:
            raise ValueError("jitter_std must be non-negative")
        if min(self.dwell_means) <= 3.0 * self.jitter_std:
            raise ValueError("dwell means must exceed 3x jitter_std")

    @property
    def password_length(self) -> int:
        return len(self.dwell_means)


@dataclass(frozen=True)
class SynthConfig:
    n_subjects: int = 20
    train_count: int = 5
    genuine_count: int = 5
    intruder_count: int = 5
    password_length: int | None = None  # None: drawn per subject from 4..8
    jitter_std: float | None = None  # None: drawn per profile from JITTER_RANGE
    intruder_mode: str = "independent_profile"
    shift_ms: int = 60  # offset added to every mean in shifted_profile mode
    seed: int = 0
    name: str = "synthetic"

    def __post_init__(self) -> None:
        if self.n_subjects < 1 or min(self.train_count, self.genuine_count) < 1:
            raise ValueError("subject and sample counts must be >= 1")
        if self.intruder_count < 0:
            raise ValueError("intruder_count must be >= 0")
        if self.intruder_mode not in INTRUDER_MODES:
            raise ValueError(f"intruder_mode must be one of {INTRUDER_MODES}")
        if self.password_length is not None and self.password_length < 1:
            raise ValueError("password_length must be >= 1")
        if self.jitter_std is not None and not (
            0 <= self.jitter_std < DWELL_MEAN_RANGE[0] / 3.0
        ):
            raise ValueError(
                f"jitter_std override must be in [0, {DWELL_MEAN_RANGE[0] / 3.0:.1f}) ms"
            )


def gen_profile(rng: np.random.Generator, password_length: int | None = None) -> RhythmProfile:
    """Draw a profile with integer means from the documented ranges.

    Integer means make the jitter_std=0 degenerate case reproduce the
    profile exactly through the integer-ms sample path.
    """
    n = int(rng.integers(4, 9)) if password_length is None else password_length
    dwell = tuple(int(d) for d in rng.integers(DWELL_MEAN_RANGE[0], DWELL_MEAN_RANGE[1] + 1, n))
    flight = tuple(
        int(f) for f in rng.integers(FLIGHT_MEAN_RANGE[0], FLIGHT_MEAN_RANGE[1] + 1, n - 1)
    )
    jitter = float(rng.uniform(*JITTER_RANGE))
    # keep every dwell safely positive after jitter (profile invariant)
    jitter = min(jitter, (min(dwell) - 1) / 3.0)
    return RhythmProfile(dwell_means=dwell, flight_means=flight, jitter_std=jitter)


def gen_sample(
    profile: RhythmProfile, rng: np.random.Generator, label: str = "unlabeled"
) -> KeystrokeSample:
    """One password entry: jittered segments accumulated from t=0."""
    dwells = []
    flights = []
    for mean in profile.dwell_means:
        d = int(round(rng.normal(mean, profile.jitter_std)))
        dwells.append(max(d, 1))
    for i, mean in enumerate(profile.flight_means):
        f = int(round(rng.normal(mean, profile.jitter_std)))
        flights.append(max(f, -dwells[i]))  # next press never before this press

    presses = [0]
    releases = [dwells[0]]
    for i in range(1, profile.password_length):
        presses.append(releases[i - 1] + flights[i - 1])
        releases.append(presses[i] + dwells[i])
    return KeystrokeSample(presses=tuple(presses), releases=tuple(releases), label=label)


def _subject_rng(seed: int, subject: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, subject, stream])))


def intruder_profile(config: SynthConfig, subject: int, genuine: RhythmProfile) -> RhythmProfile:
    if config.intruder_mode == "same_profile":
        return genuine
    if config.intruder_mode == "shifted_profile":
        return replace(
            genuine,
            dwell_means=tuple(d + config.shift_ms for d in genuine.dwell_means),
            flight_means=tuple(f + config.shift_ms for f in genuine.flight_means),
        )
    rng = _subject_rng(config.seed, subject, 2)
    drawn = gen_profile(rng, password_length=genuine.password_length)
    if config.jitter_std is not None:
        drawn = replace(drawn, jitter_std=config.jitter_std)
    return drawn


def gen_account(config: SynthConfig, subject: int) -> AccountData:
    """All samples for one subject index, independent of other subjects."""
    profile = gen_profile(_subject_rng(config.seed, subject, 0), config.password_length)
    if config.jitter_std is not None:
        profile = replace(profile, jitter_std=config.jitter_std)
    genuine_rng = _subject_rng(config.seed, subject, 1)
    account = AccountData()
    for _ in range(config.train_count):
        account.training.append(gen_sample(profile, genuine_rng, label="training"))
    for _ in range(config.genuine_count):
        account.genuine_tests.append(gen_sample(profile, genuine_rng, label="genuine"))
    imposter = intruder_profile(config, subject, profile)
    intruder_rng = _subject_rng(config.seed, subject, 3)
    for _ in range(config.intruder_count):
        account.intruder_tests.append(gen_sample(imposter, intruder_rng, label="intruder"))
    return account


def account_id_for(subject: int, n_subjects: int) -> str:
    width = max(2, len(str(n_subjects - 1)))
    return f"s{subject:0{width}d}"


def gen_dataset(config: SynthConfig) -> Dataset:
    dataset = Dataset(name=config.name)
    for subject in range(config.n_subjects):
        dataset.accounts[account_id_for(subject, config.n_subjects)] = gen_account(config, subject)
    return dataset


def _long_capture_time(index: int) -> str:
    minute, second = divmod(index, 60)
    hour, minute = divmod(minute, 60)
    return f"2010-01-05 {10 + hour:02d}.{minute:02d}.{second:02d}"


def write_dataset(dataset: Dataset, out_dir: str | Path, naming: str = "long") -> None:
    """Materialize a Dataset as a one-folder-per-account tree.

    Uses the selected file-name grammar; loading the tree back with
    load_dataset reproduces the in-memory samples exactly (timestamps
    are integers end to end).
    """
    if naming not in NAMING_STYLES:
        raise ValueError(f"naming must be one of {NAMING_STYLES}, got {naming!r}")
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    for account_id in dataset.account_ids:
        acc = dataset.accounts[account_id]
        folder = root / account_id
        folder.mkdir(exist_ok=True)
        if naming == "long":
            training_name = build_training_filename(account_id, password=f"pw{account_id}")
        else:
            training_name = build_training_filename()
        lines = [render_sample_line(s) for s in acc.training]
        (folder / training_name).write_text("\n".join(lines) + "\n")

        tests = [(s, True) for s in acc.genuine_tests] + [(s, False) for s in acc.intruder_tests]
        for index, (sample, genuine) in enumerate(tests):
            if naming == "long":
                meta = TestFileMeta(
                    style="long",
                    account_id=account_id,
                    password=f"pw{account_id}",
                    capture_time=_long_capture_time(index),
                    is_genuine=genuine,
                    is_positive=genuine,
                )
            else:
                meta = TestFileMeta(
                    style="short",
                    capture_time="20100105",
                    index=index,
                    is_genuine=genuine,
                    is_positive=genuine,
                )
            (folder / build_test_filename(meta)).write_text(render_sample_line(sample) + "\n")


def materialize_dataset(config: SynthConfig, out_dir: str | Path, naming: str = "long") -> Dataset:
    """Generate and write a synthetic tree; returns the in-memory Dataset."""
    dataset = gen_dataset(config)
    write_dataset(dataset, out_dir, naming=naming)
    return dataset
