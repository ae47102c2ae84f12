"""Versioned text serialization for trained models.

The format is a line-oriented key/value document:

    kda-model v1
    account_id=alice
    feature_kind=original
    threshold=-1.25
    standardizer.means=100.0 42.5 91.0
    standardizer.stds=3.5 0.001 7.25
    scorer.kind=ocsvm
    scorer.nu=0.5
    ...

Floats are written with repr, which round-trips every IEEE double
exactly, so deserialize(serialize(m)) == m field for field. Vectors are
space-separated; support vectors / exemplars get one ``.N=`` line per
row. Type invariants are re-validated on load through the dataclass
constructors, so a tampered blob (e.g. a zero std) fails with the same
error a bad in-memory value would.
"""

from __future__ import annotations

from kda.classify import GaussianModel, NnModel, OcsvmModel
from kda.core import Standardizer, TrainedModel

FORMAT_HEADER = "kda-model v1"


class ModelParseError(ValueError):
    """Malformed model blob; the message names the first bad field."""


def _vector(values: tuple[float, ...]) -> str:
    return " ".join(repr(v) for v in values)


def serialize_model(model: TrainedModel) -> str:
    lines = [
        FORMAT_HEADER,
        f"account_id={model.account_id}",
        f"feature_kind={model.feature_kind}",
        f"threshold={model.threshold!r}",
        f"standardizer.means={_vector(model.standardizer.means)}",
        f"standardizer.stds={_vector(model.standardizer.stds)}",
    ]
    scorer = model.scorer
    if isinstance(scorer, OcsvmModel):
        lines.append("scorer.kind=ocsvm")
        lines.append(f"scorer.nu={scorer.nu!r}")
        lines.append(f"scorer.gamma={scorer.gamma!r}")
        lines.append(f"scorer.rho={scorer.rho!r}")
        lines.append(f"scorer.alphas={_vector(scorer.alphas)}")
        for i, sv in enumerate(scorer.support_vectors):
            lines.append(f"scorer.sv.{i}={_vector(sv)}")
    elif isinstance(scorer, GaussianModel):
        lines.append("scorer.kind=gaussian")
        lines.append(f"scorer.mu={_vector(scorer.mu)}")
        lines.append(f"scorer.diag_sigma={_vector(scorer.diag_sigma)}")
    elif isinstance(scorer, NnModel):
        lines.append("scorer.kind=nn")
        for i, ex in enumerate(scorer.exemplars):
            lines.append(f"scorer.exemplar.{i}={_vector(ex)}")
    else:
        raise ValueError(f"unknown scorer type {type(scorer).__name__}")
    return "\n".join(lines) + "\n"


def _parse_fields(blob: str) -> dict[str, str]:
    lines = [ln for ln in blob.splitlines() if ln.strip()]
    if not lines:
        raise ModelParseError("empty blob")
    if lines[0] != FORMAT_HEADER:
        raise ModelParseError(f"bad header: expected {FORMAT_HEADER!r}, got {lines[0]!r}")
    fields: dict[str, str] = {}
    for ln in lines[1:]:
        key, sep, value = ln.partition("=")
        if not sep:
            raise ModelParseError(f"not a key=value line: {ln!r}")
        if key in fields:
            raise ModelParseError(f"duplicate field {key!r}")
        fields[key] = value
    return fields


def _take(fields: dict[str, str], key: str) -> str:
    if key not in fields:
        raise ModelParseError(f"missing field {key!r}")
    return fields.pop(key)


def _take_float(fields: dict[str, str], key: str) -> float:
    raw = _take(fields, key)
    try:
        return float(raw)
    except ValueError:
        raise ModelParseError(f"field {key!r}: not a number: {raw!r}") from None


def _take_vector(fields: dict[str, str], key: str) -> tuple[float, ...]:
    raw = _take(fields, key)
    try:
        return tuple(float(tok) for tok in raw.split())
    except ValueError:
        raise ModelParseError(f"field {key!r}: not a numeric vector: {raw!r}") from None


def _take_rows(fields: dict[str, str], prefix: str) -> tuple[tuple[float, ...], ...]:
    rows = []
    i = 0
    while f"{prefix}.{i}" in fields:
        rows.append(_take_vector(fields, f"{prefix}.{i}"))
        i += 1
    if not rows:
        raise ModelParseError(f"missing field {prefix!r}.0")
    return tuple(rows)


def deserialize_model(blob: str) -> TrainedModel:
    fields = _parse_fields(blob)
    account_id = _take(fields, "account_id")
    feature_kind = _take(fields, "feature_kind")
    threshold = _take_float(fields, "threshold")
    try:
        standardizer = Standardizer(
            means=_take_vector(fields, "standardizer.means"),
            stds=_take_vector(fields, "standardizer.stds"),
        )
    except ValueError as exc:
        if isinstance(exc, ModelParseError):
            raise
        raise ModelParseError(f"standardizer: {exc}") from None

    kind = _take(fields, "scorer.kind")
    try:
        if kind == "ocsvm":
            scorer: object = OcsvmModel(
                support_vectors=_take_rows(fields, "scorer.sv"),
                alphas=_take_vector(fields, "scorer.alphas"),
                rho=_take_float(fields, "scorer.rho"),
                gamma=_take_float(fields, "scorer.gamma"),
                nu=_take_float(fields, "scorer.nu"),
            )
        elif kind == "gaussian":
            scorer = GaussianModel(
                mu=_take_vector(fields, "scorer.mu"),
                diag_sigma=_take_vector(fields, "scorer.diag_sigma"),
            )
        elif kind == "nn":
            scorer = NnModel(exemplars=_take_rows(fields, "scorer.exemplar"))
        else:
            raise ModelParseError(f"field 'scorer.kind': unknown scorer {kind!r}")
    except ValueError as exc:
        if isinstance(exc, ModelParseError):
            raise
        raise ModelParseError(f"scorer: {exc}") from None

    if fields:
        raise ModelParseError(f"unknown field {sorted(fields)[0]!r}")
    try:
        return TrainedModel(
            account_id=account_id,
            feature_kind=feature_kind,
            standardizer=standardizer,
            scorer=scorer,
            threshold=threshold,
        )
    except ValueError as exc:
        raise ModelParseError(str(exc)) from None
