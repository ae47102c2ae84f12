"""Shared domain types for keystroke timing data and trained models.

Timestamps are integer milliseconds relative to an arbitrary per-sample
origin; only differences carry meaning. A sample is the press/release
stream of one password entry. Negative flight time (key rollover) is
legal; non-positive dwell is not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

# Per-dimension scale floors shared by the standardizer and the Gaussian
# scorer. 4-5 training samples routinely produce zero spread on some
# timing segment, and both (x-mu)/sigma and Sigma^-1 need it positive.
STD_FLOOR = 1e-3
VAR_FLOOR = 1e-6

FEATURE_KINDS = ("original", "gabor", "fft", "dct", "concat")
SAMPLE_LABELS = ("training", "genuine", "intruder", "unlabeled")


@dataclass(frozen=True)
class KeystrokeSample:
    """Ordered press/release timestamp pairs for one password entry.

    ``presses[i]``/``releases[i]`` are the press and release times of the
    i-th keystroke. Presses are non-decreasing; releases may overlap the
    next press (rollover). Use :func:`validate_sample` to check the
    invariants -- construction itself is permissive so that bad data can
    be represented, inspected, and rejected.
    """

    presses: tuple[int, ...]
    releases: tuple[int, ...]
    label: str = "unlabeled"
    source_meta: Optional[str] = None

    @property
    def key_count(self) -> int:
        return len(self.presses)


def validate_sample(sample: KeystrokeSample) -> list[str]:
    """Return every invariant violation of ``sample`` (empty list == ok).

    Violations are data, not faults: callers decide whether to reject,
    divert, or raise.
    """
    violations: list[str] = []
    n_p, n_r = len(sample.presses), len(sample.releases)
    if n_p != n_r:
        violations.append(f"length mismatch: {n_p} presses vs {n_r} releases")
    if n_p == 0:
        violations.append("empty sample: at least one keystroke required")
    if sample.label not in SAMPLE_LABELS:
        violations.append(f"unknown label {sample.label!r}")
    for i in range(min(n_p, n_r)):
        if sample.releases[i] - sample.presses[i] <= 0:
            violations.append(f"dwell <= 0 at index {i}")
    for i in range(1, n_p):
        if sample.presses[i] < sample.presses[i - 1]:
            violations.append(f"presses not non-decreasing at index {i}")
    return violations


@dataclass(frozen=True)
class FeatureVector:
    """Flat numeric vector with a provenance tag.

    ``kind`` records which transform produced the values; ``length`` is
    always ``len(values)``. All values are finite by construction.
    """

    values: tuple[float, ...]
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"unknown feature kind {self.kind!r}")
        for i, v in enumerate(self.values):
            if not math.isfinite(v):
                raise ValueError(f"non-finite value at index {i}: {v!r}")

    @property
    def length(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Standardizer:
    """Per-dimension affine scaling fitted on training vectors.

    Every std is clamped to at least ``STD_FLOOR`` at fit time, and the
    invariant is re-checked here so deserialized models cannot smuggle a
    zero scale in.
    """

    means: tuple[float, ...]
    stds: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.means) != len(self.stds):
            raise ValueError(
                f"dimension mismatch: {len(self.means)} means vs {len(self.stds)} stds"
            )
        for i, s in enumerate(self.stds):
            if not (s >= STD_FLOOR):
                raise ValueError(f"std below floor at index {i}: {s!r}")

    @property
    def dim(self) -> int:
        return len(self.means)


@dataclass(frozen=True)
class TrainedModel:
    """Per-account scorer state persisted by the enroll pipeline.

    ``feature_kind`` names the feature pipeline used at enroll time (one
    of the selections understood by the app config, e.g. ``original`` or
    ``ori_gabor``); verify must rebuild the same pipeline. ``threshold``
    is the operating point for accept/reject decisions: accepted iff
    score >= threshold.
    """

    account_id: str
    feature_kind: str
    standardizer: Standardizer
    scorer: object  # OcsvmModel | GaussianModel | NnModel (kda.classify)
    threshold: float

    def __post_init__(self) -> None:
        dim = getattr(self.scorer, "dim", None)
        if dim is not None and dim != self.standardizer.dim:
            raise ValueError(
                f"scorer dimension {dim} does not match standardizer dimension "
                f"{self.standardizer.dim}"
            )
