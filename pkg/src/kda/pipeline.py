"""Account lifecycle: enroll, verify, and the on-disk model store.

This is the one pipeline behind both frontends (CLI and HTTP service):
build the configured feature, standardize, train the configured scorer,
derive an operating threshold from the training scores, persist. Verify
replays the same feature path and compares the score to the stored
threshold.
"""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from kda.config import AppConfig
from kda.core import KeystrokeSample, TrainedModel, validate_sample
from kda.evaluate import build_feature, score_with, train_scorer
from kda.features import apply_standardizer, fit_standardizer
from kda.modelio import deserialize_model, serialize_model

ACCOUNT_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class UnknownAccountError(KeyError):
    def __init__(self, account_id: str) -> None:
        super().__init__(account_id)
        self.account_id = account_id

    def __str__(self) -> str:
        return f"unknown account {self.account_id!r}"


class EnrollmentError(ValueError):
    """Samples unusable for enrollment (too few, inconsistent, invalid)."""


class VerifyError(ValueError):
    """Sample unusable for verification against the stored model."""


@dataclass(frozen=True)
class VerifyResult:
    account_id: str
    score: float
    threshold: float
    accepted: bool


def require_account_id(account_id: str) -> str:
    """Reject ids that could escape the store directory or break blobs."""
    if not ACCOUNT_ID_RE.match(account_id):
        raise EnrollmentError(
            f"invalid account id {account_id!r}: use letters, digits, '.', '_', '-'"
        )
    return account_id


class ModelStore:
    """Directory of one serialized model per account."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def _path(self, account_id: str) -> Path:
        return self.root / f"{account_id}.kda"

    def save(self, model: TrainedModel) -> Path:
        require_account_id(model.account_id)
        self.root.mkdir(parents=True, exist_ok=True)
        path = self._path(model.account_id)
        path.write_text(serialize_model(model))
        return path

    def load(self, account_id: str) -> TrainedModel:
        path = self._path(account_id)
        if not ACCOUNT_ID_RE.match(account_id) or not path.is_file():
            raise UnknownAccountError(account_id)
        return deserialize_model(path.read_text())

    def exists(self, account_id: str) -> bool:
        return bool(ACCOUNT_ID_RE.match(account_id)) and self._path(account_id).is_file()

    def delete(self, account_id: str) -> None:
        if not self.exists(account_id):
            raise UnknownAccountError(account_id)
        self._path(account_id).unlink()

    def account_ids(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.stem for p in self.root.glob("*.kda"))


def _check_enrollment_samples(samples: Sequence[KeystrokeSample]) -> None:
    if len(samples) < 2:
        raise EnrollmentError(f"at least 2 samples required, got {len(samples)}")
    for i, sample in enumerate(samples):
        violations = validate_sample(sample)
        if violations:
            raise EnrollmentError(f"sample {i}: " + "; ".join(violations))
    key_counts = {s.key_count for s in samples}
    if len(key_counts) != 1:
        raise EnrollmentError(
            f"inconsistent password length: key counts {sorted(key_counts)}"
        )


def _threshold(policy: str, training_scores: Sequence[float]) -> float:
    spread = statistics.pstdev(training_scores)
    if policy == "min_minus_std":
        return min(training_scores) - spread
    if policy == "min":
        return min(training_scores)
    if policy == "mean_minus_2std":
        return statistics.fmean(training_scores) - 2.0 * spread
    raise ValueError(f"unknown threshold policy {policy!r}")


def enroll(
    account_id: str,
    samples: Sequence[KeystrokeSample],
    config: AppConfig,
    store: ModelStore | None = None,
) -> TrainedModel:
    """Fit a model for the account and persist it when a store is given.

    The decision threshold comes from the configured policy over the
    training samples' own scores; the default (minimum training score
    minus one standard deviation) accepts every training sample with a
    margin proportional to how spread out they already are.
    """
    require_account_id(account_id)
    _check_enrollment_samples(samples)
    features = [build_feature(s, config.feature, config.transform) for s in samples]
    standardizer = fit_standardizer(features)
    standardized = [apply_standardizer(standardizer, f) for f in features]
    scorer = train_scorer(config.classifier, standardized, config.nu, config.gamma)
    training_scores = [score_with(scorer, f) for f in standardized]
    model = TrainedModel(
        account_id=account_id,
        feature_kind=config.feature,
        standardizer=standardizer,
        scorer=scorer,
        threshold=_threshold(config.threshold_policy, training_scores),
    )
    if store is not None:
        store.save(model)
    return model


def score_sample(model: TrainedModel, sample: KeystrokeSample, config: AppConfig) -> float:
    """Push one sample through the model's feature path to a raw score."""
    violations = validate_sample(sample)
    if violations:
        raise VerifyError("; ".join(violations))
    feature = build_feature(sample, model.feature_kind, config.transform)
    if feature.length != model.standardizer.dim:
        raise VerifyError(
            f"password length mismatch: feature has {feature.length} dimensions, "
            f"model expects {model.standardizer.dim}"
        )
    return score_with(model.scorer, apply_standardizer(model.standardizer, feature))


def verify(
    account_id: str,
    sample: KeystrokeSample,
    config: AppConfig,
    store: ModelStore,
) -> VerifyResult:
    model = store.load(account_id)
    score = score_sample(model, sample, config)
    return VerifyResult(
        account_id=account_id,
        score=score,
        threshold=model.threshold,
        accepted=score >= model.threshold,
    )


def sample_from_events(
    events: Sequence[tuple[int, int]], label: str = "unlabeled"
) -> KeystrokeSample:
    """Build a sample from (press_ms, release_ms) pairs in typing order.

    Pairs are ordered by press time; validation is the caller's call
    (the service rejects invalid samples with a 400, the CLI with a
    message).
    """
    ordered = sorted(events)
    return KeystrokeSample(
        presses=tuple(p for p, _ in ordered),
        releases=tuple(r for _, r in ordered),
        label=label,
    )
