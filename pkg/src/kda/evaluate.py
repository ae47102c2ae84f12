"""ROC curves, equal error rate, and the benchmark harness.

Scores follow the package-wide orientation (larger = more genuine), so
a single threshold sweep convention serves every scorer: at threshold
t, a sample is accepted iff its score is >= t. Sweeping t from above
the maximum score to below the minimum traces the full curve from
(0, 0) to (1, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from kda.classify import (
    fit_score_normalizer,
    fuse_scores,
    gaussian_score,
    gaussian_train,
    nn_score,
    nn_train,
    ocsvm_score,
    ocsvm_train,
)
from kda.core import FeatureVector, KeystrokeSample
from kda.features import (
    TransformConfig,
    apply_standardizer,
    concat_features,
    dct_feature,
    extract_original,
    fft_feature,
    fit_standardizer,
    gabor_feature,
)
from kda.ingest import Dataset

FEATURE_ROWS = (
    "original",
    "gabor",
    "fft",
    "dct",
    "ori_gabor",
    "ori_fft",
    "ori_dct",
    "feature_level",
    "classifier_level",
)
ROW_LABELS = {
    "original": "Original",
    "gabor": "Gabor",
    "fft": "FFT",
    "dct": "DCT",
    "ori_gabor": "OriGabor",
    "ori_fft": "OriFFT",
    "ori_dct": "OriDCT",
    "feature_level": "Feature-level",
    "classifier_level": "Classifier-level",
}
CLASSIFIERS = ("ocsvm", "gaussian", "nn")
CLASSIFIER_LABELS = {"ocsvm": "OC-SVM", "gaussian": "Gaussian", "nn": "NN"}
POOLING_MODES = ("pooled", "per_account")

FUSED_FAMILIES = ("original", "gabor", "fft", "dct")


@dataclass(frozen=True)
class RocCurve:
    """Threshold sweep over two pooled score lists.

    points is ordered by strictly descending threshold, beginning at a
    +inf sentinel (accept nothing) and ending at a -inf sentinel
    (accept everything), so both rates span [0, 1].
    """

    points: tuple[tuple[float, float, float], ...]  # (threshold, fpr, tpr)
    n_genuine: int
    n_intruder: int


def roc_curve(genuine_scores: Sequence[float], intruder_scores: Sequence[float]) -> RocCurve:
    if len(genuine_scores) == 0 or len(intruder_scores) == 0:
        raise ValueError("both score lists must be non-empty")
    genuine = np.asarray(genuine_scores, dtype=float)
    intruder = np.asarray(intruder_scores, dtype=float)
    if not (np.isfinite(genuine).all() and np.isfinite(intruder).all()):
        raise ValueError("scores must be finite")

    thresholds = np.unique(np.concatenate([genuine, intruder]))[::-1]
    points = [(math.inf, 0.0, 0.0)]
    for t in thresholds:
        tpr = float(np.count_nonzero(genuine >= t)) / genuine.size
        fpr = float(np.count_nonzero(intruder >= t)) / intruder.size
        points.append((float(t), fpr, tpr))
    points.append((-math.inf, 1.0, 1.0))
    return RocCurve(points=tuple(points), n_genuine=genuine.size, n_intruder=intruder.size)


def compute_eer(roc: RocCurve) -> float:
    """Equal error rate in percent.

    Walks the sweep for the first point where FPR >= FNR; if the
    crossing falls between two sweep points, the rate is linearly
    interpolated between them.
    """
    prev_fpr = prev_fnr = None
    for _, fpr, tpr in roc.points:
        fnr = 1.0 - tpr
        if fpr >= fnr:
            if fpr == fnr or prev_fpr is None:
                return 100.0 * fpr
            prev_diff = prev_fpr - prev_fnr
            lam = -prev_diff / ((fpr - fnr) - prev_diff)
            return 100.0 * (prev_fpr + lam * (fpr - prev_fpr))
        prev_fpr, prev_fnr = fpr, fnr
    return 100.0  # unreachable for a well-formed curve ending at (1, 1)


def roc_points_csv(roc: RocCurve) -> str:
    lines = ["threshold,fpr,tpr"]
    for t, fpr, tpr in roc.points:
        lines.append(f"{t!r},{fpr!r},{tpr!r}")
    return "\n".join(lines) + "\n"


def build_feature(sample: KeystrokeSample, row: str, config: TransformConfig) -> FeatureVector:
    """One vector of the named family (fusion rows concatenate parts)."""
    base = extract_original(sample)
    if row == "original":
        return base
    if row == "gabor":
        return gabor_feature(base, config.gabor)
    if row == "fft":
        return fft_feature(base, config.fft_factor)
    if row == "dct":
        return dct_feature(base, config.dct_factor)
    if row == "ori_gabor":
        return concat_features([base, gabor_feature(base, config.gabor)])
    if row == "ori_fft":
        return concat_features([base, fft_feature(base, config.fft_factor)])
    if row == "ori_dct":
        return concat_features([base, dct_feature(base, config.dct_factor)])
    if row == "feature_level":
        return concat_features(
            [
                base,
                gabor_feature(base, config.gabor),
                fft_feature(base, config.fft_factor),
                dct_feature(base, config.dct_factor),
            ]
        )
    raise ValueError(f"unknown feature row {row!r}")


def train_scorer(classifier: str, training: Sequence[FeatureVector], nu: float, gamma: float | None):
    if classifier == "ocsvm":
        return ocsvm_train(training, nu=nu, gamma=gamma)
    if classifier == "gaussian":
        return gaussian_train(training)
    if classifier == "nn":
        return nn_train(training)
    raise ValueError(f"unknown classifier {classifier!r}")


def score_with(model, x: FeatureVector) -> float:
    name = type(model).__name__
    if name == "OcsvmModel":
        return ocsvm_score(model, x)
    if name == "GaussianModel":
        return gaussian_score(model, x)
    if name == "NnModel":
        return nn_score(model, x)
    raise TypeError(f"unknown scorer type {name}")


@dataclass(frozen=True)
class BenchmarkConfig:
    transform: TransformConfig = field(default_factory=TransformConfig)
    nu: float = 0.5
    gamma: float | None = None  # None: 1/d per account
    rows: tuple[str, ...] = FEATURE_ROWS
    classifiers: tuple[str, ...] = CLASSIFIERS
    pooling: str = "pooled"
    combiner: str = "mean"

    def __post_init__(self) -> None:
        for row in self.rows:
            if row not in FEATURE_ROWS:
                raise ValueError(f"unknown feature row {row!r}")
        for c in self.classifiers:
            if c not in CLASSIFIERS:
                raise ValueError(f"unknown classifier {c!r}")
        if self.pooling not in POOLING_MODES:
            raise ValueError(f"pooling must be one of {POOLING_MODES}, got {self.pooling!r}")


@dataclass
class EvalReport:
    dataset_name: str
    pooling: str
    eers: dict[tuple[str, str], float]  # (row, classifier) -> EER percent (nan if undefined)
    per_account_eers: dict[tuple[str, str], dict[str, float]]
    rejects: dict[str, int]  # account_id -> test samples excluded
    n_genuine: int
    n_intruder: int

    def render(self) -> str:
        """Aligned text table: feature rows by classifier columns."""
        rows = sorted({r for r, _ in self.eers}, key=FEATURE_ROWS.index)
        cols = sorted({c for _, c in self.eers}, key=CLASSIFIERS.index)
        width = max(len(ROW_LABELS[r]) for r in rows) + 2
        header = "".ljust(width) + "".join(CLASSIFIER_LABELS[c].rjust(10) for c in cols)
        lines = [
            f"dataset: {self.dataset_name}  (EER %, {self.pooling}, "
            f"{self.n_genuine} genuine / {self.n_intruder} intruder scores)",
            header,
        ]
        for r in rows:
            cells = []
            for c in cols:
                eer = self.eers[(r, c)]
                cells.append(("n/a" if math.isnan(eer) else f"{eer:.3f}").rjust(10))
            lines.append(ROW_LABELS[r].ljust(width) + "".join(cells))
        total_rejects = sum(self.rejects.values())
        if total_rejects:
            lines.append(f"rejected test samples: {total_rejects} "
                         f"({', '.join(f'{a}: {n}' for a, n in sorted(self.rejects.items()))})")
        return "\n".join(lines)

    def to_csv(self) -> str:
        cols = sorted({c for _, c in self.eers}, key=CLASSIFIERS.index)
        rows = sorted({r for r, _ in self.eers}, key=FEATURE_ROWS.index)
        lines = ["feature," + ",".join(CLASSIFIER_LABELS[c] for c in cols)]
        for r in rows:
            cells = [ROW_LABELS[r]]
            for c in cols:
                eer = self.eers[(r, c)]
                cells.append("" if math.isnan(eer) else f"{eer:.6f}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def _account_key_count(training: Sequence[KeystrokeSample]) -> int:
    """Majority key count among training samples (ties break low)."""
    counts: dict[int, int] = {}
    for s in training:
        counts[s.key_count] = counts.get(s.key_count, 0) + 1
    return max(sorted(counts), key=lambda k: counts[k])


def _usable_accounts(
    dataset: Dataset,
) -> tuple[list[tuple[str, list, list, list]], dict[str, int]]:
    """Filter each account to a single password length.

    Training samples off the account's majority key count are dropped;
    test samples whose key count differs from it are rejected (their
    features would not be comparable to the trained model).
    """
    usable = []
    rejects: dict[str, int] = {}
    for account_id in dataset.account_ids:
        acc = dataset.accounts[account_id]
        if not acc.training:
            continue
        key_count = _account_key_count(acc.training)
        training = [s for s in acc.training if s.key_count == key_count]
        dropped = len(acc.training) - len(training)
        genuine = [s for s in acc.genuine_tests if s.key_count == key_count]
        intruder = [s for s in acc.intruder_tests if s.key_count == key_count]
        n_rejected = (
            dropped
            + (len(acc.genuine_tests) - len(genuine))
            + (len(acc.intruder_tests) - len(intruder))
        )
        if n_rejected:
            rejects[account_id] = n_rejected
        usable.append((account_id, training, genuine, intruder))
    return usable, rejects


def account_scores(
    training: Sequence[KeystrokeSample],
    genuine: Sequence[KeystrokeSample],
    intruder: Sequence[KeystrokeSample],
    row: str,
    classifier: str,
    config: BenchmarkConfig,
) -> tuple[list[float], list[float]]:
    """Fit on the training samples, score both test pools.

    For the classifier-level row, one model per base feature family is
    trained and the per-model scores are z-normalized against the
    training scores and averaged.
    """
    if row != "classifier_level":
        feats = [build_feature(s, row, config.transform) for s in training]
        standardizer = fit_standardizer(feats)
        std_train = [apply_standardizer(standardizer, f) for f in feats]
        model = train_scorer(classifier, std_train, config.nu, config.gamma)

        def score_sample(sample: KeystrokeSample) -> float:
            fv = apply_standardizer(standardizer, build_feature(sample, row, config.transform))
            return score_with(model, fv)

        return [score_sample(s) for s in genuine], [score_sample(s) for s in intruder]

    scorers = []
    for family in FUSED_FAMILIES:
        feats = [build_feature(s, family, config.transform) for s in training]
        standardizer = fit_standardizer(feats)
        std_train = [apply_standardizer(standardizer, f) for f in feats]
        model = train_scorer(classifier, std_train, config.nu, config.gamma)
        normalizer = fit_score_normalizer([score_with(model, f) for f in std_train])
        scorers.append((family, standardizer, model, normalizer))

    def fused(sample: KeystrokeSample) -> float:
        raw = []
        normalizers = []
        for family, standardizer, model, normalizer in scorers:
            fv = apply_standardizer(standardizer, build_feature(sample, family, config.transform))
            raw.append(score_with(model, fv))
            normalizers.append(normalizer)
        return fuse_scores(raw, normalizers, combiner=config.combiner)

    return [fused(s) for s in genuine], [fused(s) for s in intruder]


def cell_scores(
    dataset: Dataset, row: str, classifier: str, config: BenchmarkConfig
) -> tuple[dict[str, tuple[list[float], list[float]]], dict[str, int]]:
    """Per-account (genuine, intruder) score lists for one table cell."""
    usable, rejects = _usable_accounts(dataset)
    scores: dict[str, tuple[list[float], list[float]]] = {}
    for account_id, training, genuine, intruder in usable:
        scores[account_id] = account_scores(training, genuine, intruder, row, classifier, config)
    return scores, rejects


def cell_roc(
    dataset: Dataset, row: str, classifier: str, config: BenchmarkConfig
) -> RocCurve:
    """Pooled ROC for one (feature, classifier) cell."""
    scores, _ = cell_scores(dataset, row, classifier, config)
    genuine = [s for g, _ in scores.values() for s in g]
    intruder = [s for _, i in scores.values() for s in i]
    return roc_curve(genuine, intruder)


def _cell_eer(per_account: dict[str, tuple[list[float], list[float]]], pooling: str) -> float:
    if pooling == "pooled":
        genuine = [s for g, _ in per_account.values() for s in g]
        intruder = [s for _, i in per_account.values() for s in i]
        if not genuine or not intruder:
            return math.nan
        return compute_eer(roc_curve(genuine, intruder))
    eers = [
        compute_eer(roc_curve(g, i)) for g, i in per_account.values() if g and i
    ]
    return float(np.mean(eers)) if eers else math.nan


def run_benchmark(dataset: Dataset, config: BenchmarkConfig | None = None) -> EvalReport:
    """EER for every configured (feature row, classifier) cell.

    Accounts are processed in sorted-id order and each cell's scores
    are pooled (or averaged per account) per config.pooling, so the
    report is deterministic for a given dataset and config.
    """
    config = config or BenchmarkConfig()
    eers: dict[tuple[str, str], float] = {}
    per_account_eers: dict[tuple[str, str], dict[str, float]] = {}
    rejects: dict[str, int] = {}
    n_genuine = n_intruder = 0
    first_cell = True
    for row in config.rows:
        for classifier in config.classifiers:
            scores, rejects = cell_scores(dataset, row, classifier, config)
            if first_cell:
                n_genuine = sum(len(g) for g, _ in scores.values())
                n_intruder = sum(len(i) for _, i in scores.values())
                first_cell = False
            eers[(row, classifier)] = _cell_eer(scores, config.pooling)
            per_account_eers[(row, classifier)] = {
                a: compute_eer(roc_curve(g, i)) for a, (g, i) in scores.items() if g and i
            }
    return EvalReport(
        dataset_name=dataset.name,
        pooling=config.pooling,
        eers=eers,
        per_account_eers=per_account_eers,
        rejects=rejects,
        n_genuine=n_genuine,
        n_intruder=n_intruder,
    )
