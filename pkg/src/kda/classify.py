"""One-class scorers and score-level fusion.

All scores are oriented so that larger means more genuine:

* OC-SVM  -- signed margin ``sum_i alpha_i K(sv_i, x) - rho``
* Gaussian -- log density of a diagonal-covariance normal
* NN       -- negated Euclidean distance to the closest exemplar

The OC-SVM is trained from scratch on the dual

    min 1/2 sum_ij alpha_i alpha_j K(x_i, x_j)
    s.t. 0 <= alpha_i <= 1/(nu*l),  sum_i alpha_i = 1

with a deterministic most-violating-pair working-set loop and analytic
two-variable updates. Training sets here are tiny (a handful of
registration samples per account), so the plain SMO with a KKT stopping
tolerance is both simple and exact enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from kda.core import STD_FLOOR, VAR_FLOOR, FeatureVector

KKT_TOL = 1e-6
MAX_SMO_ITERATIONS = 100_000

DEFAULT_NU = 0.5


@dataclass(frozen=True)
class OcsvmModel:
    """Trained one-class SVM: all training vectors with their dual weights.

    ``support_vectors`` keeps the full (standardized) training set so the
    dual feasibility and the nu-property can be re-checked after the
    fact; vectors with alpha == 0 contribute nothing to scores.
    """

    support_vectors: tuple[tuple[float, ...], ...]
    alphas: tuple[float, ...]
    rho: float
    gamma: float
    nu: float

    def __post_init__(self) -> None:
        if not self.support_vectors:
            raise ValueError("at least one support vector required")
        if len(self.alphas) != len(self.support_vectors):
            raise ValueError(
                f"count mismatch: {len(self.alphas)} alphas vs "
                f"{len(self.support_vectors)} support vectors"
            )
        widths = {len(sv) for sv in self.support_vectors}
        if len(widths) != 1:
            raise ValueError(f"support vectors of mixed dimensionality: {sorted(widths)}")
        if not (self.gamma > 0):
            raise ValueError("gamma must be positive")
        if not (0.0 < self.nu <= 1.0):
            raise ValueError(f"nu must be in (0, 1], got {self.nu}")

    @property
    def dim(self) -> int:
        return len(self.support_vectors[0])

    @property
    def train_count(self) -> int:
        return len(self.support_vectors)


@dataclass(frozen=True)
class GaussianModel:
    mu: tuple[float, ...]
    diag_sigma: tuple[float, ...]  # variances, each >= VAR_FLOOR

    def __post_init__(self) -> None:
        if len(self.mu) != len(self.diag_sigma):
            raise ValueError(
                f"dimension mismatch: {len(self.mu)} means vs "
                f"{len(self.diag_sigma)} variances"
            )
        for i, v in enumerate(self.diag_sigma):
            if not (v >= VAR_FLOOR):
                raise ValueError(f"variance below floor at index {i}: {v!r}")

    @property
    def dim(self) -> int:
        return len(self.mu)


@dataclass(frozen=True)
class NnModel:
    exemplars: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if not self.exemplars:
            raise ValueError("at least one exemplar required")
        dims = {len(e) for e in self.exemplars}
        if len(dims) != 1:
            raise ValueError(f"exemplars of mixed dimensionality: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return len(self.exemplars[0])


def rbf_kernel(a: Sequence[float], b: Sequence[float], gamma: float) -> float:
    """exp(-gamma * ||a - b||^2)."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    if not (gamma > 0):
        raise ValueError("gamma must be positive")
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.exp(-gamma * float(d @ d)))


def _training_matrix(training: Sequence[FeatureVector]) -> np.ndarray:
    if not training:
        raise ValueError("at least one training vector required")
    dim = training[0].length
    for t in training:
        if t.length != dim:
            raise ValueError(f"dimension mismatch: {t.length} vs {dim}")
    return np.array([t.values for t in training], dtype=float)


def _rbf_gram(x: np.ndarray, gamma: float) -> np.ndarray:
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    return np.exp(-gamma * np.maximum(d2, 0.0))


def ocsvm_train(
    training: Sequence[FeatureVector],
    nu: float = DEFAULT_NU,
    gamma: float | None = None,
) -> OcsvmModel:
    """Solve the one-class dual to KKT tolerance ``KKT_TOL``.

    ``gamma`` defaults to 1/d. For a single training point the dual is
    the single feasible point alpha = [1] with rho = K(x, x).
    """
    x = _training_matrix(training)
    l, dim = x.shape
    if not (0.0 < nu <= 1.0):
        raise ValueError(f"nu must be in (0, 1], got {nu}")
    if gamma is None:
        gamma = 1.0 / dim
    if not (gamma > 0):
        raise ValueError("gamma must be positive")

    if l == 1:
        return OcsvmModel(
            support_vectors=(tuple(float(c) for c in x[0]),),
            alphas=(1.0,),
            rho=1.0,  # K(x, x) for the RBF kernel
            gamma=gamma,
            nu=nu,
        )

    q = _rbf_gram(x, gamma)
    cap = 1.0 / (nu * l)

    # feasible start: fill the box greedily until the mass reaches 1
    alpha = np.zeros(l)
    n_full = int(math.floor(nu * l))
    alpha[:n_full] = cap
    if n_full < l:
        alpha[n_full] = 1.0 - n_full * cap
    grad = q @ alpha

    for _ in range(MAX_SMO_ITERATIONS):
        up = alpha < cap
        low = alpha > 0.0
        grad_up = np.where(up, grad, np.inf)
        grad_low = np.where(low, grad, -np.inf)
        i = int(np.argmin(grad_up))
        j = int(np.argmax(grad_low))
        # masked extremes: an empty candidate set (nu=1 pins every alpha
        # at the cap) must read as converged, not as a live pair
        if grad_low[j] - grad_up[i] <= KKT_TOL:
            break
        eta = q[i, i] + q[j, j] - 2.0 * q[i, j]
        room_i = cap - alpha[i]
        room_j = alpha[j]
        if eta > 1e-15:
            delta = min((grad[j] - grad[i]) / eta, room_i, room_j)
        else:
            # flat or concave along the pair direction: full step
            delta = min(room_i, room_j)
        # land exactly on a binding bound so the variable leaves the
        # working set (a 1-ulp residue would re-select this pair forever)
        alpha[i] = cap if delta >= room_i else alpha[i] + delta
        alpha[j] = 0.0 if delta >= room_j else alpha[j] - delta
        grad += delta * (q[:, i] - q[:, j])

    grad = q @ alpha  # discard incremental drift before deriving rho
    margin = (alpha > 0.0) & (alpha < cap)
    if margin.any():
        rho = float(grad[margin].mean())
    else:
        at_cap = alpha >= cap
        at_zero = alpha <= 0.0
        lo = float(grad[at_cap].max()) if at_cap.any() else None
        hi = float(grad[at_zero].min()) if at_zero.any() else None
        if lo is not None and hi is not None:
            rho = (lo + hi) / 2.0
        else:
            rho = lo if lo is not None else float(hi)  # type: ignore[arg-type]

    return OcsvmModel(
        support_vectors=tuple(tuple(float(c) for c in row) for row in x),
        alphas=tuple(float(a) for a in alpha),
        rho=rho,
        gamma=gamma,
        nu=nu,
    )


def ocsvm_score(model: OcsvmModel, x: FeatureVector) -> float:
    """Signed margin: positive lies on the genuine side of the hyperplane."""
    if x.length != model.dim:
        raise ValueError(f"dimension mismatch: {x.length} vs {model.dim}")
    sv = np.asarray(model.support_vectors, dtype=float)
    d = sv - np.asarray(x.values, dtype=float)
    k = np.exp(-model.gamma * np.sum(d * d, axis=1))
    return float(np.asarray(model.alphas) @ k - model.rho)


def ocsvm_dual_objective(model: OcsvmModel) -> float:
    """1/2 alpha' Q alpha of the stored dual solution."""
    sv = np.asarray(model.support_vectors, dtype=float)
    alpha = np.asarray(model.alphas)
    return 0.5 * float(alpha @ _rbf_gram(sv, model.gamma) @ alpha)


def ocsvm_kkt_residual(model: OcsvmModel) -> float:
    """Violating-pair gap of the stored dual solution (0 at an optimum).

    max(0, max{grad_j : alpha_j > 0} - min{grad_i : alpha_i < cap}).
    """
    sv = np.asarray(model.support_vectors, dtype=float)
    alpha = np.asarray(model.alphas)
    if len(alpha) == 1:
        return 0.0
    grad = _rbf_gram(sv, model.gamma) @ alpha
    cap = 1.0 / (model.nu * len(alpha))
    up = grad[alpha < cap]
    low = grad[alpha > 0.0]
    if up.size == 0 or low.size == 0:
        return 0.0
    return max(0.0, float(low.max() - up.min()))


def gaussian_train(training: Sequence[FeatureVector]) -> GaussianModel:
    """Per-dimension mean and population variance, clamped to VAR_FLOOR."""
    x = _training_matrix(training)
    mu = x.mean(axis=0)
    var = np.maximum(x.var(axis=0), VAR_FLOOR)
    return GaussianModel(
        mu=tuple(float(m) for m in mu), diag_sigma=tuple(float(v) for v in var)
    )


def gaussian_score(model: GaussianModel, x: FeatureVector) -> float:
    """Log density of the diagonal Gaussian, never exponentiated."""
    if x.length != model.dim:
        raise ValueError(f"dimension mismatch: {x.length} vs {model.dim}")
    var = np.asarray(model.diag_sigma)
    delta = np.asarray(x.values) - np.asarray(model.mu)
    return float(
        -0.5
        * (model.dim * math.log(2.0 * math.pi) + np.log(var).sum() + (delta * delta / var).sum())
    )


def nn_train(training: Sequence[FeatureVector]) -> NnModel:
    x = _training_matrix(training)
    return NnModel(exemplars=tuple(tuple(float(c) for c in row) for row in x))


def nn_score(model: NnModel, x: FeatureVector) -> float:
    """Negated distance to the nearest exemplar (0 iff x is an exemplar)."""
    if x.length != model.dim:
        raise ValueError(f"dimension mismatch: {x.length} vs {model.dim}")
    ex = np.asarray(model.exemplars, dtype=float)
    d = ex - np.asarray(x.values, dtype=float)
    return float(-np.sqrt(np.sum(d * d, axis=1).min()))


@dataclass(frozen=True)
class ScoreNormalizer:
    """Mean/std of one classifier's training scores, for z-scoring."""

    mean: float
    std: float

    def __post_init__(self) -> None:
        if not (self.std >= STD_FLOOR):
            raise ValueError(f"std below floor: {self.std!r}")

    def normalize(self, score: float) -> float:
        return (score - self.mean) / self.std


def fit_score_normalizer(scores: Sequence[float]) -> ScoreNormalizer:
    if not scores:
        raise ValueError("at least one score required")
    arr = np.asarray(scores, dtype=float)
    return ScoreNormalizer(mean=float(arr.mean()), std=max(float(arr.std()), STD_FLOOR))


def fuse_scores(
    scores: Sequence[float],
    normalizers: Sequence[ScoreNormalizer],
    combiner: str = "mean",
) -> float:
    """Combine per-classifier scores into one decision score.

    Each score is z-normalized by its classifier's training-score
    statistics first; the default combiner is the mean of the normalized
    scores (``median`` and ``min`` are available as alternatives).
    """
    if len(scores) != len(normalizers):
        raise ValueError(f"length mismatch: {len(scores)} scores vs {len(normalizers)} normalizers")
    if not scores:
        raise ValueError("at least one score required")
    z = [n.normalize(s) for s, n in zip(scores, normalizers)]
    if combiner == "mean":
        return float(np.mean(z))
    if combiner == "median":
        return float(np.median(z))
    if combiner == "min":
        return float(np.min(z))
    raise ValueError(f"unknown combiner {combiner!r}")
