"""Independent reference implementations used to check the package.

Everything here is deliberately naive: O(N^2) direct summations for the
transforms, brute-force double loops for convolution, an accelerated
projected-gradient solver for the one-class dual, and a dense threshold
sweep for EER. None of it imports the package under test.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def naive_dft_magnitude(x: np.ndarray) -> np.ndarray:
    """|X_k| by direct double summation."""
    n = len(x)
    out = np.empty(n)
    for k in range(n):
        acc = 0j
        for t in range(n):
            acc += x[t] * cmath.exp(-2j * math.pi * k * t / n)
        out[k] = abs(acc)
    return out


def naive_dct2_ortho(x: np.ndarray) -> np.ndarray:
    """Orthonormal DCT-II by direct double summation."""
    n = len(x)
    out = np.empty(n)
    for k in range(n):
        acc = 0.0
        for t in range(n):
            acc += x[t] * math.cos(math.pi * (2 * t + 1) * k / (2 * n))
        scale = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        out[k] = scale * acc
    return out


def naive_gabor_band(x: np.ndarray, u: float, sigma: float, radius: int) -> np.ndarray:
    """|sum_k x[k] G(n-k)| for n = 0..len(x)-1, zero padding outside x."""
    out = np.empty(len(x))
    for n in range(len(x)):
        acc = 0j
        for k in range(len(x)):
            m = n - k
            if -radius <= m <= radius:
                env = math.exp(-0.5 * (m / sigma) ** 2) / (2.0 * math.pi * sigma)
                acc += x[k] * env * cmath.exp(2j * math.pi * u * m)
        out[n] = abs(acc)
    return out


def basis_dft_magnitude(x: np.ndarray) -> np.ndarray:
    """Same direct summation as naive_dft_magnitude, as one matrix product.

    Every basis entry exp(-2j pi k t / N) is still evaluated explicitly;
    only the summation loop is handed to the matrix multiply, keeping
    thousand-case sweeps affordable.
    """
    n = len(x)
    k = np.arange(n)
    basis = np.exp(-2j * math.pi * np.outer(k, k) / n)
    return np.abs(basis @ x.astype(complex))


def basis_dct2_ortho(x: np.ndarray) -> np.ndarray:
    """Matrix-product counterpart of naive_dct2_ortho."""
    n = len(x)
    k = np.arange(n)[:, None]
    t = np.arange(n)[None, :]
    basis = np.cos(math.pi * (2 * t + 1) * k / (2 * n))
    scale = np.full(n, math.sqrt(2.0 / n))
    scale[0] = math.sqrt(1.0 / n)
    return scale * (basis @ x)


def project_capped_simplex(v: np.ndarray, cap: float) -> np.ndarray:
    """Euclidean projection onto {0 <= a <= cap, sum a = 1}.

    The projection is clip(v - tau, 0, cap) for the tau making the sum
    one; the sum is piecewise linear and decreasing in tau, so tau is
    found exactly from the breakpoint grid.
    """
    knots = np.unique(np.concatenate([v, v - cap]))

    def mass(tau: float) -> float:
        return float(np.clip(v - tau, 0.0, cap).sum())

    lo = float(knots[0]) - 1.0  # mass here is len(v)*cap >= 1
    hi = float(knots[-1]) + 1.0  # mass here is 0
    for knot in knots:
        m = mass(float(knot))
        if m >= 1.0:
            lo = float(knot)
        else:
            hi = float(knot)
            break
    m_lo, m_hi = mass(lo), mass(hi)
    if m_lo <= m_hi:  # flat segment, any tau on it works
        tau = lo
    else:
        tau = lo + (m_lo - 1.0) * (hi - lo) / (m_lo - m_hi)
    return np.clip(v - tau, 0.0, cap)


def _greedy_linear_min(g: np.ndarray, cap: float) -> float:
    """min g'z over the capped simplex: fill caps in ascending-g order."""
    total = 0.0
    remaining = 1.0
    for gi in np.sort(g):
        take = min(cap, remaining)
        total += gi * take
        remaining -= take
        if remaining <= 0.0:
            break
    return total


def qp_capped_simplex(q: np.ndarray, cap: float, iterations: int = 4000) -> np.ndarray:
    """min 0.5 a'Qa over the capped simplex by accelerated projected gradient.

    Returns the best iterate seen (the accelerated sequence is not
    monotone). Stops early when the Frank-Wolfe gap -- an upper bound
    on the objective suboptimality of the current iterate -- certifies
    convergence. Q must be symmetric positive semidefinite.
    """
    l = q.shape[0]
    step = 1.0 / max(float(np.linalg.eigvalsh(q)[-1]), 1e-12)
    alpha = project_capped_simplex(np.full(l, 1.0 / l), cap)
    y = alpha.copy()
    t = 1.0
    best = alpha
    best_obj = 0.5 * float(alpha @ q @ alpha)
    for _ in range(iterations):
        nxt = project_capped_simplex(y - step * (q @ y), cap)
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = nxt + ((t - 1.0) / t_next) * (nxt - alpha)
        alpha, t = nxt, t_next
        grad = q @ alpha
        obj = 0.5 * float(alpha @ grad)
        if obj < best_obj:
            best, best_obj = alpha, obj
        fw_gap = float(grad @ alpha) - _greedy_linear_min(grad, cap)
        if fw_gap <= 1e-9:
            break
    return best


def dense_sweep_eer(genuine: np.ndarray, intruder: np.ndarray, n_thresholds: int = 10_000) -> float:
    """EER in percent from a uniform grid of thresholds over the scores.

    At each threshold t: FPR = fraction of intruder scores >= t, FNR =
    fraction of genuine scores < t. Returns the midpoint rate at the
    grid point where |FPR - FNR| is smallest.
    """
    lo = min(genuine.min(), intruder.min())
    hi = max(genuine.max(), intruder.max())
    pad = 1e-9 * max(1.0, abs(lo), abs(hi))
    grid = np.linspace(lo - pad, hi + pad, n_thresholds)
    fpr = (intruder[None, :] >= grid[:, None]).mean(axis=1)
    fnr = (genuine[None, :] < grid[:, None]).mean(axis=1)
    i = int(np.argmin(np.abs(fpr - fnr)))
    return 100.0 * 0.5 * (fpr[i] + fnr[i])
