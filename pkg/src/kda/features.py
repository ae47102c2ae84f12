"""Timing feature transforms: original, Gabor, FFT, DCT, and concatenation.

The original feature of an n-key sample is the alternating dwell/flight
vector

    I = (R1-P1, P2-R1, R2-P2, ..., Pn-R_{n-1}, Rn-Pn)

of length 2n-1. The transformed families are computed from I:

* FFT  -- magnitude of the DFT of I zero-padded to ``factor * len(I)``
* DCT  -- orthonormal DCT-II of I zero-padded to ``factor * len(I)``
* Gabor -- for each centre frequency U, the magnitude of the same-length
  convolution of I with the complex kernel
  ``G(n) = 1/(2*pi*sigma) * exp(-(n/sigma)^2 / 2 + 2*pi*i*U*n)``,
  the m magnitude vectors concatenated (length ``m * len(I)``)

Zero-padding before the transform is what realises the "k times the
input length" knob, and magnitudes (rather than complex phase) keep all
features real. Defaults reproduce the reference lengths: with L=11,
FFT/DCT give 44 and the two-band Gabor gives 22.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft

from kda.core import STD_FLOOR, FeatureVector, KeystrokeSample, Standardizer, validate_sample

DEFAULT_GABOR_FREQS = (0.125, 0.25)
DEFAULT_GABOR_SIGMA = 2.0
DEFAULT_GABOR_RADIUS = 6
DEFAULT_FFT_FACTOR = 4
DEFAULT_DCT_FACTOR = 4


@dataclass(frozen=True)
class GaborParams:
    """1-D Gabor filter bank parameters.

    ``center_freqs`` are in cycles/sample, each in (0, 0.5]; ``sigma`` is
    the Gaussian envelope width in samples; taps are truncated at
    ``+/- support_radius``, which must cover at least 3 sigma.
    """

    center_freqs: tuple[float, ...] = DEFAULT_GABOR_FREQS
    sigma: float = DEFAULT_GABOR_SIGMA
    support_radius: int = DEFAULT_GABOR_RADIUS

    def __post_init__(self) -> None:
        if len(self.center_freqs) < 1:
            raise ValueError("at least one centre frequency required")
        if len(set(self.center_freqs)) != len(self.center_freqs):
            raise ValueError("centre frequencies must be distinct")
        for u in self.center_freqs:
            if not (0.0 < u <= 0.5):
                raise ValueError(f"centre frequency {u} outside (0, 0.5]")
        if not (self.sigma > 0):
            raise ValueError("sigma must be positive")
        if self.support_radius < math.ceil(3 * self.sigma):
            raise ValueError(
                f"support_radius {self.support_radius} < ceil(3*sigma) = "
                f"{math.ceil(3 * self.sigma)}"
            )


@dataclass(frozen=True)
class TransformConfig:
    fft_factor: int = DEFAULT_FFT_FACTOR
    dct_factor: int = DEFAULT_DCT_FACTOR
    gabor: GaborParams = field(default_factory=GaborParams)

    def __post_init__(self) -> None:
        if self.fft_factor < 1 or self.dct_factor < 1:
            raise ValueError("length factors must be >= 1")


def extract_original(sample: KeystrokeSample) -> FeatureVector:
    """Alternating dwell/flight vector of length 2n-1 for a valid sample."""
    violations = validate_sample(sample)
    if violations:
        raise ValueError("invalid sample: " + "; ".join(violations))
    out: list[float] = []
    for i in range(sample.key_count):
        if i > 0:
            out.append(float(sample.presses[i] - sample.releases[i - 1]))
        out.append(float(sample.releases[i] - sample.presses[i]))
    return FeatureVector(values=tuple(out), kind="original")


def _padded(v: FeatureVector, factor: int) -> np.ndarray:
    if factor < 1:
        raise ValueError("factor must be >= 1")
    x = np.zeros(factor * v.length)
    x[: v.length] = v.values
    return x


def fft_feature(v: FeatureVector, factor: int = DEFAULT_FFT_FACTOR) -> FeatureVector:
    """DFT magnitudes of ``v`` zero-padded to ``factor * len(v)``."""
    mags = np.abs(np.fft.fft(_padded(v, factor)))
    return FeatureVector(values=tuple(float(m) for m in mags), kind="fft")


def dct_feature(v: FeatureVector, factor: int = DEFAULT_DCT_FACTOR) -> FeatureVector:
    """Orthonormal DCT-II of ``v`` zero-padded to ``factor * len(v)``."""
    coeffs = scipy.fft.dct(_padded(v, factor), type=2, norm="ortho")
    return FeatureVector(values=tuple(float(c) for c in coeffs), kind="dct")


def gabor_kernel(u: float, sigma: float, support_radius: int) -> np.ndarray:
    """Complex taps G(n) for n in [-support_radius, +support_radius]."""
    if not (0.0 < u <= 0.5):
        raise ValueError(f"centre frequency {u} outside (0, 0.5]")
    if not (sigma > 0):
        raise ValueError("sigma must be positive")
    n = np.arange(-support_radius, support_radius + 1, dtype=float)
    envelope = np.exp(-0.5 * (n / sigma) ** 2) / (2.0 * math.pi * sigma)
    return envelope * np.exp(2j * math.pi * u * n)


def gabor_feature(v: FeatureVector, params: GaborParams | None = None) -> FeatureVector:
    """Per-band magnitudes of the same-length Gabor convolution, concatenated.

    Boundaries are zero-padded so each band keeps per-position
    correspondence with the input; output length is ``m * len(v)``.
    """
    params = params or GaborParams()
    x = np.asarray(v.values, dtype=float)
    r = params.support_radius
    bands: list[np.ndarray] = []
    for u in params.center_freqs:
        taps = gabor_kernel(u, params.sigma, r)
        # full convolution has length L + 2r; taking [r : r+L] evaluates
        # sum_k x[k] G(n-k) at n = 0..L-1 regardless of which is shorter
        full = np.convolve(x.astype(complex), taps, mode="full")
        bands.append(np.abs(full[r : r + v.length]))
    return FeatureVector(
        values=tuple(float(m) for m in np.concatenate(bands)), kind="gabor"
    )


def concat_features(parts: Sequence[FeatureVector]) -> FeatureVector:
    """Concatenate feature vectors in order; single part passes through."""
    if not parts:
        raise ValueError("nothing to concatenate")
    if len(parts) == 1:
        return parts[0]
    values: list[float] = []
    for p in parts:
        values.extend(p.values)
    return FeatureVector(values=tuple(values), kind="concat")


def fit_standardizer(training: Sequence[FeatureVector]) -> Standardizer:
    """Per-dimension mean and population std over the training vectors.

    Stds are clamped to ``STD_FLOOR`` so apply never divides by zero.
    """
    if not training:
        raise ValueError("at least one training vector required")
    dim = training[0].length
    for t in training:
        if t.length != dim:
            raise ValueError(f"dimension mismatch: {t.length} vs {dim}")
    mat = np.array([t.values for t in training], dtype=float)
    means = mat.mean(axis=0)
    stds = np.maximum(mat.std(axis=0), STD_FLOOR)
    return Standardizer(
        means=tuple(float(m) for m in means), stds=tuple(float(s) for s in stds)
    )


def apply_standardizer(s: Standardizer, v: FeatureVector) -> FeatureVector:
    if v.length != s.dim:
        raise ValueError(f"dimension mismatch: vector {v.length} vs standardizer {s.dim}")
    scaled = (np.asarray(v.values) - np.asarray(s.means)) / np.asarray(s.stds)
    return FeatureVector(values=tuple(float(x) for x in scaled), kind=v.kind)
