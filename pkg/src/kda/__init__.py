"""Keystroke dynamics authentication toolkit.

Timing features (original / Gabor / FFT / DCT), one-class scorers
(OC-SVM, Gaussian, nearest neighbour), fusion, ROC/EER evaluation,
BeiHang-style dataset ingestion, a PS/2 scan-code decoder, and an
enroll/verify pipeline exposed through a CLI and an HTTP service.
"""

from kda.core import (
    FeatureVector,
    KeystrokeSample,
    Standardizer,
    TrainedModel,
    validate_sample,
)

__all__ = [
    "FeatureVector",
    "KeystrokeSample",
    "Standardizer",
    "TrainedModel",
    "validate_sample",
]

__version__ = "0.1.0"
