"""Application configuration and its key=value file format.

A config file is plain text, one ``key = value`` per line, with ``#``
comments and blank lines ignored:

    # feature pipeline and classifier
    feature = original
    classifier = ocsvm
    nu = 0.5
    gamma = auto
    fft_factor = 4
    dct_factor = 4
    gabor_freqs = 0.125, 0.25
    gabor_sigma = 2.0
    gabor_radius = 6
    pooling = pooled
    combiner = mean
    threshold_policy = min_minus_std
    enroll_samples = 4
    partition_by = genuine_flag
    model_dir = ./models
    bind = 127.0.0.1:8000

The defaults (no file at all) run the reference pipeline: original
feature, OC-SVM with nu=0.5 and gamma=1/d on standardized vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from kda.evaluate import CLASSIFIERS, FEATURE_ROWS, POOLING_MODES, BenchmarkConfig
from kda.features import GaborParams, TransformConfig
from kda.ingest import PARTITION_MODES

THRESHOLD_POLICIES = ("min_minus_std", "min", "mean_minus_2std")
COMBINERS = ("mean", "median", "min")


class ConfigError(ValueError):
    """Unusable config file contents; message names the offending key."""


@dataclass(frozen=True)
class AppConfig:
    feature: str = "original"
    classifier: str = "ocsvm"
    nu: float = 0.5
    gamma: float | None = None  # None: 1/d at train time
    transform: TransformConfig = field(default_factory=TransformConfig)
    pooling: str = "pooled"
    combiner: str = "mean"
    threshold_policy: str = "min_minus_std"
    enroll_samples: int = 4
    partition_by: str = "genuine_flag"
    model_dir: str = "./models"
    bind: str = "127.0.0.1:8000"
    static_dir: str | None = None

    def __post_init__(self) -> None:
        if self.feature not in FEATURE_ROWS or self.feature == "classifier_level":
            allowed = tuple(r for r in FEATURE_ROWS if r != "classifier_level")
            raise ConfigError(f"feature must be one of {allowed}, got {self.feature!r}")
        if self.classifier not in CLASSIFIERS:
            raise ConfigError(f"classifier must be one of {CLASSIFIERS}, got {self.classifier!r}")
        if not (0.0 < self.nu <= 1.0):
            raise ConfigError(f"nu must be in (0, 1], got {self.nu}")
        if self.gamma is not None and not (self.gamma > 0):
            raise ConfigError(f"gamma must be positive or auto, got {self.gamma}")
        if self.pooling not in POOLING_MODES:
            raise ConfigError(f"pooling must be one of {POOLING_MODES}, got {self.pooling!r}")
        if self.combiner not in COMBINERS:
            raise ConfigError(f"combiner must be one of {COMBINERS}, got {self.combiner!r}")
        if self.threshold_policy not in THRESHOLD_POLICIES:
            raise ConfigError(
                f"threshold_policy must be one of {THRESHOLD_POLICIES}, "
                f"got {self.threshold_policy!r}"
            )
        if self.enroll_samples < 2:
            raise ConfigError(f"enroll_samples must be >= 2, got {self.enroll_samples}")
        if self.partition_by not in PARTITION_MODES:
            raise ConfigError(
                f"partition_by must be one of {PARTITION_MODES}, got {self.partition_by!r}"
            )

    def benchmark_config(self) -> BenchmarkConfig:
        return BenchmarkConfig(
            transform=self.transform,
            nu=self.nu,
            gamma=self.gamma,
            pooling=self.pooling,
            combiner=self.combiner,
        )


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw!r}") from None


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {raw!r}") from None


def parse_config(text: str) -> AppConfig:
    """Parse config file text into an AppConfig, validating every key."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: not a key = value line: {line.strip()!r}")
        values[key.strip()] = value.strip()

    transform_kwargs: dict = {}
    gabor_kwargs: dict = {}
    config_kwargs: dict = {}
    for key, raw in values.items():
        if key == "feature":
            config_kwargs["feature"] = raw
        elif key == "classifier":
            config_kwargs["classifier"] = raw
        elif key == "nu":
            config_kwargs["nu"] = _parse_float(key, raw)
        elif key == "gamma":
            config_kwargs["gamma"] = None if raw == "auto" else _parse_float(key, raw)
        elif key == "fft_factor":
            transform_kwargs["fft_factor"] = _parse_int(key, raw)
        elif key == "dct_factor":
            transform_kwargs["dct_factor"] = _parse_int(key, raw)
        elif key == "gabor_freqs":
            try:
                freqs = tuple(float(tok) for tok in raw.replace(",", " ").split())
            except ValueError:
                raise ConfigError(f"{key}: not a list of numbers: {raw!r}") from None
            gabor_kwargs["center_freqs"] = freqs
        elif key == "gabor_sigma":
            gabor_kwargs["sigma"] = _parse_float(key, raw)
        elif key == "gabor_radius":
            gabor_kwargs["support_radius"] = _parse_int(key, raw)
        elif key == "pooling":
            config_kwargs["pooling"] = raw
        elif key == "combiner":
            config_kwargs["combiner"] = raw
        elif key == "threshold_policy":
            config_kwargs["threshold_policy"] = raw
        elif key == "enroll_samples":
            config_kwargs["enroll_samples"] = _parse_int(key, raw)
        elif key == "partition_by":
            config_kwargs["partition_by"] = raw
        elif key == "model_dir":
            config_kwargs["model_dir"] = raw
        elif key == "bind":
            config_kwargs["bind"] = raw
        elif key == "static_dir":
            config_kwargs["static_dir"] = raw
        else:
            raise ConfigError(f"unknown config key {key!r}")

    try:
        gabor = GaborParams(**gabor_kwargs) if gabor_kwargs else GaborParams()
        transform = TransformConfig(gabor=gabor, **transform_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return AppConfig(transform=transform, **config_kwargs)


def load_config(path: str | Path | None) -> AppConfig:
    """AppConfig from a file path, or pure defaults when path is None."""
    if path is None:
        return AppConfig()
    return parse_config(Path(path).read_text())


def with_overrides(config: AppConfig, **kwargs) -> AppConfig:
    """Functional update helper for CLI flags layered over a file."""
    return replace(config, **{k: v for k, v in kwargs.items() if v is not None})
