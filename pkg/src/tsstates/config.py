"""Run configuration: defaults, config-file parsing, and flag overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .core import TsError


class ConfigError(TsError):
    pass


@dataclass
class RunConfig:
    seed: int = 1
    kernel_count: int = 10_000
    folds: int = 5
    max_samples: int = 1000
    suss_threshold: float = 0.05
    clasp_k: int = 3
    validation_threshold: float = 0.6
    min_seg_factor: int = 5
    confusion_mode: str = "rate"
    output_format: str = "json"

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.kernel_count < 1:
            raise ConfigError("kernel_count must be >= 1")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.max_samples < 1:
            raise ConfigError("max_samples must be >= 1")
        if not 0.0 < self.suss_threshold < 1.0:
            raise ConfigError("suss_threshold must be in (0, 1)")
        if not 0.0 < self.validation_threshold <= 1.0:
            raise ConfigError("validation_threshold must be in (0, 1]")
        if self.min_seg_factor < 1:
            raise ConfigError("min_seg_factor must be >= 1")
        if self.confusion_mode not in ("rate", "count"):
            raise ConfigError("confusion_mode must be 'rate' or 'count'")
        if self.output_format not in ("json", "csv"):
            raise ConfigError("output_format must be 'json' or 'csv'")


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Build a RunConfig: defaults, then config-file keys, then flag overrides."""
    values: dict = {}
    types = {f.name: f.type for f in fields(RunConfig)}
    casts = {"int": int, "float": float, "str": str}
    if path is not None:
        for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {i}: expected key=value")
            key, _, raw = line.partition("=")
            key, raw = key.strip(), raw.strip()
            if key not in types:
                raise ConfigError(f"{path}: line {i}: unknown key {key!r}")
            try:
                values[key] = casts[types[key]](raw)
            except ValueError:
                raise ConfigError(f"{path}: line {i}: bad value for {key}") from None
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                values[key] = value
    return RunConfig(**values)
