"""Shared domain types, validation helpers, and the deterministic RNG scheme."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np


class TsError(Exception):
    """Base class for all library errors."""


class EmptySeries(TsError):
    pass


class NonFinite(TsError):
    pass


class SeriesTooShort(TsError):
    pass


class WidthTooSmall(TsError):
    pass


class DegenerateLabels(TsError):
    pass


class SingleLabel(TsError):
    pass


class UnknownLabel(TsError):
    pass


class LengthMismatch(TsError):
    pass


class NoWindowsLeft(TsError):
    pass


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    return zlib.crc32(str(tag).encode("utf-8"))


@dataclass(frozen=True)
class RngSeed:
    """Root seed of a run.

    Every consumer of randomness derives its own independent stream via
    :meth:`stream`, keyed by a stable purpose tag, so that the order in which
    components execute (or whether they run in parallel) cannot change results.
    """

    seed: int

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def stream(self, *tags) -> np.random.Generator:
        """Return a generator for the sub-stream identified by ``tags``."""
        key = tuple(_tag_to_int(t) for t in tags)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))


@dataclass(frozen=True)
class TimeSeries:
    """An n x d matrix of equi-distant observations.

    Rows are time steps, columns are channels. Values are finite float64.
    """

    values: np.ndarray
    name: str = "series"

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def validate_series(raw, name: str = "series") -> TimeSeries:
    """Validate and wrap a raw matrix as a :class:`TimeSeries`.

    Accepts any array-like of shape (n,) or (n, d). The input is copied, never
    mutated. Raises :class:`EmptySeries` for fewer than two rows and
    :class:`NonFinite` (reporting row/column) for NaN or infinite entries.
    """
    values = np.array(raw, dtype=np.float64, copy=True)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2 or values.shape[1] < 1:
        raise EmptySeries(f"{name}: expected an n x d matrix, got shape {values.shape}")
    if values.shape[0] < 2:
        raise EmptySeries(f"{name}: need at least 2 rows, got {values.shape[0]}")
    bad = ~np.isfinite(values)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise NonFinite(f"{name}: non-finite value at row {row}, column {col}")
    values.setflags(write=False)
    return TimeSeries(values=values, name=name)


@dataclass(frozen=True)
class Segmentation:
    """Sorted interior change-point offsets partitioning a series of length n."""

    cps: tuple
    n: int

    def __post_init__(self):
        cps = tuple(int(c) for c in self.cps)
        object.__setattr__(self, "cps", cps)
        if self.n < 1:
            raise ValueError("n must be positive")
        if any(not 1 <= c <= self.n - 1 for c in cps):
            raise ValueError(f"change points must lie in [1, {self.n - 1}]: {cps}")
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError(f"change points must be strictly increasing: {cps}")

    @property
    def num_segments(self) -> int:
        return len(self.cps) + 1

    def segments(self) -> list:
        """Half-open [start, end) integer intervals covering [0, n)."""
        bounds = (0,) + self.cps + (self.n,)
        return [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]


@dataclass(frozen=True)
class WindowDataset:
    """Labelled sliding windows used as the self-supervised training set.

    ``windows`` has shape (m, w, d); ``labels`` are 1-based segment ranks.
    """

    windows: np.ndarray
    starts: np.ndarray
    labels: np.ndarray
    width: int


@dataclass(frozen=True)
class LabelProfile:
    """Final per-window labels together with their cross-validation macro F1."""

    labels: np.ndarray
    score: float
    width: int


@dataclass(frozen=True)
class StateSequence:
    """One state label per data point of the source series."""

    states: np.ndarray

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def num_states(self) -> int:
        return len(np.unique(self.states))


def canonicalize_labels(labels) -> np.ndarray:
    """Relabel to {1, ..., k} preserving first-occurrence order. Idempotent."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("labels must be non-empty")
    out = np.empty(len(labels), dtype=np.int64)
    mapping = {}
    for i, l in enumerate(labels):
        l = int(l)
        if l not in mapping:
            mapping[l] = len(mapping) + 1
        out[i] = mapping[l]
    return out
