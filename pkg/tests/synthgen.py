"""Seeded synthetic series with known change points and states."""

from __future__ import annotations

import numpy as np

from tsstates.core import Segmentation, TimeSeries, validate_series

# States share mean, deviation, and range; they differ in frequency only so
# windowed summary statistics converge to the global ones at moderate widths.
STATE_PERIODS = {1: 12, 2: 24, 3: 48}


def _state_signal(state: int, length: int, rng: np.random.Generator) -> np.ndarray:
    period = STATE_PERIODS[state]
    phase = rng.uniform(0.0, 2 * np.pi) + 2 * np.pi * np.arange(length) / period
    return np.sin(phase)


def multi_state_series(seed: int, n: int = 4500, states=(1, 2, 3, 1, 2, 3, 1, 2, 3),
                       noise: float = 0.1, name: str = "synthetic"):
    """Piecewise series cycling through the given states.

    Returns (TimeSeries, Segmentation of true CPs, per-segment state labels).
    Segment lengths get a seeded +-10% jitter around n / len(states).
    """
    rng = np.random.default_rng(seed)
    k = len(states)
    base_len = n // k
    lengths = [int(base_len * rng.uniform(0.9, 1.1)) for _ in range(k - 1)]
    lengths.append(n - sum(lengths))
    parts = [
        _state_signal(s, length, rng) + rng.normal(0.0, noise, length)
        for s, length in zip(states, lengths)
    ]
    cps = tuple(np.cumsum(lengths)[:-1].tolist())
    ts = validate_series(np.concatenate(parts), name=name)
    return ts, Segmentation(cps=cps, n=n), np.array(states, dtype=np.int64)


def two_regime_series(seed: int, n: int = 4000, noise: float = 0.1):
    """One change point at a seeded position near the middle of the series."""
    return multi_state_series(seed + 10_000, n=n, states=(1, 2), noise=noise)


def true_state_sequence(segmentation: Segmentation, seg_states: np.ndarray) -> np.ndarray:
    out = np.empty(segmentation.n, dtype=np.int64)
    for (s, e), label in zip(segmentation.segments(), seg_states):
        out[s:e] = label
    return out


def write_series_csv(path, ts: TimeSeries):
    np.savetxt(path, ts.values, delimiter=",", fmt="%.9f")


def write_annotation_csv(path, segmentation: Segmentation, seg_states) -> None:
    lines = ["offset,label"]
    for (start, _), label in zip(segmentation.segments(), seg_states):
        lines.append(f"{start},{int(label)}")
    path.write_text("\n".join(lines) + "\n")
