"""Window-width learning by matching windowed summary statistics to global ones.

For each channel we search for the smallest width whose sliding-window summary
statistics (mean, standard deviation, min-max range, each averaged over all
windows) approximate the whole-channel statistics within a tolerance. The
multivariate width is the rounded mean of the per-channel widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import SeriesTooShort, TimeSeries

LOWER_BOUND = 10
DEFAULT_THRESHOLD = 0.05


@dataclass(frozen=True)
class WidthEstimate:
    width: int
    per_channel: tuple


def _stat_distance(z: np.ndarray, width: int, global_triple, global_range: float) -> float:
    """Distance between window-averaged stats of ``z`` and the global triple.

    Normalized by the global range and by sqrt(width): extreme-value statistics
    (the min-max range) converge only logarithmically under observation noise,
    so the acceptable residual must shrink with the window's own convergence
    rate or noisy channels would drive the width toward n/2.
    """
    view = sliding_window_view(z, width)
    means = view.mean(axis=1)
    stds = view.std(axis=1)
    ranges = view.max(axis=1) - view.min(axis=1)
    triple = np.array([means.mean(), stds.mean(), ranges.mean()])
    return float(np.linalg.norm(triple - global_triple) / (global_range * np.sqrt(width)))


def _channel_width(x: np.ndarray, threshold: float, lower: int, upper: int) -> int:
    sigma = x.std()
    if sigma == 0.0:
        return lower
    z = (x - x.mean()) / sigma
    global_range = float(z.max() - z.min())
    triple = np.array([z.mean(), z.std(), global_range])

    def accepted(w: int) -> bool:
        return _stat_distance(z, w, triple, global_range) <= threshold

    if accepted(lower):
        return lower
    # Doubling to find the first accepted width, then bisection on (lo, hi].
    lo, hi = lower, lower
    while hi < upper:
        hi = min(hi * 2, upper)
        if accepted(hi):
            break
        lo = hi
    else:
        return upper
    if not accepted(hi):
        return upper
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if accepted(mid):
            hi = mid
        else:
            lo = mid
    return hi


def suss_width(ts: TimeSeries, threshold: float = DEFAULT_THRESHOLD,
               lower_bound: int = LOWER_BOUND) -> WidthEstimate:
    """Learn the subsequence width of ``ts``.

    Searches per channel by doubling followed by bisection over
    [lower_bound, n // 2]; the multivariate result is the arithmetic mean of
    the channel widths, rounded half-up.
    """
    if ts.n < 2 * lower_bound:
        raise SeriesTooShort(f"need n >= {2 * lower_bound}, got n = {ts.n}")
    upper = ts.n // 2
    widths = tuple(
        _channel_width(np.ascontiguousarray(ts.values[:, ch]), threshold, lower_bound, upper)
        for ch in range(ts.d)
    )
    width = math.floor(sum(widths) / len(widths) + 0.5)
    return WidthEstimate(width=width, per_channel=widths)
