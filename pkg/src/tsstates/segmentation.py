"""Self-supervised segmentation via a classification score profile.

Every split offset is scored by how well a leave-one-out 3-nearest-neighbour
classifier separates the windows left and right of it; change points are
extracted by recursive binary splitting while the best split beats a
validation threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import Segmentation, SeriesTooShort, TimeSeries

DEFAULT_KNN = 3
DEFAULT_VALIDATION_THRESHOLD = 0.6
DEFAULT_MIN_SEG_FACTOR = 5
_BLOCK = 512


def _znorm_windows(values: np.ndarray, width: int):
    """Per channel: z-normalized sliding windows and their squared norms."""
    windows, sqnorms = [], []
    for ch in range(values.shape[1]):
        view = sliding_window_view(np.ascontiguousarray(values[:, ch]), width)
        mean = view.mean(axis=1, keepdims=True)
        std = view.std(axis=1, keepdims=True)
        z = np.where(std > 0.0, (view - mean) / np.where(std > 0.0, std, 1.0), 0.0)
        windows.append(z)
        sqnorms.append(np.einsum("ij,ij->i", z, z))
    return windows, sqnorms


def _top3(row: np.ndarray) -> np.ndarray:
    """Indices of the 3 smallest entries, ties broken by lower index."""
    third = np.partition(row, 2)[2]
    cand = np.flatnonzero(row <= third)
    if len(cand) > 3:
        cand = cand[np.lexsort((cand, row[cand]))][:3]
    else:
        cand = cand[np.lexsort((cand, row[cand]))]
    return cand


def _knn_indices(windows, sqnorms, width: int, k: int = DEFAULT_KNN) -> np.ndarray:
    """(m, k) nearest-neighbour indices with a self-match exclusion zone of w."""
    m = windows[0].shape[0]
    nn = np.empty((m, k), dtype=np.int64)
    for lo in range(0, m, _BLOCK):
        hi = min(lo + _BLOCK, m)
        dist = np.zeros((hi - lo, m))
        for z, sq in zip(windows, sqnorms):
            sq_block = sq[lo:hi, None] + sq[None, :] - 2.0 * (z[lo:hi] @ z.T)
            np.maximum(sq_block, 0.0, out=sq_block)
            dist += np.sqrt(sq_block)
        for r in range(hi - lo):
            i = lo + r
            row = dist[r]
            row[max(0, i - width + 1):i + width] = np.inf
            nn[i] = _top3(row)
    return nn


def _binary_macro_f1(n11: int, t1: int, p1: int, m: int) -> float:
    n10 = t1 - n11
    n01 = p1 - n11
    n00 = m - t1 - p1 + n11
    denom1 = 2 * n11 + n10 + n01
    denom0 = 2 * n00 + n10 + n01
    f1 = 2 * n11 / denom1 if denom1 > 0 else 0.0
    f0 = 2 * n00 / denom0 if denom0 > 0 else 0.0
    return (f0 + f1) / 2.0


def _profile_from_medians(medians: np.ndarray, valid_lo: int, valid_hi: int) -> np.ndarray:
    """Macro-F1 sweep over split offsets given per-window median neighbour offsets.

    A window's LOO prediction at split i is class 1 iff at least two of its
    three neighbours start at offset >= i, i.e. iff its median neighbour does.
    """
    m = len(medians)
    scores = np.full(m, np.nan)
    # Counts at split i: t1 = #{j >= i}, p1 = #{median_j >= i}, n11 = both.
    at_value = [[] for _ in range(m)]
    for j, b in enumerate(medians):
        at_value[b].append(j)
    t1, p1 = m, m
    n11 = m
    for i in range(m):
        if valid_lo <= i <= valid_hi:
            scores[i] = _binary_macro_f1(n11, t1, p1, m)
        # Advance split to i + 1.
        t1 -= 1
        if medians[i] >= i:
            n11 -= 1
        for j in at_value[i]:
            p1 -= 1
            if j >= i + 1:
                n11 -= 1
    return scores


@dataclass(frozen=True)
class ClaspProfile:
    """Per-offset split scores; invalid offsets are NaN, never fake scores."""

    scores: np.ndarray
    width: int

    @property
    def valid(self) -> np.ndarray:
        return ~np.isnan(self.scores)


def clasp_profile(ts: TimeSeries, width: int, min_side: int | None = None) -> ClaspProfile:
    """Score every split offset of ``ts`` by self-supervised binary kNN quality.

    Offsets whose left or right side would be shorter than ``min_side``
    (default: ``width``) are marked invalid.
    """
    return ClaspProfile(
        scores=_profile_scores(ts.values, width, min_side), width=width
    )


def _profile_scores(values: np.ndarray, width: int, min_side: int | None = None) -> np.ndarray:
    n = values.shape[0]
    if n < 5 * width:
        raise SeriesTooShort(f"need n >= {5 * width} for width {width}, got n = {n}")
    if min_side is None:
        min_side = width
    windows, sqnorms = _znorm_windows(values, width)
    nn = _knn_indices(windows, sqnorms, width)
    medians = np.sort(nn, axis=1)[:, 1]
    m = windows[0].shape[0]
    valid_lo, valid_hi = min_side, n - min_side
    return _profile_from_medians(medians, valid_lo, min(valid_hi, m - 1))


def extract_cps(ts: TimeSeries, width: int,
                validation_threshold: float = DEFAULT_VALIDATION_THRESHOLD,
                min_seg_factor: int = DEFAULT_MIN_SEG_FACTOR) -> Segmentation:
    """Extract change points by recursive binary splitting.

    A split is accepted when its profile score reaches the validation
    threshold and both sides keep at least ``min_seg_factor * width`` points.
    """
    min_side = min_seg_factor * width
    cps: list = []

    def recurse(start: int, end: int):
        if end - start < max(2 * min_side, 5 * width):
            return
        scores = _profile_scores(ts.values[start:end], width, min_side)
        if np.all(np.isnan(scores)):
            return
        best = int(np.nanargmax(scores))
        if scores[best] < validation_threshold:
            return
        cps.append(start + best)
        recurse(start, start + best)
        recurse(start + best, end)

    recurse(0, ts.n)
    return Segmentation(cps=tuple(sorted(cps)), n=ts.n)
