"""End-to-end state detection: dataset creation, confusion-driven label
merging with classification-gain regularization, and state-sequence emission.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifier import (
    CvPrediction,
    cross_val_predict,
    generate_kernels,
    macro_f1,
    transform,
)
from .core import (
    LabelProfile,
    LengthMismatch,
    NoWindowsLeft,
    RngSeed,
    Segmentation,
    SingleLabel,
    StateSequence,
    TimeSeries,
    UnknownLabel,
    WindowDataset,
    canonicalize_labels,
)
from .metrics import cgain
from .segmentation import (
    DEFAULT_MIN_SEG_FACTOR,
    DEFAULT_VALIDATION_THRESHOLD,
    extract_cps,
)
from .windowing import DEFAULT_THRESHOLD, suss_width

MAX_SAMPLES = 1000


@dataclass(frozen=True)
class ConfusionMatrix:
    """k x k counts; rows are true labels, columns predicted labels."""

    counts: np.ndarray
    labels: np.ndarray  # label value per row/column index


@dataclass(frozen=True)
class MergeStep:
    kept: int
    absorbed: int
    cgain_before: float
    cgain_after: float


@dataclass(frozen=True)
class ClapResult:
    profile: LabelProfile
    segmentation: Segmentation
    states: StateSequence
    num_states: int
    trace: tuple


def create_dataset(ts: TimeSeries, width: int, cps: Segmentation,
                   seed: RngSeed, max_samples: int = MAX_SAMPLES) -> WindowDataset:
    """Sliding windows labelled by segment rank.

    Stride is half the width; windows overlapping a neighbouring segment by at
    least half the width are disposed; at most ``max_samples`` windows are
    kept (uniform seeded sample, order preserved).
    """
    n = ts.n
    if n < 2 * width:
        raise NoWindowsLeft(f"need n >= {2 * width} for width {width}, got n = {n}")
    stride = max(1, width // 2)
    starts = np.arange(0, n - width + 1, stride)
    segments = cps.segments()
    bounds = np.array([s for s, _ in segments] + [n])
    ranks = np.searchsorted(bounds, starts, side="right")  # 1-based segment rank
    keep = np.ones(len(starts), dtype=bool)
    for i, (start, rank) in enumerate(zip(starts, ranks)):
        for j, (seg_start, seg_end) in enumerate(segments):
            if j == rank - 1:
                continue
            overlap = min(start + width, seg_end) - max(start, seg_start)
            if overlap >= width // 2:
                keep[i] = False
                break
    starts = starts[keep]
    labels = ranks[keep]
    if len(starts) == 0:
        raise NoWindowsLeft("every window overlaps a neighbouring segment too much")
    if len(starts) > max_samples:
        rng = seed.stream("sampling")
        sel = np.sort(rng.choice(len(starts), size=max_samples, replace=False))
        starts, labels = starts[sel], labels[sel]
    windows = np.stack([ts.values[s:s + width] for s in starts])
    return WindowDataset(windows=windows, starts=starts,
                         labels=labels.astype(np.int64), width=width)


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionMatrix:
    labels = np.unique(np.concatenate([y_true, y_pred]))
    index = {int(l): i for i, l in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        counts[index[int(t)], index[int(p)]] += 1
    return ConfusionMatrix(counts=counts, labels=labels)


def calc_confused_labels(y_true, y_pred, mode: str = "rate") -> list:
    """One (l1, l2, confusion) entry per true label, sorted by confusion.

    For each true label, confusion with a counterpart is the symmetric
    off-diagonal mass, normalized by the two labels' combined true counts in
    ``rate`` mode or taken raw in ``count`` mode. Ties break toward smaller
    label values.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if len(y_true) != len(y_pred):
        raise LengthMismatch("label vectors differ in length")
    true_labels = np.unique(y_true)
    if len(true_labels) < 2:
        raise SingleLabel("need at least two distinct labels")
    cm = confusion_matrix(y_true, y_pred)
    idx = {int(l): i for i, l in enumerate(cm.labels)}
    rowsum = cm.counts.sum(axis=1)
    entries = []
    for l1 in true_labels:
        i = idx[int(l1)]
        best = None
        for l2 in true_labels:
            if l2 == l1:
                continue
            j = idx[int(l2)]
            mass = cm.counts[i, j] + cm.counts[j, i]
            conf = mass / (rowsum[i] + rowsum[j]) if mode == "rate" else float(mass)
            if best is None or conf > best[1]:
                best = (int(l2), conf)
        entries.append((int(l1), best[0], float(best[1])))
    entries.sort(key=lambda e: (-e[2], e[0], e[1]))
    return entries


def merge_labels(y_true, y_pred, l1: int, l2: int):
    """Replace every occurrence of l2 by l1 in both vectors (copies)."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if l1 == l2:
        raise UnknownLabel("cannot merge a label with itself")
    if l1 not in y_true or l2 not in y_true:
        raise UnknownLabel(f"labels {l1}, {l2} must both be present")
    new_true = np.where(y_true == l2, l1, y_true)
    new_pred = np.where(y_pred == l2, l1, y_pred)
    return new_true, new_pred


def confused_merging(labels, y_pred, mode: str = "rate", criterion=cgain):
    """Agglomerative fusion of confused label pairs.

    Scans pairs in descending confusion, performs the first merge whose
    criterion value does not decrease, and restarts the ranking; stops when a
    full scan yields no merge. Returns canonicalized labels, the consistently
    relabelled predictions, the merge trace (recording original label values),
    and the rank-to-final-label mapping.
    """
    labels = np.asarray(labels, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    trace = []
    final_of = {int(l): int(l) for l in np.unique(labels)}
    k = len(np.unique(labels))
    if k >= 2:
        for _ in range(k - 1):
            score_before = criterion(labels, y_pred)
            merged = False
            for l1, l2, _conf in calc_confused_labels(labels, y_pred, mode=mode):
                cand_labels, cand_pred = merge_labels(labels, y_pred, l1, l2)
                score_after = criterion(cand_labels, cand_pred)
                if score_after >= score_before:
                    labels, y_pred = cand_labels, cand_pred
                    trace.append(MergeStep(kept=l1, absorbed=l2,
                                           cgain_before=float(score_before),
                                           cgain_after=float(score_after)))
                    for rank, lab in final_of.items():
                        if lab == l2:
                            final_of[rank] = l1
                    merged = True
                    break
            if not merged:
                break
    canonical = canonicalize_labels(labels)
    remap = {int(old): int(new) for old, new in zip(labels, canonical)}
    y_pred = np.array([remap.get(int(p), int(p)) for p in y_pred], dtype=np.int64)
    final_of = {rank: remap[lab] for rank, lab in final_of.items()}
    return canonical, y_pred, tuple(trace), final_of


def expand_to_state_sequence(cps: Segmentation, segment_labels, n: int) -> StateSequence:
    """Propagate one label per segment to every covered data point."""
    segment_labels = np.asarray(segment_labels, dtype=np.int64)
    if len(segment_labels) != cps.num_segments:
        raise LengthMismatch(
            f"expected {cps.num_segments} segment labels, got {len(segment_labels)}")
    if cps.n != n:
        raise LengthMismatch(f"segmentation covers {cps.n} points, series has {n}")
    states = np.empty(n, dtype=np.int64)
    for (start, end), label in zip(cps.segments(), segment_labels):
        states[start:end] = label
    return StateSequence(states=canonicalize_labels(states))


def clap(ts: TimeSeries, seed: RngSeed, *,
         num_kernels: int = 10_000,
         folds: int = 5,
         max_samples: int = MAX_SAMPLES,
         suss_threshold: float = DEFAULT_THRESHOLD,
         validation_threshold: float = DEFAULT_VALIDATION_THRESHOLD,
         min_seg_factor: int = DEFAULT_MIN_SEG_FACTOR,
         confusion_mode: str = "rate") -> ClapResult:
    """Run the full pipeline: width learning, segmentation, self-supervised
    classification, confused merging, and state-sequence emission.

    A series without detected change points short-circuits to a single-state
    result with profile score 1.0 (a one-class cross-validation is undefined).
    """
    width = suss_width(ts, threshold=suss_threshold).width
    segmentation = extract_cps(ts, width,
                               validation_threshold=validation_threshold,
                               min_seg_factor=min_seg_factor)
    if segmentation.num_segments == 1:
        states = StateSequence(states=np.ones(ts.n, dtype=np.int64))
        m = max(1, (ts.n - width) // max(1, width // 2) + 1)
        profile = LabelProfile(labels=np.ones(m, dtype=np.int64), score=1.0, width=width)
        return ClapResult(profile=profile, segmentation=segmentation,
                          states=states, num_states=1, trace=())

    dataset = create_dataset(ts, width, segmentation, seed, max_samples=max_samples)
    if len(np.unique(dataset.labels)) == 1:
        # All but one segment were disposed entirely; treat as single state.
        states = StateSequence(states=np.ones(ts.n, dtype=np.int64))
        profile = LabelProfile(labels=np.ones(len(dataset.labels), dtype=np.int64),
                               score=1.0, width=width)
        return ClapResult(profile=profile, segmentation=segmentation,
                          states=states, num_states=1, trace=())

    kernels = generate_kernels(seed, num_kernels, width, ts.d)
    features = transform(dataset, kernels)
    prediction = cross_val_predict(features, dataset.labels, folds=folds, seed=seed)
    labels, y_pred, trace, final_of = confused_merging(
        dataset.labels, prediction.y_pred, mode=confusion_mode)
    score = macro_f1(labels, y_pred)

    # Segments whose windows were all disposed keep a fresh label of their own.
    segment_labels = []
    fresh = max(final_of.values(), default=0)
    for rank in range(1, segmentation.num_segments + 1):
        if rank in final_of:
            segment_labels.append(final_of[rank])
        else:
            fresh += 1
            segment_labels.append(fresh)
    states = expand_to_state_sequence(segmentation, segment_labels, ts.n)
    profile = LabelProfile(labels=labels, score=float(score), width=width)
    return ClapResult(profile=profile, segmentation=segmentation, states=states,
                      num_states=states.num_states, trace=trace)
