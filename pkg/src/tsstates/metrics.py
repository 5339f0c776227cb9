"""Scores: random F1, classification gain, segment covering, and adjusted MI."""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log

import numpy as np

from .core import LengthMismatch, Segmentation, StateSequence
from .classifier import macro_f1


@dataclass(frozen=True)
class ScoreReport:
    name: str
    covering: float
    ami: float
    num_states_pred: int
    num_states_true: int


def f1_rand(y_true) -> float:
    """Expected macro F1 of a chance classification with ``y_true``'s priors.

    Per class, the expected true positives, false negatives, and false
    positives follow from the class's likelihood of occurrence; the result is
    the macro average of the induced per-class F1 values.
    """
    y_true = np.asarray(y_true)
    if len(y_true) == 0:
        raise LengthMismatch("labels must be non-empty")
    n = len(y_true)
    scores = []
    for cls in np.unique(y_true):
        n_l = np.sum(y_true == cls)
        p_l = n_l / n
        tp = n_l * p_l
        fn = n_l * (1.0 - p_l)
        fp = (n - n_l) * p_l
        scores.append(2.0 * tp / (2.0 * tp + fn + fp))
    return float(np.mean(scores))


def cgain(y_true, y_pred) -> float:
    """Improvement of the classification's macro F1 over its random expectation."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"lengths differ: {len(y_true)} vs {len(y_pred)}")
    return macro_f1(y_true, y_pred) - f1_rand(y_true)


def covering(true_segs: Segmentation, pred_segs: Segmentation) -> float:
    """Weighted best Jaccard overlap of true segments with predicted ones.

    Segments are half-open integer intervals including the virtual boundary
    change points at 0 and n. Labels are ignored entirely.
    """
    if true_segs.n != pred_segs.n:
        raise LengthMismatch(f"series lengths differ: {true_segs.n} vs {pred_segs.n}")
    n = true_segs.n
    total = 0.0
    for s, e in true_segs.segments():
        best = 0.0
        for s2, e2 in pred_segs.segments():
            inter = max(0, min(e, e2) - max(s, s2))
            union = max(e, e2) - min(s, s2)
            best = max(best, inter / union)
        total += (e - s) / n * best
    return total


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def _mutual_information(table: np.ndarray) -> float:
    n = table.sum()
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    mi = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            nij = table[i, j]
            if nij > 0:
                mi += nij / n * log(n * nij / (a[i] * b[j]))
    return mi


def expected_mutual_information(table: np.ndarray) -> float:
    """Exact expectation of MI under the fixed-marginals permutation model."""
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    n = int(table.sum())
    emi = 0.0
    for ai in a:
        ai = int(ai)
        for bj in b:
            bj = int(bj)
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            for nij in range(lo, hi + 1):
                # Hypergeometric probability of the cell count nij.
                log_p = (
                    lgamma(ai + 1) - lgamma(nij + 1) - lgamma(ai - nij + 1)
                    + lgamma(n - ai + 1) - lgamma(bj - nij + 1)
                    - lgamma(n - ai - bj + nij + 1)
                    - (lgamma(n + 1) - lgamma(bj + 1) - lgamma(n - bj + 1))
                )
                emi += np.exp(log_p) * nij / n * log(n * nij / (ai * bj))
    return emi


def _contingency(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xs, xi = np.unique(x, return_inverse=True)
    ys, yi = np.unique(y, return_inverse=True)
    table = np.zeros((len(xs), len(ys)), dtype=np.int64)
    np.add.at(table, (xi, yi), 1)
    return table


def ami(states_true: StateSequence, states_pred: StateSequence) -> float:
    """Adjusted mutual information with average-entropy normalization.

    Natural logarithm throughout. When both labelings consist of a single
    cluster the score is defined as 1.0: agreement on the absence of structure
    counts as agreement.
    """
    x = np.asarray(states_true.states)
    y = np.asarray(states_pred.states)
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    table = _contingency(x, y)
    if table.shape == (1, 1):
        return 1.0
    nonzero = table > 0
    if (
        table.shape[0] == table.shape[1]
        and (nonzero.sum(axis=0) == 1).all()
        and (nonzero.sum(axis=1) == 1).all()
    ):
        return 1.0  # identical up to relabelling
    n = len(x)
    mi = _mutual_information(table)
    emi = expected_mutual_information(table)
    h_avg = (_entropy(table.sum(axis=1), n) + _entropy(table.sum(axis=0), n)) / 2.0
    denom = h_avg - emi
    if abs(denom) < 1e-15:
        return 1.0 if abs(mi - emi) < 1e-15 else 0.0
    return (mi - emi) / denom
