"""Random convolutional kernel features with a ridge classifier.

Kernels follow the classic random-kernel recipe: lengths drawn from {7, 9, 11},
mean-centred Gaussian weights, uniform bias, exponentially sampled dilation and
optional same-padding. Each window is summarised per kernel by PPV (fraction of
positive convolution outputs) and the maximum output; a ridge regression on the
features yields stratified cross-validated predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.linear_model import RidgeClassifierCV

from .core import (
    DegenerateLabels,
    LengthMismatch,
    RngSeed,
    WidthTooSmall,
    WindowDataset,
)

DEFAULT_NUM_KERNELS = 10_000
DEFAULT_FOLDS = 5
RIDGE_ALPHAS = np.logspace(-3, 3, 7)
_CANDIDATE_LENGTHS = np.array([7, 9, 11])


@dataclass(frozen=True)
class KernelSet:
    lengths: np.ndarray
    weights: list  # one mean-centred weight vector per kernel
    biases: np.ndarray
    dilations: np.ndarray
    paddings: np.ndarray  # boolean: same-padding on/off
    channels: np.ndarray
    width: int

    def __len__(self) -> int:
        return len(self.lengths)


def generate_kernels(seed: RngSeed, count: int, width: int, channels: int) -> KernelSet:
    """Draw a deterministic kernel population for windows of the given width."""
    if width < 7:
        raise WidthTooSmall(f"window width must be >= 7 to fit kernels, got {width}")
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = seed.stream("kernels")
    lengths = rng.choice(_CANDIDATE_LENGTHS, size=count)
    weights = []
    dilations = np.empty(count, dtype=np.int64)
    for i, length in enumerate(lengths):
        w = rng.normal(0.0, 1.0, length)
        weights.append(w - w.mean())
        max_exp = np.log2((width - 1) / (length - 1))
        dilations[i] = int(2 ** rng.uniform(0.0, max_exp))
    biases = rng.uniform(-1.0, 1.0, count)
    paddings = rng.integers(0, 2, count).astype(bool)
    kernel_channels = rng.integers(0, channels, count)
    return KernelSet(
        lengths=lengths,
        weights=weights,
        biases=biases,
        dilations=dilations,
        paddings=paddings,
        channels=kernel_channels,
        width=width,
    )


def _convolve(windows_ch: np.ndarray, weights: np.ndarray, bias: float,
              dilation: int, padding: int) -> np.ndarray:
    """Dilated 1-D convolution of all windows on one channel: (m, out_len)."""
    m, width = windows_ch.shape
    if padding:
        padded = np.zeros((m, width + 2 * padding))
        padded[:, padding:padding + width] = windows_ch
    else:
        padded = windows_ch
    span = (len(weights) - 1) * dilation
    out_len = padded.shape[1] - span
    out = np.full((m, out_len), bias)
    for j, wj in enumerate(weights):
        out += wj * padded[:, j * dilation:j * dilation + out_len]
    return out


def transform(dataset: WindowDataset, kernels: KernelSet) -> np.ndarray:
    """Feature matrix of shape (m, 2K): PPV and max per kernel."""
    m = dataset.windows.shape[0]
    features = np.empty((m, 2 * len(kernels)))
    for k in range(len(kernels)):
        length = int(kernels.lengths[k])
        dilation = int(kernels.dilations[k])
        padding = ((length - 1) * dilation) // 2 if kernels.paddings[k] else 0
        windows_ch = dataset.windows[:, :, int(kernels.channels[k])]
        out = _convolve(windows_ch, kernels.weights[k], float(kernels.biases[k]),
                        dilation, padding)
        features[:, 2 * k] = (out > 0).mean(axis=1)
        features[:, 2 * k + 1] = out.max(axis=1)
    return features


@dataclass(frozen=True)
class CvPrediction:
    y_pred: np.ndarray
    fold_of: np.ndarray  # 1-based fold indices
    provisional: np.ndarray  # True for members of singleton classes


def _stratified_folds(labels: np.ndarray, folds: int, rng: np.random.Generator) -> np.ndarray:
    """Per-class shuffled round-robin fold assignment, 1-based."""
    fold_of = np.empty(len(labels), dtype=np.int64)
    next_fold = 0
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        for i in idx:
            fold_of[i] = next_fold % folds + 1
            next_fold += 1
    return fold_of


def cross_val_predict(features: np.ndarray, labels: np.ndarray,
                      folds: int = DEFAULT_FOLDS, seed: RngSeed | None = None) -> CvPrediction:
    """Stratified k-fold cross-validated ridge predictions.

    Per fold, features are standardized with training-fold statistics and a
    ridge classifier picks its regularization strength from a log-spaced grid
    by generalized cross-validation on the training fold. Classes with a
    single member never appear in a test fold's training data and their
    predictions are flagged provisional.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if features.shape[0] != len(labels):
        raise LengthMismatch("features and labels disagree in length")
    classes, counts = np.unique(labels, return_counts=True)
    if len(classes) < 2:
        raise DegenerateLabels("cross-validation needs at least two classes")
    rng = (seed or RngSeed(0)).stream("folds")
    fold_of = _stratified_folds(labels, folds, rng)
    singleton_classes = set(classes[counts < 2])
    provisional = np.isin(labels, sorted(singleton_classes))

    y_pred = np.empty(len(labels), dtype=np.int64)
    for fold in range(1, folds + 1):
        test = fold_of == fold
        if not test.any():
            continue
        train = ~test
        mu = features[train].mean(axis=0)
        sd = features[train].std(axis=0)
        sd[sd == 0.0] = 1.0
        model = RidgeClassifierCV(alphas=RIDGE_ALPHAS)
        model.fit((features[train] - mu) / sd, labels[train])
        y_pred[test] = model.predict((features[test] - mu) / sd)
    return CvPrediction(y_pred=y_pred, fold_of=fold_of, provisional=provisional)


def macro_f1(y_true, y_pred) -> float:
    """Unweighted mean F1 over the classes present in ``y_true``.

    Classes predicted but absent from ``y_true`` are ignored; a class never
    predicted scores 0.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if len(y_true) != len(y_pred):
        raise LengthMismatch(f"lengths differ: {len(y_true)} vs {len(y_pred)}")
    if len(y_true) == 0:
        raise LengthMismatch("labels must be non-empty")
    scores = []
    for cls in np.unique(y_true):
        tp = np.sum((y_true == cls) & (y_pred == cls))
        fp = np.sum((y_true != cls) & (y_pred == cls))
        fn = np.sum((y_true == cls) & (y_pred != cls))
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom > 0 else 0.0)
    return float(np.mean(scores))
