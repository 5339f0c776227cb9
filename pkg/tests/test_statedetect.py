import numpy as np
import pytest

from tsstates.core import (
    LengthMismatch,
    NoWindowsLeft,
    RngSeed,
    Segmentation,
    SingleLabel,
    UnknownLabel,
    validate_series,
)
from tsstates.metrics import cgain
from tsstates.statedetect import (
    calc_confused_labels,
    confused_merging,
    confusion_matrix,
    create_dataset,
    expand_to_state_sequence,
    merge_labels,
)


def _oracle_windows(n, width, cps):
    """Brute-force window selection: stride w//2, rank by containing segment,
    dropped when overlapping any single other segment by at least w//2."""
    bounds = [0] + list(cps) + [n]
    segments = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    out = []
    for start in range(0, n - width + 1, max(1, width // 2)):
        rank = next(i + 1 for i, (s, e) in enumerate(segments) if s <= start < e)
        drop = False
        for j, (s, e) in enumerate(segments):
            if j == rank - 1:
                continue
            if min(start + width, e) - max(start, s) >= width // 2:
                drop = True
        if not drop:
            out.append((start, rank))
    return out


class TestCreateDataset:
    @pytest.mark.parametrize("n,width,cps", [
        (100, 10, (50,)),
        (200, 14, (47, 120)),
        (150, 9, (30, 75, 110)),
        (80, 20, ()),
    ])
    def test_matches_brute_force_oracle(self, n, width, cps):
        ts = validate_series(np.sin(np.arange(n) / 3.0))
        ds = create_dataset(ts, width, Segmentation(cps=cps, n=n), RngSeed(0),
                            max_samples=10_000)
        expected = _oracle_windows(n, width, cps)
        assert list(zip(ds.starts.tolist(), ds.labels.tolist())) == expected
        assert ds.windows.shape == (len(expected), width, 1)

    def test_single_segment_single_label(self):
        ts = validate_series(np.arange(60, dtype=float))
        ds = create_dataset(ts, 10, Segmentation(cps=(), n=60), RngSeed(0))
        assert set(ds.labels) == {1}

    def test_windows_copy_series_values(self):
        ts = validate_series(np.arange(100, dtype=float))
        ds = create_dataset(ts, 10, Segmentation(cps=(50,), n=100), RngSeed(0))
        for start, win in zip(ds.starts, ds.windows):
            assert np.array_equal(win[:, 0], np.arange(start, start + 10))

    def test_sample_cap_is_respected_and_seeded(self):
        ts = validate_series(np.sin(np.arange(3000) / 5.0))
        seg = Segmentation(cps=(1500,), n=3000)
        d1 = create_dataset(ts, 10, seg, RngSeed(3), max_samples=100)
        d2 = create_dataset(ts, 10, seg, RngSeed(3), max_samples=100)
        assert len(d1.starts) == 100
        assert np.array_equal(d1.starts, d2.starts)
        assert np.array_equal(np.sort(d1.starts), d1.starts)
        d3 = create_dataset(ts, 10, seg, RngSeed(4), max_samples=100)
        assert not np.array_equal(d1.starts, d3.starts)

    def test_too_short_series(self):
        ts = validate_series(np.arange(15, dtype=float))
        with pytest.raises(NoWindowsLeft):
            create_dataset(ts, 10, Segmentation(cps=(), n=15), RngSeed(0))


class TestConfusionMatrix:
    def test_counts(self):
        cm = confusion_matrix(np.array([1, 1, 2, 2]), np.array([1, 2, 2, 2]))
        assert cm.labels.tolist() == [1, 2]
        assert cm.counts.tolist() == [[1, 1], [0, 2]]


class TestCalcConfusedLabels:
    def test_hand_case_rate(self):
        y_true = np.array([1, 1, 2, 2, 3, 3])
        y_pred = np.array([3, 3, 2, 2, 1, 1])
        entries = calc_confused_labels(y_true, y_pred)
        assert entries == [(1, 3, 1.0), (3, 1, 1.0), (2, 1, 0.0)]

    def test_hand_case_count(self):
        y_true = np.array([1, 1, 2, 2, 3, 3])
        y_pred = np.array([3, 3, 2, 2, 1, 1])
        entries = calc_confused_labels(y_true, y_pred, mode="count")
        assert entries == [(1, 3, 4.0), (3, 1, 4.0), (2, 1, 0.0)]

    def test_partial_confusion_rate(self):
        y_true = np.array([1, 1, 1, 1, 3, 3])
        y_pred = np.array([1, 1, 1, 3, 3, 3])
        entries = calc_confused_labels(y_true, y_pred)
        assert entries[0] == (1, 3, pytest.approx(1 / 6))

    def test_single_label_rejected(self):
        with pytest.raises(SingleLabel):
            calc_confused_labels(np.array([1, 1]), np.array([1, 1]))


class TestMergeLabels:
    def test_merges_both_vectors(self):
        yt, yp = merge_labels([1, 2, 2, 3], [2, 2, 1, 3], 1, 2)
        assert yt.tolist() == [1, 1, 1, 3]
        assert yp.tolist() == [1, 1, 1, 3]

    def test_self_merge_rejected(self):
        with pytest.raises(UnknownLabel):
            merge_labels([1, 2], [1, 2], 1, 1)

    def test_absent_label_rejected(self):
        with pytest.raises(UnknownLabel):
            merge_labels([1, 2], [1, 2], 1, 5)


class TestConfusedMerging:
    def _confused_pair(self, seed=0):
        # Labels 1 and 2 are heavily confused, label 3 is clean.
        rng = np.random.default_rng(seed)
        y_true = np.repeat([1, 2, 3], 40)
        y_pred = y_true.copy()
        flip = rng.random(120) < 0.45
        swap = {1: 2, 2: 1}
        for i in np.flatnonzero(flip):
            y_pred[i] = swap.get(y_true[i], y_true[i])
        return y_true, y_pred

    def test_merges_confused_pair_only(self):
        y_true, y_pred = self._confused_pair()
        labels, preds, trace, final_of = confused_merging(y_true, y_pred)
        assert len(np.unique(labels)) == 2
        assert len(trace) == 1
        assert trace[0].kept == 1 and trace[0].absorbed == 2
        assert final_of[1] == final_of[2] != final_of[3]

    def test_trace_is_monotone(self):
        y_true, y_pred = self._confused_pair()
        _, _, trace, _ = confused_merging(y_true, y_pred)
        for step in trace:
            assert step.cgain_after >= step.cgain_before

    def test_stopping_is_idempotent(self):
        y_true, y_pred = self._confused_pair()
        labels, preds, _, _ = confused_merging(y_true, y_pred)
        labels2, preds2, trace2, _ = confused_merging(labels, preds)
        assert len(trace2) == 0
        assert np.array_equal(labels, labels2)
        assert np.array_equal(preds, preds2)

    def test_output_is_canonical(self):
        y_true, y_pred = self._confused_pair()
        labels, _, _, _ = confused_merging(y_true, y_pred)
        assert np.unique(labels).tolist() == [1, 2]

    def test_label_value_permutation_preserves_grouping(self):
        y_true, y_pred = self._confused_pair()
        perm = {1: 12, 2: 31, 3: 7}
        yt2 = np.array([perm[v] for v in y_true])
        yp2 = np.array([perm[v] for v in y_pred])
        a, _, _, _ = confused_merging(y_true, y_pred)
        b, _, _, _ = confused_merging(yt2, yp2)
        for i in range(len(a)):
            for j in range(i + 1, len(a)):
                assert (a[i] == a[j]) == (b[i] == b[j])

    def test_criterion_hook_is_used(self):
        y_true, y_pred = self._confused_pair()
        labels, _, _, _ = confused_merging(y_true, y_pred,
                                           criterion=lambda yt, yp: 0.0)
        # A constant criterion never decreases, so everything collapses.
        assert len(np.unique(labels)) == 1

    def test_perfect_predictions_merge_nothing(self):
        y = np.repeat([1, 2, 3], 30)
        labels, _, trace, _ = confused_merging(y, y.copy())
        assert len(trace) == 0
        assert len(np.unique(labels)) == 3


class TestExpandToStateSequence:
    def test_expansion(self):
        seg = Segmentation(cps=(3, 7), n=10)
        sq = expand_to_state_sequence(seg, [4, 9, 4], 10)
        assert sq.states.tolist() == [1, 1, 1, 2, 2, 2, 2, 1, 1, 1]

    def test_wrong_label_count(self):
        with pytest.raises(LengthMismatch):
            expand_to_state_sequence(Segmentation(cps=(5,), n=10), [1], 10)

    def test_wrong_length(self):
        with pytest.raises(LengthMismatch):
            expand_to_state_sequence(Segmentation(cps=(5,), n=10), [1, 2], 12)
