import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexiscreen import DataError, metrics


def pairwise_auc(scores, labels):
    """O(P*N) counting oracle: ties get half credit."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


# ------------------------------------------------------------------ AUC


def test_auc_textbook_example():
    scores = [0.1, 0.4, 0.35, 0.8]
    labels = [0, 0, 1, 1]
    assert metrics.roc_auc(scores, labels) == pytest.approx(0.75, abs=1e-12)


def test_auc_perfect_and_inverted():
    assert metrics.roc_auc([0.1, 0.9], [0, 1]) == 1.0
    assert metrics.roc_auc([0.9, 0.1], [0, 1]) == 0.0


def test_auc_all_tied_is_half():
    assert metrics.roc_auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5


def test_auc_matches_pairwise_oracle_exactly():
    rng = np.random.default_rng(12)
    for _ in range(300):
        n = int(rng.integers(2, 40))
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        # quantized scores force plenty of ties
        scores = np.round(rng.random(n), 1)
        assert metrics.roc_auc(scores, labels) == pairwise_auc(scores, labels)


def test_auc_requires_both_classes():
    with pytest.raises(DataError, match="single class"):
        metrics.roc_auc([0.1, 0.2], [1, 1])


def test_auc_rejects_bad_labels():
    with pytest.raises(DataError):
        metrics.roc_auc([0.1, 0.2], [1, 2])


# --------------------------------------------------------- classification


def test_confusion_bundle_frozen_values():
    m = metrics.ClassificationMetrics.from_counts(tp=25, fn=11, tn=30, fp=5)
    assert m.sensitivity == pytest.approx(0.694, abs=1e-3)
    assert m.specificity == pytest.approx(0.857, abs=1e-3)
    assert m.accuracy == pytest.approx(0.775, abs=1e-3)
    assert m.roc_auc is None


def test_classification_metrics_strict_threshold():
    m = metrics.classification_metrics([0.5, 0.51], [0, 1], threshold=0.5)
    # score exactly at the threshold predicts negative
    assert (m.tp, m.fn, m.tn, m.fp) == (1, 0, 1, 0)
    assert m.accuracy == 1.0


def test_classification_metrics_carries_auc():
    m = metrics.classification_metrics([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
    assert m.roc_auc == pytest.approx(0.75)


# ------------------------------------------------------------- regression


def test_regression_frozen_values():
    y = np.array([10.0, 10.0, 10.0, 10.0])
    pred = np.array([12.0, 14.0, 8.0, 6.0])  # |e| = 2,4,2,4
    m = metrics.regression_metrics(y, pred)
    assert m.mae == pytest.approx(3.0, abs=1e-12)
    assert m.rmse == pytest.approx(3.1623, abs=1e-3)
    assert m.rmse == pytest.approx(math.sqrt(10.0), abs=1e-12)


def test_regression_zero_error():
    m = metrics.regression_metrics([1.0, 2.0], [1.0, 2.0])
    assert m.mae == 0.0 and m.rmse == 0.0


def test_regression_empty_rejected():
    with pytest.raises(DataError, match="empty"):
        metrics.regression_metrics([], [])


# --------------------------------------------------------------- spearman


def test_spearman_frozen_example():
    # one adjacent swap in four items: rho = 1 - 6*2/(4*15) = 0.8
    assert metrics.spearman([1, 2, 3, 4], [2, 1, 3, 4]) == pytest.approx(0.8, abs=1e-12)


def test_spearman_monotone_and_reversed():
    assert metrics.spearman([1, 5, 9], [2, 40, 41]) == pytest.approx(1.0)
    assert metrics.spearman([1, 5, 9], [9, 5, 1]) == pytest.approx(-1.0)


def test_spearman_handles_ties_via_midranks():
    rho = metrics.spearman([1, 2, 2, 3], [1, 2, 3, 4])
    assert -1.0 <= rho < 1.0  # tie degrades perfect correlation


def test_spearman_errors():
    with pytest.raises(DataError, match="at least 3"):
        metrics.spearman([1, 2], [3, 4])
    with pytest.raises(DataError, match="constant input; correlation undefined"):
        metrics.spearman([1, 1, 1], [1, 2, 3])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(min_value=-1000, max_value=1000),
                min_size=3, max_size=20, unique=True))
def test_spearman_invariant_to_monotone_transform(xs):
    ys = [x * 3 + 7 for x in xs]
    assert metrics.spearman(xs, ys) == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------------------ calibration


def test_calibration_bin_assignment():
    scores = [0.05, 0.15, 0.95, 1.0]  # 1.0 folds into the top bin
    labels = [0, 0, 1, 1]
    rep = metrics.calibration_curve(scores, labels, bins=10)
    counts = [b.count for b in rep.bins]
    assert counts == [1, 1, 0, 0, 0, 0, 0, 0, 0, 2]
    assert rep.total == 4
    empty = rep.bins[3]
    assert empty.mean_score is None and empty.positive_fraction is None
    assert rep.bins[9].positive_fraction == 1.0


def test_calibration_gap_perfectly_calibrated_halves():
    # scores 0.3 with 30% positives: accuracy 0.7, confidence 0.7, gap 0
    scores = [0.3] * 10
    labels = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0]
    rep = metrics.calibration_curve(scores, labels, bins=10)
    assert rep.reliability_gap == pytest.approx(0.0, abs=1e-12)


def test_calibration_gap_overconfident():
    # all scores 0.9 but only half are positive: |acc - conf| = 0.4
    scores = [0.9] * 10
    labels = [1, 0] * 5
    rep = metrics.calibration_curve(scores, labels, bins=10)
    assert rep.reliability_gap == pytest.approx(0.4, abs=1e-12)


def test_calibration_range_checked():
    with pytest.raises(DataError, match=r"\[0, 1\]"):
        metrics.calibration_curve([1.2, 0.3], [1, 0])


def test_calibration_counts_sum_to_n():
    rng = np.random.default_rng(9)
    scores = rng.random(500)
    labels = (rng.random(500) < scores).astype(int)
    rep = metrics.calibration_curve(scores, labels, bins=10)
    assert rep.total == 500
    assert len(rep.bins) == 10


# ------------------------------------------------------------- roc points


def test_roc_points_staircase():
    pts = metrics.roc_points([0.9, 0.8, 0.7, 0.6], [1, 1, 0, 0])
    assert pts[0] == (0.0, 0.0, math.inf)
    assert pts[1] == (0.0, 0.5, 0.9)
    assert pts[2] == (0.0, 1.0, 0.8)
    assert pts[-1] == (1.0, 1.0, 0.6)


def test_roc_points_tie_groups_step_together():
    pts = metrics.roc_points([0.5, 0.5, 0.2], [1, 0, 0])
    # the two tied scores advance tp and fp in one step
    assert pts[1] == (0.5, 1.0, 0.5)
    assert len(pts) == 3


def test_roc_points_area_matches_auc():
    rng = np.random.default_rng(4)
    scores = np.round(rng.random(60), 2)
    labels = rng.integers(0, 2, 60)
    labels[0], labels[1] = 0, 1
    pts = metrics.roc_points(scores, labels)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    area = np.trapezoid(ys, xs)
    assert area == pytest.approx(metrics.roc_auc(scores, labels), abs=1e-12)
