"""Evaluation metrics: ROC-AUC by midranks, confusion-matrix rates,
regression errors, Spearman correlation, calibration curve, and ROC points.

roc_auc uses the rank (Mann-Whitney) formulation with midranks for ties; it
is exactly equal, not approximately, to the pairwise comparison count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = [
    "ClassificationMetrics", "RegressionMetrics", "CalibrationBin",
    "CalibrationReport", "roc_auc", "classification_metrics",
    "regression_metrics", "spearman", "calibration_curve", "roc_points",
]


def _midranks(v: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their group mean (exact halves)."""
    _vals, inverse, counts = np.unique(v, return_inverse=True, return_counts=True)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    mid = starts + (counts + 1) / 2.0
    return mid[inverse]


def _check_binary(labels) -> np.ndarray:
    labels = np.asarray(labels)
    uniq = set(np.unique(labels).tolist())
    if not uniq <= {0, 1}:
        raise DataError("labels must be 0 or 1")
    if len(uniq) < 2:
        raise DataError("labels contain a single class")
    return labels.astype(np.int64)


def roc_auc(scores, labels) -> float:
    """Probability a random positive outranks a random negative, ties at
    half credit. Requires both classes."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = _check_binary(labels)
    if len(scores) != len(labels):
        raise DataError("scores and labels must have equal length")
    ranks = _midranks(scores)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    rank_sum = float(np.cumsum(ranks[pos])[-1])
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


@dataclass(frozen=True)
class ClassificationMetrics:
    sensitivity: float
    specificity: float
    accuracy: float
    roc_auc: float | None
    tp: int
    fn: int
    tn: int
    fp: int

    @classmethod
    def from_counts(cls, tp: int, fn: int, tn: int, fp: int,
                    roc_auc: float | None = None) -> "ClassificationMetrics":
        if tp + fn == 0 or tn + fp == 0:
            raise DataError("labels contain a single class")
        return cls(
            sensitivity=tp / (tp + fn),
            specificity=tn / (tn + fp),
            accuracy=(tp + tn) / (tp + fn + tn + fp),
            roc_auc=roc_auc,
            tp=tp, fn=fn, tn=tn, fp=fp,
        )


def classification_metrics(scores, labels, threshold: float = 0.5) -> ClassificationMetrics:
    """Threshold rule: predict positive when score is strictly greater than
    the threshold."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = _check_binary(labels)
    if len(scores) != len(labels):
        raise DataError("scores and labels must have equal length")
    pred = scores > threshold
    pos = labels == 1
    tp = int(np.sum(pred & pos))
    fn = int(np.sum(~pred & pos))
    tn = int(np.sum(~pred & ~pos))
    fp = int(np.sum(pred & ~pos))
    return ClassificationMetrics.from_counts(tp, fn, tn, fp,
                                             roc_auc=roc_auc(scores, labels))


@dataclass(frozen=True)
class RegressionMetrics:
    mae: float
    rmse: float


def regression_metrics(y, y_pred) -> RegressionMetrics:
    y = np.asarray(y, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if len(y) != len(y_pred):
        raise DataError("targets and predictions must have equal length")
    if len(y) == 0:
        raise DataError("cannot compute regression metrics of empty input")
    diff = y_pred - y
    return RegressionMetrics(
        mae=float(np.mean(np.abs(diff))),
        rmse=float(math.sqrt(np.mean(diff * diff))),
    )


def spearman(a, b) -> float:
    """Spearman rank correlation: Pearson correlation of midranks."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) != len(b):
        raise DataError("inputs must have equal length")
    if len(a) < 3:
        raise DataError("spearman needs at least 3 observations")
    ra = _midranks(a)
    rb = _midranks(b)
    da = ra - ra.mean()
    db = rb - rb.mean()
    va = float(np.sum(da * da))
    vb = float(np.sum(db * db))
    if va == 0.0 or vb == 0.0:
        raise DataError("constant input; correlation undefined")
    return float(np.sum(da * db)) / math.sqrt(va * vb)


@dataclass(frozen=True)
class CalibrationBin:
    lo: float
    hi: float
    count: int
    mean_score: float | None
    positive_fraction: float | None


@dataclass(frozen=True)
class CalibrationReport:
    bins: tuple[CalibrationBin, ...]
    reliability_gap: float

    @property
    def total(self) -> int:
        return sum(b.count for b in self.bins)


def calibration_curve(scores, labels, bins: int = 10) -> CalibrationReport:
    """Equal-width score bins on [0, 1]; empty bins are kept with count 0.

    The reliability gap is the count-weighted mean absolute difference
    between per-bin accuracy and per-bin confidence, where confidence folds
    scores below 0.5 to 1 - score.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = _check_binary(labels)
    if len(scores) != len(labels):
        raise DataError("scores and labels must have equal length")
    if bins < 1:
        raise DataError("bins must be >= 1")
    if np.any(scores < 0.0) or np.any(scores > 1.0):
        raise DataError("scores must lie in [0, 1]")
    idx = np.minimum((scores * bins).astype(np.int64), bins - 1)
    pred_pos = scores > 0.5
    correct = pred_pos == (labels == 1)
    confidence = np.where(scores >= 0.5, scores, 1.0 - scores)
    n = len(scores)
    out = []
    gap = 0.0
    for b in range(bins):
        mask = idx == b
        count = int(mask.sum())
        lo, hi = b / bins, (b + 1) / bins
        if count == 0:
            out.append(CalibrationBin(lo=lo, hi=hi, count=0,
                                      mean_score=None, positive_fraction=None))
            continue
        mean_score = float(scores[mask].mean())
        pos_frac = float((labels[mask] == 1).mean())
        acc = float(correct[mask].mean())
        conf = float(confidence[mask].mean())
        gap += (count / n) * abs(acc - conf)
        out.append(CalibrationBin(lo=lo, hi=hi, count=count,
                                  mean_score=mean_score, positive_fraction=pos_frac))
    return CalibrationReport(bins=tuple(out), reliability_gap=gap)


def roc_points(scores, labels):
    """ROC staircase: (fpr, tpr, threshold) rows from the most permissive
    real threshold down, prefixed with (0, 0, inf)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = _check_binary(labels)
    if len(scores) != len(labels):
        raise DataError("scores and labels must have equal length")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    n_pos = int(np.sum(y == 1))
    n_neg = len(y) - n_pos
    points = [(0.0, 0.0, math.inf)]
    tp = fp = 0
    i = 0
    n = len(y)
    while i < n:
        j = i
        while j + 1 < n and s[j + 1] == s[i]:
            j += 1
        tp += int(np.sum(y[i:j + 1] == 1))
        fp += (j - i + 1) - int(np.sum(y[i:j + 1] == 1))
        points.append((fp / n_neg, tp / n_pos, float(s[i])))
        i = j + 1
    return points
