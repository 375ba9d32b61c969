"""Risk stratification: Green/Amber/Red banding of classifier scores,
selective metrics over the non-Amber bands, and grid search for the band
boundaries maximizing Youden's J.

Band semantics: Green is [0, green_upper], Amber is (green_upper,
amber_upper], Red is (amber_upper, 1]. Selective metrics treat Red as the
positive prediction and Green as the negative one; Amber cases are referred
onward and excluded, with the exclusion rate reported as coverage.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import assign_folds, severity_group
from .errors import DataError, UsageError
from .metrics import ClassificationMetrics, classification_metrics

__all__ = [
    "RiskBand", "RiskThresholds", "SelectiveReport", "ThresholdCandidate",
    "band_of", "bands_of", "youden_j", "selective_metrics",
    "search_thresholds", "search_thresholds_cv", "risk_by_severity",
]


class RiskBand(enum.Enum):
    GREEN = "Green"
    AMBER = "Amber"
    RED = "Red"


@dataclass(frozen=True)
class RiskThresholds:
    green_upper: float
    amber_upper: float

    def __post_init__(self):
        if not 0.0 < self.green_upper < self.amber_upper < 1.0:
            raise UsageError(
                "thresholds must satisfy 0 < green_upper < amber_upper < 1, got "
                f"({self.green_upper}, {self.amber_upper})"
            )


def band_of(score: float, thresholds: RiskThresholds) -> RiskBand:
    """Band a single score. Boundary scores belong to the lower band."""
    if not 0.0 <= score <= 1.0:
        raise DataError(f"score {score} outside [0, 1]")
    if score <= thresholds.green_upper:
        return RiskBand.GREEN
    if score <= thresholds.amber_upper:
        return RiskBand.AMBER
    return RiskBand.RED


def bands_of(scores, thresholds: RiskThresholds) -> list[RiskBand]:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size and (scores.min() < 0.0 or scores.max() > 1.0):
        bad = scores[(scores < 0.0) | (scores > 1.0)][0]
        raise DataError(f"score {bad} outside [0, 1]")
    out = []
    for s in scores:
        if s <= thresholds.green_upper:
            out.append(RiskBand.GREEN)
        elif s <= thresholds.amber_upper:
            out.append(RiskBand.AMBER)
        else:
            out.append(RiskBand.RED)
    return out


def youden_j(sensitivity: float, specificity: float) -> float:
    return sensitivity + specificity - 1.0


@dataclass(frozen=True)
class SelectiveReport:
    thresholds: RiskThresholds
    coverage: float
    n_green: int
    n_amber: int
    n_red: int
    metrics: ClassificationMetrics

    @property
    def youden(self) -> float:
        return youden_j(self.metrics.sensitivity, self.metrics.specificity)


def selective_metrics(scores, labels, thresholds: RiskThresholds) -> SelectiveReport:
    """Classification metrics over the retained (Green + Red) cases.

    Equivalent to plain classification_metrics on the retained subset at
    threshold amber_upper, since every retained score above amber_upper is
    Red. Errors when the retained subset lacks a class.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(scores) != len(labels):
        raise DataError("scores and labels must have equal length")
    bands = bands_of(scores, thresholds)
    n_green = sum(1 for b in bands if b is RiskBand.GREEN)
    n_amber = sum(1 for b in bands if b is RiskBand.AMBER)
    n_red = len(bands) - n_green - n_amber
    retained = np.array([b is not RiskBand.AMBER for b in bands], dtype=bool)
    if not retained.any():
        raise DataError(
            f"no retained cases: bands are green={n_green}, amber={n_amber}, red={n_red}"
        )
    sub_labels = labels[retained]
    if len(set(sub_labels.tolist())) < 2:
        raise DataError(
            "retained cases contain a single class: bands are "
            f"green={n_green}, amber={n_amber}, red={n_red}"
        )
    m = classification_metrics(scores[retained], sub_labels,
                               threshold=thresholds.amber_upper)
    return SelectiveReport(
        thresholds=thresholds,
        coverage=retained.sum() / len(bands),
        n_green=n_green, n_amber=n_amber, n_red=n_red,
        metrics=m,
    )


@dataclass(frozen=True)
class ThresholdCandidate:
    """One grid point of the search trace."""

    green_upper: float
    amber_upper: float
    feasible: bool
    reason: str | None = None
    coverage: float | None = None
    n_green: int | None = None
    n_amber: int | None = None
    n_red: int | None = None
    sensitivity: float | None = None
    specificity: float | None = None
    youden: float | None = None
    retained_auc: float | None = None


def _grid(resolution: float) -> list[float]:
    if not 0.0 < resolution < 1.0:
        raise UsageError("resolution must lie in (0, 1)")
    m = round(1.0 / resolution)
    if abs(m * resolution - 1.0) > 1e-9:
        raise UsageError(f"resolution {resolution} does not evenly divide 1")
    return [i / m for i in range(1, m)]


def search_thresholds(scores, labels, resolution: float = 0.1,
                      min_coverage: float = 0.5):
    """Exhaustive grid search over 0 < green_upper < amber_upper < 1.

    Objective: Youden's J on the retained cases, subject to coverage >=
    min_coverage. Ties prefer higher retained ROC-AUC, then the smaller
    (green_upper, amber_upper) pair. Returns (thresholds, trace) where the
    trace holds every grid point, feasible or not.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    grid = _grid(resolution)
    trace: list[ThresholdCandidate] = []
    best = None  # (j, auc, g, a)
    for gi, g in enumerate(grid):
        for a in grid[gi + 1:]:
            t = RiskThresholds(green_upper=g, amber_upper=a)
            try:
                rep = selective_metrics(scores, labels, t)
            except DataError as e:
                trace.append(ThresholdCandidate(
                    green_upper=g, amber_upper=a, feasible=False, reason=str(e)))
                continue
            if rep.coverage < min_coverage:
                trace.append(ThresholdCandidate(
                    green_upper=g, amber_upper=a, feasible=False,
                    reason=f"coverage {rep.coverage:.4f} below minimum {min_coverage}",
                    coverage=rep.coverage, n_green=rep.n_green,
                    n_amber=rep.n_amber, n_red=rep.n_red,
                    sensitivity=rep.metrics.sensitivity,
                    specificity=rep.metrics.specificity,
                    youden=rep.youden, retained_auc=rep.metrics.roc_auc))
                continue
            trace.append(ThresholdCandidate(
                green_upper=g, amber_upper=a, feasible=True,
                coverage=rep.coverage, n_green=rep.n_green,
                n_amber=rep.n_amber, n_red=rep.n_red,
                sensitivity=rep.metrics.sensitivity,
                specificity=rep.metrics.specificity,
                youden=rep.youden, retained_auc=rep.metrics.roc_auc))
            key = (rep.youden, rep.metrics.roc_auc)
            if best is None or key > (best[0], best[1]):
                best = (rep.youden, rep.metrics.roc_auc, g, a)
    if best is None:
        raise DataError(
            "threshold search found no feasible grid point: every pair leaves "
            "the retained set empty, single-class, or below minimum coverage"
        )
    return RiskThresholds(green_upper=best[2], amber_upper=best[3]), trace


def search_thresholds_cv(ids, scores, labels, k: int = 10, seed: int = 0,
                         resolution: float = 0.1, min_coverage: float = 0.5):
    """Stratified CV threshold selection: run the grid search on each
    held-out fold and pick the modal optimal pair, ties to the smaller pair.

    Returns (thresholds, per_fold) with per_fold the list of per-fold optima.
    """
    ids = list(ids)
    labels_list = [int(v) for v in np.asarray(labels)]
    assignment = assign_folds(ids, labels_list, k, seed)
    fold_idx = assignment.as_array(ids)
    scores = np.asarray(scores, dtype=np.float64)
    labels_arr = np.asarray(labels_list, dtype=np.int64)
    per_fold: list[RiskThresholds] = []
    for f in range(k):
        mask = fold_idx == f
        t, _trace = search_thresholds(scores[mask], labels_arr[mask],
                                      resolution=resolution,
                                      min_coverage=min_coverage)
        per_fold.append(t)
    counts = Counter((t.green_upper, t.amber_upper) for t in per_fold)
    top = max(counts.values())
    modal = min(pair for pair, c in counts.items() if c == top)
    return RiskThresholds(green_upper=modal[0], amber_upper=modal[1]), per_fold


def risk_by_severity(records, scores, bands):
    """Band counts and mean score per MMSE severity group.

    Records without an MMSE total are excluded and counted. Returns
    (rows, excluded) with one row per severity group in scale order.
    """
    records = list(records)
    scores = np.asarray(scores, dtype=np.float64)
    bands = list(bands)
    if not len(records) == len(scores) == len(bands):
        raise UsageError("records, scores, and bands must have equal length")
    order = ("CN", "MCI", "Moderate", "Severe")
    buckets: dict[str, list[int]] = {name: [] for name in order}
    excluded = 0
    for i, rec in enumerate(records):
        if rec.mmse is None:
            excluded += 1
            continue
        buckets[severity_group(rec.mmse).value].append(i)
    rows = []
    for name in order:
        idx = buckets[name]
        row = {
            "group": name,
            "n": len(idx),
            "mean_score": float(scores[idx].mean()) if idx else None,
            "green": sum(1 for i in idx if bands[i] is RiskBand.GREEN),
            "amber": sum(1 for i in idx if bands[i] is RiskBand.AMBER),
            "red": sum(1 for i in idx if bands[i] is RiskBand.RED),
        }
        rows.append(row)
    return rows, excluded
