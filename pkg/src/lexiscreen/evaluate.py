"""Evaluation harness: stratified cross-validation, random hyperparameter
search, bootstrap confidence intervals, and subgroup metrics.

Summary statistics over folds and bootstrap replicates use the population
standard deviation (ddof = 0); intervals are mean +/- 1.96 sd and the method
is flagged in reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import streams
from .corpus import assign_folds, assign_folds_unstratified, severity_group
from .errors import DataError, UsageError
from .forest import ForestParams, clamp_mmse, fit_forest, predict, predict_proba
from .metrics import classification_metrics, regression_metrics, roc_auc

CI_METHOD = "normal approximation, mean +/- 1.96 population sd"

CLASSIFY_METRICS = ("sensitivity", "specificity", "accuracy", "roc_auc")
REGRESS_METRICS = ("mae", "rmse")


def _canonical_order(ids):
    """Sort positions by record id so row order never affects a fit."""
    ids = list(ids)
    if len(set(ids)) != len(ids):
        raise DataError("duplicate ids in evaluation input")
    return ids, sorted(range(len(ids)), key=lambda i: ids[i])


def _score_classify(model, x, y, threshold):
    m = classification_metrics(predict_proba(model, x), y, threshold=threshold)
    return {
        "sensitivity": m.sensitivity,
        "specificity": m.specificity,
        "accuracy": m.accuracy,
        "roc_auc": m.roc_auc,
    }


def _score_regress(model, x, y):
    m = regression_metrics(y, clamp_mmse(predict(model, x)))
    return {"mae": m.mae, "rmse": m.rmse}


@dataclass(frozen=True)
class CVReport:
    task: str
    k: int
    seed: int
    folds: tuple[dict, ...]
    mean: dict
    sd: dict


def cross_validate(ids, x, y, params: ForestParams, task: str = "classify",
                   k: int = 10, seed: int = 0, n_jobs: int = 1,
                   threshold: float = 0.5) -> CVReport:
    """k-fold cross-validation; classification folds are stratified by label.

    Rows are first put in canonical id order, so permuting the input rows
    does not change the folds or the fitted models.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    ids, order = _canonical_order(ids)
    x = x[order]
    y = y[order]
    sorted_ids = [ids[i] for i in order]
    if task == "classify":
        assignment = assign_folds(sorted_ids, y.astype(np.int64).tolist(), k, seed)
    else:
        assignment = assign_folds_unstratified(sorted_ids, k, seed)
    fold_idx = assignment.as_array(sorted_ids)
    fold_reports = []
    for f in range(k):
        test_mask = fold_idx == f
        train_mask = ~test_mask
        fit_seed = streams.derive_seed(seed, streams.FOLDS, f + 1)
        model = fit_forest(x[train_mask], y[train_mask], params, task=task,
                           seed=fit_seed, n_jobs=n_jobs)
        if task == "classify":
            scores = _score_classify(model, x[test_mask], y[test_mask], threshold)
        else:
            scores = _score_regress(model, x[test_mask], y[test_mask])
        fold_reports.append({"fold": f, **scores})
    metric_names = CLASSIFY_METRICS if task == "classify" else REGRESS_METRICS
    mean = {}
    sd = {}
    for name in metric_names:
        vals = np.array([fr[name] for fr in fold_reports], dtype=np.float64)
        mean[name] = float(vals.mean())
        sd[name] = float(vals.std())  # ddof=0: population sd
    return CVReport(task=task, k=k, seed=seed, folds=tuple(fold_reports),
                    mean=mean, sd=sd)


@dataclass(frozen=True)
class ParamSpace:
    """Integer ranges (inclusive) to sample plus fixed values."""

    ranges: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)

    _FIELDS = ("n_trees", "max_depth", "min_samples_split",
               "min_samples_leaf", "features_per_split")

    def __post_init__(self):
        for key in list(self.ranges) + list(self.fixed):
            if key not in self._FIELDS:
                raise UsageError(f"unknown parameter {key!r}")
        for key, (lo, hi) in self.ranges.items():
            if lo > hi:
                raise UsageError(f"empty range for {key!r}")
        if not self.ranges:
            raise UsageError("parameter space has no ranges to search")

    @classmethod
    def default_classify(cls) -> "ParamSpace":
        return cls(
            ranges={"n_trees": (50, 500), "max_depth": (3, 20)},
            fixed={"min_samples_split": 2, "min_samples_leaf": 1,
                   "features_per_split": 10},
        )

    @classmethod
    def default_regress(cls) -> "ParamSpace":
        return cls(
            ranges={"n_trees": (50, 200), "max_depth": (5, 10),
                    "min_samples_split": (2, 5), "min_samples_leaf": (1, 2)},
            fixed={"features_per_split": 33},
        )

    def sample(self, rng: np.random.Generator) -> ForestParams:
        kwargs = {}
        for key in self._FIELDS:  # fixed field order keeps draws deterministic
            if key in self.ranges:
                lo, hi = self.ranges[key]
                kwargs[key] = int(rng.integers(lo, hi + 1))
            elif key in self.fixed:
                kwargs[key] = self.fixed[key]
        return ForestParams(**kwargs)


@dataclass(frozen=True)
class SearchResult:
    best_params: ForestParams
    best_score: float
    metric: str
    maximize: bool
    trials: tuple[dict, ...]


def random_search(ids, x, y, space: ParamSpace, budget: int,
                  task: str = "classify", k: int = 10, seed: int = 0,
                  n_jobs: int = 1) -> SearchResult:
    """Uniform random search scored by cross-validated mean ROC-AUC
    (classification, maximized) or mean MAE (regression, minimized). Equal
    scores keep the earlier draw."""
    if budget < 1:
        raise UsageError("search budget must be >= 1")
    rng = streams.generator(seed, streams.SEARCH, 0)
    metric = "roc_auc" if task == "classify" else "mae"
    maximize = task == "classify"
    best_params = None
    best_score = None
    trials = []
    for _trial in range(budget):
        params = space.sample(rng)
        report = cross_validate(ids, x, y, params, task=task, k=k, seed=seed,
                                n_jobs=n_jobs)
        score = report.mean[metric]
        trials.append({"params": params.to_dict(), "score": score})
        better = (
            best_score is None
            or (maximize and score > best_score)
            or (not maximize and score < best_score)
        )
        if better:
            best_score = score
            best_params = params
    return SearchResult(best_params=best_params, best_score=float(best_score),
                        metric=metric, maximize=maximize, trials=tuple(trials))


@dataclass(frozen=True)
class CIReport:
    metrics: dict  # name -> {mean, ci_low, ci_high}
    repeats: int
    ci_method: str = CI_METHOD
    replicates: tuple[dict, ...] = ()


def bootstrap_evaluate(train_ids, x_train, y_train, x_test, y_test,
                       params: ForestParams, task: str = "classify",
                       repeats: int = 10, seed: int = 0, n_jobs: int = 1,
                       threshold: float = 0.5) -> CIReport:
    """Refit on bootstrap resamples of the training rows, evaluate each fit
    on the fixed test set, and report mean +/- 1.96 population sd."""
    if repeats < 2:
        raise UsageError("bootstrap repeats must be >= 2")
    x_train = np.asarray(x_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64)
    x_test = np.asarray(x_test, dtype=np.float64)
    y_test = np.asarray(y_test, dtype=np.float64)
    train_ids, order = _canonical_order(train_ids)
    x_train = x_train[order]
    y_train = y_train[order]
    n = len(y_train)
    rows_all = []
    for r in range(repeats):
        rng = streams.generator(seed, streams.BOOTSTRAP, r)
        rows = rng.integers(0, n, size=n)
        fit_seed = streams.derive_seed(seed, streams.BOOTSTRAP, r)
        model = fit_forest(x_train[rows], y_train[rows], params, task=task,
                           seed=fit_seed, n_jobs=n_jobs)
        if task == "classify":
            rows_all.append(_score_classify(model, x_test, y_test, threshold))
        else:
            rows_all.append(_score_regress(model, x_test, y_test))
    metric_names = CLASSIFY_METRICS if task == "classify" else REGRESS_METRICS
    out = {}
    for name in metric_names:
        vals = np.array([rr[name] for rr in rows_all], dtype=np.float64)
        m = float(vals.mean())
        s = float(vals.std())  # ddof=0: population sd
        out[name] = {"mean": m, "ci_low": m - 1.96 * s, "ci_high": m + 1.96 * s}
    return CIReport(metrics=out, repeats=repeats,
                    replicates=tuple(rows_all))


GROUPINGS = ("sex", "age_decade", "severity")
_AGE_BANDS = (("50-59", 50, 59), ("60-69", 60, 69), ("70-80", 70, 80))


def _age_band(age: int) -> str:
    for name, lo, hi in _AGE_BANDS:
        if lo <= age <= hi:
            return name
    return "other"


def _group_names(grouping: str) -> tuple[str, ...]:
    if grouping == "sex":
        return ("female", "male")
    if grouping == "age_decade":
        return tuple(name for name, _lo, _hi in _AGE_BANDS) + ("other",)
    return ("CN", "MCI", "Moderate", "Severe")


def _group_key(record, grouping: str) -> str | None:
    if grouping == "sex":
        return record.sex
    if grouping == "age_decade":
        return None if record.age is None else _age_band(record.age)
    return None if record.mmse is None else severity_group(record.mmse).value


@dataclass(frozen=True)
class GroupReport:
    grouping: str
    groups: dict  # name -> {"n": int[, "accuracy": float, "positive_rate": float]}
    excluded: int


def group_metrics(records, scores, grouping: str, threshold: float = 0.5) -> GroupReport:
    """Per-group accuracy and positive prediction rate.

    Records missing the grouping field or the diagnosis label are excluded
    and counted; empty groups appear with n = 0 and no metric keys.
    """
    if grouping not in GROUPINGS:
        raise UsageError(f"grouping must be one of {GROUPINGS}, got {grouping!r}")
    records = list(records)
    scores = np.asarray(scores, dtype=np.float64)
    if len(records) != len(scores):
        raise UsageError("records and scores must have equal length")
    buckets: dict[str, list[int]] = {name: [] for name in _group_names(grouping)}
    excluded = 0
    for i, rec in enumerate(records):
        key = _group_key(rec, grouping)
        if key is None or rec.diagnosis is None:
            excluded += 1
            continue
        buckets[key].append(i)
    groups = {}
    for name in _group_names(grouping):
        idx = buckets[name]
        if not idx:
            groups[name] = {"n": 0}
            continue
        sub_scores = scores[idx]
        labels = np.array([records[i].diagnosis for i in idx], dtype=np.int64)
        pred = sub_scores > threshold
        groups[name] = {
            "n": len(idx),
            "accuracy": float((pred == (labels == 1)).mean()),
            "positive_rate": float(pred.mean()),
        }
    return GroupReport(grouping=grouping, groups=groups, excluded=excluded)
