"""Random forest classifier and regressor built on the split-search kernel.

Trees grow greedily: Gini impurity for classification, within-node SSE for
regression, midpoint thresholds, ties resolved to the lowest feature index
then the lowest threshold. Each tree draws a bootstrap of the training rows
and an independent feature subset at every node from its own seeded stream.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels, streams
from .errors import ModelError, UsageError
from .features import FeatureVector

TASKS = ("classify", "regress")

# MMSE reporting scale; regression predictions are clamped to this range at
# the reporting layer only.
SCORE_MIN = 0.0
SCORE_MAX = 30.0


def clamp_mmse(values):
    return np.clip(values, SCORE_MIN, SCORE_MAX)


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 100
    max_depth: int = 16
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    features_per_split: int | None = None

    def __post_init__(self):
        if self.n_trees < 1:
            raise UsageError("n_trees must be >= 1")
        if self.max_depth < 1:
            raise UsageError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise UsageError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise UsageError("min_samples_leaf must be >= 1")
        if self.min_samples_leaf > self.min_samples_split:
            raise UsageError("min_samples_leaf must not exceed min_samples_split")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise UsageError("features_per_split must be >= 1")

    @classmethod
    def default_classify(cls) -> "ForestParams":
        return cls(n_trees=50, max_depth=16, min_samples_split=2,
                   min_samples_leaf=1, features_per_split=10)

    @classmethod
    def default_regress(cls) -> "ForestParams":
        return cls(n_trees=100, max_depth=10, min_samples_split=2,
                   min_samples_leaf=2, features_per_split=33)

    def resolve_features_per_split(self, n_features: int, task: str) -> int:
        if self.features_per_split is not None:
            return min(self.features_per_split, n_features)
        if task == "classify":
            k = int(math.floor(math.sqrt(n_features)))
        else:
            k = max(1, n_features // 3)
        return min(max(k, 1), n_features)

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
            "features_per_split": self.features_per_split,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForestParams":
        return cls(
            n_trees=int(d["n_trees"]),
            max_depth=int(d["max_depth"]),
            min_samples_split=int(d["min_samples_split"]),
            min_samples_leaf=int(d["min_samples_leaf"]),
            features_per_split=None if d.get("features_per_split") is None
            else int(d["features_per_split"]),
        )


@dataclass
class Tree:
    """Flat preorder node arrays. feature[i] < 0 marks a leaf; value holds
    the positive-class fraction (classification) or the mean target
    (regression); coverage holds training row counts and satisfies
    coverage[parent] = coverage[left] + coverage[right]."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    coverage: np.ndarray
    depth: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def expected_value(self) -> float:
        """Coverage-weighted mean leaf value (preorder accumulation)."""
        total = 0.0
        for i in range(self.n_nodes):
            if self.feature[i] < 0:
                total += self.value[i] * self.coverage[i]
        return total / self.coverage[0]

    @classmethod
    def from_nested(cls, spec) -> "Tree":
        """Build a tree from nested tuples, for hand-written fixtures:
        ("leaf", value, coverage) or ("split", feature, threshold, left, right).
        Internal coverages are derived from the leaves."""
        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        value: list[float] = []
        coverage: list[float] = []
        max_depth = 0

        def walk(node, depth):
            nonlocal max_depth
            max_depth = max(max_depth, depth)
            idx = len(feature)
            if node[0] == "leaf":
                _, v, cov = node
                feature.append(-1)
                threshold.append(0.0)
                left.append(-1)
                right.append(-1)
                value.append(float(v))
                coverage.append(float(cov))
                return idx
            _, f, thr, lnode, rnode = node
            feature.append(int(f))
            threshold.append(float(thr))
            left.append(-1)
            right.append(-1)
            value.append(0.0)
            coverage.append(0.0)
            li = walk(lnode, depth + 1)
            left[idx] = li
            ri = walk(rnode, depth + 1)
            right[idx] = ri
            coverage[idx] = coverage[li] + coverage[ri]
            value[idx] = (value[li] * coverage[li] + value[ri] * coverage[ri]) / coverage[idx]
            return idx

        walk(spec, 0)
        return cls(
            feature=np.array(feature, dtype=np.int64),
            threshold=np.array(threshold, dtype=np.float64),
            left=np.array(left, dtype=np.int64),
            right=np.array(right, dtype=np.int64),
            value=np.array(value, dtype=np.float64),
            coverage=np.array(coverage, dtype=np.float64),
            depth=max_depth,
        )


@dataclass
class ForestModel:
    task: str
    trees: list[Tree]
    params: ForestParams
    seed: int
    n_features: int
    schema_fingerprint: str | None = None
    _packed: tuple | None = field(default=None, repr=False, compare=False)

    def packed(self):
        """Concatenated node arrays plus per-tree offsets, for the kernels."""
        if self._packed is None:
            offsets = np.zeros(len(self.trees) + 1, dtype=np.int64)
            for t, tree in enumerate(self.trees):
                offsets[t + 1] = offsets[t] + tree.n_nodes
            feature = np.concatenate([t.feature for t in self.trees])
            threshold = np.concatenate([t.threshold for t in self.trees])
            # child indices shift by each tree's base offset
            left = np.concatenate([t.left + off for t, off in zip(self.trees, offsets[:-1])])
            right = np.concatenate([t.right + off for t, off in zip(self.trees, offsets[:-1])])
            value = np.concatenate([t.value for t in self.trees])
            coverage = np.concatenate([t.coverage for t in self.trees])
            max_depth = max(t.depth for t in self.trees)
            self._packed = (feature, threshold, left, right, value, coverage, offsets, max_depth)
        return self._packed


def _validate_matrix(x, y, task):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ModelError("feature matrix must be 2-dimensional")
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or len(y) != x.shape[0]:
        raise ModelError("target length does not match feature matrix rows")
    if x.shape[0] < 2:
        raise ModelError("need at least 2 training rows")
    if not np.isfinite(x).all():
        r, c = np.argwhere(~np.isfinite(x))[0]
        raise ModelError(f"non-finite feature value at row {int(r)}, column {int(c)}")
    if not np.isfinite(y).all():
        r = int(np.argwhere(~np.isfinite(y))[0][0])
        raise ModelError(f"non-finite target value at row {r}")
    if task == "classify":
        uniq = np.unique(y)
        if not np.isin(uniq, (0.0, 1.0)).all():
            raise ModelError("classification labels must be 0 or 1")
        if len(uniq) < 2:
            raise ModelError("classification target contains a single class")
    return x, y


def _grow_tree(x, y, params: ForestParams, task: str, k_features: int,
               rng: np.random.Generator):
    """Grow one tree on a bootstrap of the rows. Preorder construction with
    an explicit stack; the node feature subset is drawn in visit order so the
    stream consumption is schedule-independent."""
    n, d = x.shape
    rows0 = rng.integers(0, n, size=n)
    is_classif = task == "classify"

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    coverage: list[float] = []
    max_depth_seen = 0

    # (rows, depth, parent, is_right); right child pushed first so the left
    # subtree is numbered immediately after its parent (preorder)
    stack = [(rows0, 0, -1, False)]
    while stack:
        rows, depth, parent, is_right = stack.pop()
        nid = len(feature)
        if parent >= 0:
            if is_right:
                right[parent] = nid
            else:
                left[parent] = nid
        if depth > max_depth_seen:
            max_depth_seen = depth
        m = len(rows)
        ysub = y[rows]
        s = float(np.cumsum(ysub)[-1]) if m else 0.0
        node_value = s / m
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(node_value)
        coverage.append(float(m))

        if depth >= params.max_depth or m < params.min_samples_split:
            continue
        if is_classif:
            if s == 0.0 or s == float(m):
                continue
        else:
            if np.min(ysub) == np.max(ysub):
                continue

        feats = np.sort(rng.choice(d, size=k_features, replace=False))
        sub = np.ascontiguousarray(x[rows[:, None], feats])
        col, lo, hi, _score, found = kernels.best_split(
            sub, ysub, is_classif, params.min_samples_leaf
        )
        if not found:
            continue
        f = int(feats[col])
        thr = 0.5 * (lo + hi)
        if thr == hi:  # rounding guard for adjacent floats
            thr = lo
        go_left = x[rows, f] <= thr
        feature[nid] = f
        threshold[nid] = thr
        stack.append((rows[~go_left], depth + 1, nid, True))
        stack.append((rows[go_left], depth + 1, nid, False))

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
        coverage=np.array(coverage, dtype=np.float64),
        depth=max_depth_seen,
    )


def fit_forest(x, y, params: ForestParams | None = None, task: str = "classify",
               seed: int = 0, n_jobs: int = 1,
               schema_fingerprint: str | None = None) -> ForestModel:
    """Fit a random forest. Deterministic for fixed (x, y, params, task,
    seed) regardless of n_jobs: every tree owns an independent stream keyed
    by (seed, tree index)."""
    if task not in TASKS:
        raise UsageError(f"task must be one of {TASKS}, got {task!r}")
    if params is None:
        params = ForestParams.default_classify() if task == "classify" \
            else ForestParams.default_regress()
    x, y = _validate_matrix(x, y, task)
    d = x.shape[1]
    k_features = params.resolve_features_per_split(d, task)

    def build(t: int) -> Tree:
        rng = streams.generator(seed, streams.TREES, t)
        return _grow_tree(x, y, params, task, k_features, rng)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            trees = list(pool.map(build, range(params.n_trees)))
    else:
        trees = [build(t) for t in range(params.n_trees)]
    return ForestModel(
        task=task, trees=trees, params=params, seed=seed, n_features=d,
        schema_fingerprint=schema_fingerprint,
    )


def _as_matrix(model: ForestModel, x):
    """Normalize input to a 2-d float matrix; returns (matrix, single_row)."""
    if isinstance(x, FeatureVector):
        if model.schema_fingerprint is not None \
                and x.schema.fingerprint != model.schema_fingerprint:
            raise ModelError(
                "schema fingerprint mismatch: model expects "
                f"{model.schema_fingerprint[:12]}..., features carry "
                f"{x.schema.fingerprint[:12]}..."
            )
        return x.values.reshape(1, -1), True
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
        single = True
    elif arr.ndim == 2:
        single = False
    else:
        raise ModelError("input must be a feature vector or 2-d matrix")
    if arr.shape[1] != model.n_features:
        raise ModelError(
            f"input has {arr.shape[1]} features, model expects {model.n_features}"
        )
    if not np.isfinite(arr).all():
        r, c = np.argwhere(~np.isfinite(arr))[0]
        raise ModelError(f"non-finite feature value at row {int(r)}, column {int(c)}")
    return arr, single


def predict_proba(model: ForestModel, x):
    """Positive-class probability: mean of per-tree leaf fractions."""
    if model.task != "classify":
        raise ModelError("predict_proba requires a classification model")
    arr, single = _as_matrix(model, x)
    feature, threshold, left, right, value, _cov, offsets, _d = model.packed()
    out = kernels.forest_predict(feature, threshold, left, right, value, offsets, arr)
    return float(out[0]) if single else out


def predict(model: ForestModel, x):
    """Regression prediction: mean of per-tree leaf means, unclamped.

    Reporting layers clamp to the MMSE scale via clamp_mmse; the raw value
    is what downstream explanation sums must match.
    """
    if model.task != "regress":
        raise ModelError("predict requires a regression model")
    arr, single = _as_matrix(model, x)
    feature, threshold, left, right, value, _cov, offsets, _d = model.packed()
    out = kernels.forest_predict(feature, threshold, left, right, value, offsets, arr)
    return float(out[0]) if single else out


def predict_labels(model: ForestModel, x, threshold: float = 0.5):
    """Hard labels from probabilities: strictly greater than the threshold."""
    proba = predict_proba(model, x)
    if np.isscalar(proba):
        return int(proba > threshold)
    return (proba > threshold).astype(np.int64)
