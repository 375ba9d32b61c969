"""Per-prediction feature attributions via path-dependent SHAP.

Forest attributions are the mean of per-tree attributions; the base value is
the mean coverage-weighted leaf expectation. Local accuracy holds to float
precision: base_value + sum(phi) equals the forest prediction. A brute-force
Shapley oracle over small trees backs the correctness tests.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ModelError, UsageError
from .features import FeatureVector
from .forest import ForestModel, Tree, _as_matrix

__all__ = [
    "Attribution", "ImportanceSummary", "tree_shap", "explain_dataset",
    "shap_oracle_tree", "shap_oracle_forest", "summarize_importance",
]


@dataclass(frozen=True)
class Attribution:
    """phi[i] is feature i's contribution; base_value + phi.sum() equals the
    model output for this input."""

    phi: np.ndarray
    base_value: float
    prediction: float
    record_id: str | None = None


def base_value(model: ForestModel) -> float:
    """Mean over trees of the coverage-weighted leaf expectation."""
    total = 0.0
    for tree in model.trees:
        total += tree.expected_value()
    return total / len(model.trees)


def _tree_phi(tree: Tree, x: np.ndarray, d: int) -> np.ndarray:
    phi = np.zeros(d, dtype=np.float64)
    kernels.tree_shap(tree.feature, tree.threshold, tree.left, tree.right,
                      tree.value, tree.coverage, tree.depth, x, phi)
    return phi


def _forest_phi(model: ForestModel, x: np.ndarray) -> np.ndarray:
    d = model.n_features
    phi = np.zeros(d, dtype=np.float64)
    for tree in model.trees:
        kernels.tree_shap(tree.feature, tree.threshold, tree.left, tree.right,
                          tree.value, tree.coverage, tree.depth, x, phi)
    phi /= float(len(model.trees))
    return phi


def tree_shap(model: ForestModel, x) -> Attribution:
    """Attribution for a single input (FeatureVector or 1-d array)."""
    arr, _single = _as_matrix(model, x)
    if arr.shape[0] != 1:
        raise UsageError("tree_shap explains one input; use explain_dataset for batches")
    row = np.ascontiguousarray(arr[0])
    phi = _forest_phi(model, row)
    feature, threshold, left, right, value, _cov, offsets, _d = model.packed()
    pred = float(kernels.forest_predict(feature, threshold, left, right, value,
                                        offsets, arr)[0])
    rid = x.record_id if isinstance(x, FeatureVector) else None
    return Attribution(phi=phi, base_value=base_value(model), prediction=pred,
                       record_id=rid)


def explain_dataset(model: ForestModel, x, n_jobs: int = 1):
    """Attributions for every row of x.

    Returns (phi_matrix, base, predictions); rows of phi_matrix align with
    rows of x regardless of n_jobs.
    """
    arr, _single = _as_matrix(model, x)
    base = base_value(model)
    feature, threshold, left, right, value, _cov, offsets, _d = model.packed()
    preds = kernels.forest_predict(feature, threshold, left, right, value, offsets, arr)
    rows = [np.ascontiguousarray(arr[i]) for i in range(arr.shape[0])]
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            phis = list(pool.map(lambda r: _forest_phi(model, r), rows))
    else:
        phis = [_forest_phi(model, r) for r in rows]
    phi_matrix = np.vstack(phis) if phis else np.empty((0, model.n_features))
    return phi_matrix, base, preds


def _tree_value_fixed(tree: Tree, x: np.ndarray, fixed: frozenset) -> float:
    """Expected tree output when features in `fixed` follow x and the rest
    are marginalized by training coverage."""

    def walk(node: int) -> float:
        f = tree.feature[node]
        if f < 0:
            return float(tree.value[node])
        if f in fixed:
            if x[f] <= tree.threshold[node]:
                return walk(tree.left[node])
            return walk(tree.right[node])
        li, ri = tree.left[node], tree.right[node]
        cl, cr = tree.coverage[li], tree.coverage[ri]
        return (cl * walk(li) + cr * walk(ri)) / (cl + cr)

    return walk(0)


def shap_oracle_tree(tree: Tree, x: np.ndarray, d: int) -> np.ndarray:
    """Exact Shapley values by direct enumeration over the tree's features.

    Exponential in the number of distinct split features; guarded at 12.
    """
    feats = sorted({int(f) for f in tree.feature if f >= 0})
    if len(feats) > 12:
        raise UsageError("oracle limited to trees splitting on at most 12 features")
    phi = np.zeros(d, dtype=np.float64)
    if not feats:
        return phi
    x = np.asarray(x, dtype=np.float64)
    nf = len(feats)
    cache: dict[frozenset, float] = {}

    def v(subset: frozenset) -> float:
        if subset not in cache:
            cache[subset] = _tree_value_fixed(tree, x, subset)
        return cache[subset]

    fact = math.factorial
    for f in feats:
        others = [g for g in feats if g != f]
        for r in range(nf):
            weight = fact(r) * fact(nf - r - 1) / fact(nf)
            for combo in itertools.combinations(others, r):
                s = frozenset(combo)
                phi[f] += weight * (v(s | {f}) - v(s))
    return phi


def shap_oracle_forest(model: ForestModel, x) -> np.ndarray:
    """Mean of per-tree oracle attributions, matching the forest convention."""
    arr, _single = _as_matrix(model, x)
    row = arr[0]
    phi = np.zeros(model.n_features, dtype=np.float64)
    for tree in model.trees:
        phi += shap_oracle_tree(tree, row, model.n_features)
    return phi / float(len(model.trees))


@dataclass(frozen=True)
class ImportanceSummary:
    """Features ranked by mean |phi| over a dataset; ties break on name."""

    names: tuple[str, ...]
    mean_abs: np.ndarray
    ranking: tuple[tuple[str, float], ...]

    def top(self, k: int) -> tuple[str, ...]:
        return tuple(name for name, _value in self.ranking[:k])


def summarize_importance(phi_matrix, names) -> ImportanceSummary:
    phi_matrix = np.asarray(phi_matrix, dtype=np.float64)
    names = tuple(names)
    if phi_matrix.ndim != 2 or phi_matrix.shape[1] != len(names):
        raise UsageError("phi matrix width does not match feature names")
    if phi_matrix.shape[0] == 0:
        raise UsageError("cannot summarize importance of an empty matrix")
    mean_abs = np.abs(phi_matrix).mean(axis=0)
    order = sorted(range(len(names)), key=lambda i: (-mean_abs[i], names[i]))
    ranking = tuple((names[i], float(mean_abs[i])) for i in order)
    return ImportanceSummary(names=names, mean_abs=mean_abs, ranking=ranking)
