"""Vectorized numpy backend.

Must return bit-identical results to the scalar/JIT backend: cumulative sums
reproduce sequential accumulation exactly, stable argsort matches mergesort,
and np.argmin's first-occurrence rule matches the scalar strict < scan. Keep
floating-point expression order aligned with scalar.py.
"""

import numpy as np

from .scalar import tree_shap  # noqa: F401  (path algorithm stays scalar)


def best_split(values, y, is_classif, min_leaf):
    """Vectorized equivalent of scalar.best_split."""
    m, p = values.shape
    best_score = np.inf
    best_col = -1
    best_lo = 0.0
    best_hi = 0.0
    found = False
    if m < 2:
        return best_col, best_lo, best_hi, best_score, found
    total = np.cumsum(y)[-1]
    total_sq = np.cumsum(y * y)[-1]
    fm = float(m)
    nl = np.arange(1, m, dtype=np.float64)
    nr = fm - nl
    size_ok = (nl >= float(min_leaf)) & (nr >= float(min_leaf))
    for j in range(p):
        col = values[:, j]
        order = np.argsort(col, kind="stable")
        sv = col[order]
        valid = (sv[:-1] < sv[1:]) & size_ok
        if not valid.any():
            continue
        ys = y[order]
        s = np.cumsum(ys)[:-1]
        if is_classif:
            pl = s / nl
            ql = (nl - s) / nl
            gl = 1.0 - pl * pl - ql * ql
            sr = total - s
            pr = sr / nr
            qr = (nr - sr) / nr
            gr = 1.0 - pr * pr - qr * qr
            score = (nl / fm) * gl + (nr / fm) * gr
        else:
            q = np.cumsum(ys * ys)[:-1]
            sr = total - s
            qr = total_sq - q
            score = (q - s * s / nl) + (qr - sr * sr / nr)
        score = np.where(valid, score, np.inf)
        idx = int(np.argmin(score))
        sc = float(score[idx])
        if sc < best_score:
            best_score = sc
            best_col = j
            best_lo = float(sv[idx])
            best_hi = float(sv[idx + 1])
            found = True
    return best_col, best_lo, best_hi, best_score, found


def forest_predict(feature, threshold, left, right, value, offsets, x):
    """Wavefront traversal: all rows advance one tree level per iteration."""
    n = x.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    row_idx = np.arange(n)
    for t in range(n_trees):
        node = np.full(n, offsets[t], dtype=np.int64)
        while True:
            f = feature[node]
            active = f >= 0
            if not active.any():
                break
            rows = row_idx[active]
            cur = node[rows]
            go_left = x[rows, f[rows]] <= threshold[cur]
            node[rows] = np.where(go_left, left[cur], right[cur])
        out += value[node]
    out /= float(n_trees)
    return out
