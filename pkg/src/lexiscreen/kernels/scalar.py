"""Scalar kernel implementations.

These run as plain Python and are also the compilation source for the JIT
backend, so each function is fully self-contained: no calls into other module
functions, numpy only. The vector backend must match these bitwise; keep the
floating-point expression order in the two files identical.
"""

import numpy as np


def best_split(values, y, is_classif, min_leaf):
    """Exhaustive split search over a candidate-feature submatrix.

    values: (m, p) float64, y: (m,) float64. Returns
    (col, lo, hi, score, found): col indexes into values' columns, lo/hi are
    the adjacent sorted values around the best cut, score is the weighted
    child impurity (Gini) or summed child SSE. Ties resolve to the lowest
    column, then the lowest threshold, via strict < scans in ascending order.
    """
    m, p = values.shape
    best_score = np.inf
    best_col = -1
    best_lo = 0.0
    best_hi = 0.0
    found = False
    total = 0.0
    total_sq = 0.0
    for i in range(m):
        total += y[i]
        total_sq += y[i] * y[i]
    fm = float(m)
    fmin = float(min_leaf)
    for j in range(p):
        col = values[:, j].copy()
        order = np.argsort(col, kind="mergesort")
        s = 0.0
        q = 0.0
        for ii in range(m - 1):
            yv = y[order[ii]]
            s += yv
            q += yv * yv
            v0 = col[order[ii]]
            v1 = col[order[ii + 1]]
            if v0 == v1:
                continue
            nl = float(ii + 1)
            nr = fm - nl
            if nl < fmin or nr < fmin:
                continue
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
                sr = total - s
                qr = total_sq - q
                score = (q - s * s / nl) + (qr - sr * sr / nr)
            if score < best_score:
                best_score = score
                best_col = j
                best_lo = v0
                best_hi = v1
                found = True
    return best_col, best_lo, best_hi, best_score, found


def forest_predict(feature, threshold, left, right, value, offsets, x):
    """Mean leaf value over all trees for each row of x.

    Trees are packed into flat arrays; offsets[t] is tree t's root index and
    offsets has len(trees)+1 entries. Internal nodes carry feature >= 0 and
    route left when x[row, feature] <= threshold.
    """
    n = x.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    for t in range(n_trees):
        root = offsets[t]
        for r in range(n):
            node = root
            while feature[node] >= 0:
                if x[r, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[r] += value[node]
    ft = float(n_trees)
    for r in range(n):
        out[r] /= ft
    return out


def tree_shap(feature, threshold, left, right, value, coverage, max_depth, x, phi):
    """Path-dependent SHAP values for one tree, accumulated into phi.

    Arrays describe a single tree rooted at index 0; coverage holds training
    row counts for every node. Implements the polynomial-time path algorithm:
    each path entry tracks the feature that split (pd), the fraction of
    hidden (pz) and real (po) subsets flowing through, and permutation
    weights (pw). Iterative preorder with per-level path rows; a parent's
    finished row is copied down before each child is extended, and the hot
    child (the branch x actually takes) is processed first.
    """
    max_len = max_depth + 2
    pd = np.empty((max_len, max_len), dtype=np.int64)
    pz = np.empty((max_len, max_len), dtype=np.float64)
    po = np.empty((max_len, max_len), dtype=np.float64)
    pw = np.empty((max_len, max_len), dtype=np.float64)
    plen = np.zeros(max_len, dtype=np.int64)

    cap = 2 * max_len + 4
    st_node = np.empty(cap, dtype=np.int64)
    st_lvl = np.empty(cap, dtype=np.int64)
    st_pz = np.empty(cap, dtype=np.float64)
    st_po = np.empty(cap, dtype=np.float64)
    st_pf = np.empty(cap, dtype=np.int64)
    st_node[0] = 0
    st_lvl[0] = 0
    st_pz[0] = 1.0
    st_po[0] = 1.0
    st_pf[0] = -1
    top = 1

    while top > 0:
        top -= 1
        node = st_node[top]
        lvl = st_lvl[top]
        zfrac = st_pz[top]
        ofrac = st_po[top]
        pfeat = st_pf[top]

        if lvl == 0:
            length = 0
        else:
            length = plen[lvl - 1]
            for i in range(length):
                pd[lvl, i] = pd[lvl - 1, i]
                pz[lvl, i] = pz[lvl - 1, i]
                po[lvl, i] = po[lvl - 1, i]
                pw[lvl, i] = pw[lvl - 1, i]

        # extend the path with this branch
        pd[lvl, length] = pfeat
        pz[lvl, length] = zfrac
        po[lvl, length] = ofrac
        if length == 0:
            pw[lvl, length] = 1.0
        else:
            pw[lvl, length] = 0.0
        for i in range(length - 1, -1, -1):
            pw[lvl, i + 1] += ofrac * pw[lvl, i] * (i + 1.0) / (length + 1.0)
            pw[lvl, i] = zfrac * pw[lvl, i] * (length - i) / (length + 1.0)
        length += 1
        plen[lvl] = length

        f = feature[node]
        if f < 0:
            # leaf: credit every feature on the path via its unwound weight sum
            leaf_val = value[node]
            for i in range(1, length):
                one = po[lvl, i]
                zero = pz[lvl, i]
                total = 0.0
                nxt = pw[lvl, length - 1]
                if one != 0.0:
                    for k in range(length - 2, -1, -1):
                        t = nxt * length / ((k + 1.0) * one)
                        total += t
                        nxt = pw[lvl, k] - t * zero * (length - 1.0 - k) / length
                else:
                    for k in range(length - 2, -1, -1):
                        total += pw[lvl, k] * length / (zero * (length - 1.0 - k))
                phi[pd[lvl, i]] += total * (one - zero) * leaf_val
        else:
            if x[f] <= threshold[node]:
                hot = left[node]
                cold = right[node]
            else:
                hot = right[node]
                cold = left[node]
            izfrac = 1.0
            iofrac = 1.0
            kfound = -1
            for i in range(length):
                if pd[lvl, i] == f:
                    kfound = i
                    break
            if kfound >= 0:
                # feature already on the path: undo its previous extension
                izfrac = pz[lvl, kfound]
                iofrac = po[lvl, kfound]
                one = iofrac
                zero = izfrac
                nxt = pw[lvl, length - 1]
                if one != 0.0:
                    for k in range(length - 2, -1, -1):
                        t = pw[lvl, k]
                        pw[lvl, k] = nxt * length / ((k + 1.0) * one)
                        nxt = t - pw[lvl, k] * zero * (length - 1.0 - k) / length
                else:
                    for k in range(length - 2, -1, -1):
                        pw[lvl, k] = pw[lvl, k] * length / (zero * (length - 1.0 - k))
                for k in range(kfound, length - 1):
                    pd[lvl, k] = pd[lvl, k + 1]
                    pz[lvl, k] = pz[lvl, k + 1]
                    po[lvl, k] = po[lvl, k + 1]
                length -= 1
                plen[lvl] = length
            cov_node = coverage[node]
            # push cold first so the hot branch is processed first (LIFO)
            st_node[top] = cold
            st_lvl[top] = lvl + 1
            st_pz[top] = izfrac * coverage[cold] / cov_node
            st_po[top] = 0.0
            st_pf[top] = f
            top += 1
            st_node[top] = hot
            st_lvl[top] = lvl + 1
            st_pz[top] = izfrac * coverage[hot] / cov_node
            st_po[top] = iofrac
            st_pf[top] = f
            top += 1
    return phi
