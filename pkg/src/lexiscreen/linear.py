"""Linear baselines: full-batch gradient-descent logistic regression and
closed-form ridge regression.

Both standardize features internally (zero mean, unit scale; constant
columns keep scale 1) and report coefficients in original units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelError


@dataclass
class LinearModel:
    kind: str  # "logistic" or "ridge"
    coef: np.ndarray  # original-unit coefficients
    intercept: float
    l2: float
    n_iter: int = 0
    converged: bool = True

    def decision(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(1, -1)
        return x @ self.coef + self.intercept

    def predict_proba(self, x) -> np.ndarray:
        if self.kind != "logistic":
            raise ModelError("predict_proba requires a logistic model")
        z = self.decision(x)
        return 1.0 / (1.0 + np.exp(-z))

    def predict(self, x) -> np.ndarray:
        if self.kind != "ridge":
            raise ModelError("predict requires a ridge model")
        return self.decision(x)


def _standardize(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ModelError("feature matrix must be 2-dimensional")
    if not np.isfinite(x).all():
        r, c = np.argwhere(~np.isfinite(x))[0]
        raise ModelError(f"non-finite feature value at row {int(r)}, column {int(c)}")
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return (x - mean) / scale, mean, scale


def fit_logistic(x, y, l2: float = 1.0, max_iter: int = 10000,
                 tol: float = 1e-6, seed: int = 0) -> LinearModel:
    """Logistic regression by full-batch gradient descent.

    Minimizes mean log-loss plus (l2 / 2n) ||w||^2 on the non-intercept
    weights, from zero initialization with a fixed step 1/L bounded by the
    gradient's Lipschitz constant. The seed parameter exists for interface
    symmetry; the zero start makes the fit deterministic without it.
    """
    del seed
    y = np.asarray(y, dtype=np.float64)
    if set(np.unique(y)) - {0.0, 1.0}:
        raise ModelError("logistic labels must be 0 or 1")
    if len(np.unique(y)) < 2:
        raise ModelError("classification target contains a single class")
    xs, mean, scale = _standardize(x)
    n, d = xs.shape
    if len(y) != n:
        raise ModelError("target length does not match feature matrix rows")
    if l2 < 0:
        raise ModelError("l2 must be non-negative")

    lipschitz = float(np.sum(xs * xs)) / (4.0 * n) + l2 / n + 1e-12
    step = 1.0 / lipschitz
    w = np.zeros(d)
    b = 0.0
    n_iter = 0
    converged = False
    for n_iter in range(1, max_iter + 1):
        z = xs @ w + b
        p = 1.0 / (1.0 + np.exp(-z))
        err = p - y
        gw = xs.T @ err / n + (l2 / n) * w
        gb = float(err.mean())
        w -= step * gw
        b -= step * gb
        if max(np.abs(gw).max(initial=0.0), abs(gb)) < tol:
            converged = True
            break
    coef = w / scale
    intercept = b - float(coef @ mean)
    return LinearModel(kind="logistic", coef=coef, intercept=intercept,
                       l2=l2, n_iter=n_iter, converged=converged)


def fit_ridge(x, y, l2: float = 1.0) -> LinearModel:
    """Ridge regression via the normal equations on standardized features;
    the penalty does not touch the intercept."""
    y = np.asarray(y, dtype=np.float64)
    xs, mean, scale = _standardize(x)
    n, d = xs.shape
    if len(y) != n:
        raise ModelError("target length does not match feature matrix rows")
    if not np.isfinite(y).all():
        raise ModelError("non-finite target value")
    if l2 < 0:
        raise ModelError("l2 must be non-negative")
    ym = float(y.mean())
    yc = y - ym
    gram = xs.T @ xs + l2 * np.eye(d)
    try:
        w = np.linalg.solve(gram, xs.T @ yc)
    except np.linalg.LinAlgError:
        raise ModelError("singular normal equations; increase l2") from None
    if not np.isfinite(w).all():
        raise ModelError("singular normal equations; increase l2")
    coef = w / scale
    intercept = ym - float(coef @ mean)
    return LinearModel(kind="ridge", coef=coef, intercept=intercept, l2=l2)
