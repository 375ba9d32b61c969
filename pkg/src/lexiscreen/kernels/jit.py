"""JIT backend: the scalar kernels compiled with numba.

Importing this module requires numba; the package selector falls back to the
vector backend when it is unavailable.
"""

from numba import njit

from . import scalar

_jit = njit(cache=True, nogil=True)

best_split = _jit(scalar.best_split)
forest_predict = _jit(scalar.forest_predict)
tree_shap = _jit(scalar.tree_shap)
