"""Kernel backend selection.

Two interchangeable backends implement the hot loops (split search, forest
traversal, SHAP paths): a numba-JIT build of the scalar kernels and a pure
numpy fallback. They are bit-compatible by construction; the cross-backend
tests assert exact equality.

Selection is controlled by the LEXISCREEN_KERNELS environment variable:
  auto   use numba when importable, else numpy (default)
  numba  require the JIT backend, error if numba is missing
  numpy  force the vectorized fallback
"""

import os

_ENV_VAR = "LEXISCREEN_KERNELS"
_CHOICES = ("auto", "numba", "numpy")

BACKEND = None
best_split = None
forest_predict = None
tree_shap = None


def use_backend(name: str) -> str:
    """Bind the module-level kernel entry points to one backend.

    Called once at import using the environment variable; tests and the
    benchmark harness may rebind explicitly.
    """
    global BACKEND, best_split, forest_predict, tree_shap
    if name not in _CHOICES:
        raise ValueError(f"{_ENV_VAR} must be one of {_CHOICES}, got {name!r}")
    if name == "numpy":
        from . import vector as mod
        resolved = "numpy"
    elif name == "numba":
        try:
            from . import jit as mod
        except ImportError as e:
            raise ImportError(
                f"{_ENV_VAR}=numba but the numba import failed: {e}"
            ) from e
        resolved = "numba"
    else:
        try:
            from . import jit as mod
            resolved = "numba"
        except ImportError:
            from . import vector as mod
            resolved = "numpy"
    BACKEND = resolved
    best_split = mod.best_split
    forest_predict = mod.forest_predict
    tree_shap = mod.tree_shap
    return resolved


use_backend(os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto")
