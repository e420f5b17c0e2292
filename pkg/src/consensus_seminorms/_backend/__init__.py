"""Kernel backend selection.

The package ships a compiled extension (``_speedups``) for the hot
kernels and a NumPy fallback (``_numpy_impl``) with identical semantics.
The compiled backend is preferred at import time; set
``CONSEM_BACKEND=numpy`` or ``CONSEM_BACKEND=cython`` to force one.
``set_backend`` switches at runtime (used by the benchmark and tests).
"""

import os

import numpy as np

from . import _numpy_impl

_IMPLS = {"numpy": _numpy_impl}
try:
    from . import _speedups

    _IMPLS["cython"] = _speedups
except ImportError:
    _speedups = None


def _initial_backend():
    forced = os.environ.get("CONSEM_BACKEND", "").strip().lower()
    if forced in ("numpy", "py", "python"):
        return "numpy"
    if forced in ("cython", "c", "compiled"):
        if "cython" not in _IMPLS:
            raise ImportError(
                "CONSEM_BACKEND=cython but the compiled extension is not built"
            )
        return "cython"
    if forced:
        raise ValueError(f"unknown CONSEM_BACKEND value: {forced!r}")
    return "cython" if "cython" in _IMPLS else "numpy"


_active = _initial_backend()


def available_backends():
    """Names of importable backends ('numpy' always, 'cython' if built)."""
    return tuple(sorted(_IMPLS))


def current_backend():
    return _active


def set_backend(name):
    """Switch the active kernel backend ('numpy' or 'cython')."""
    global _active
    if name not in _IMPLS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    _active = name


BACKEND = _active


def _as_c_matrix(m):
    return np.ascontiguousarray(m, dtype=np.float64)


def pairwise_rowdiff_max(m):
    """Max over row pairs of the entrywise-l1 row distance, with arg pair."""
    return _IMPLS[_active].pairwise_rowdiff_max(_as_c_matrix(m))


def col_split_value(m):
    """Max over columns of (top-q sum - bottom-q sum), q = rows // 2."""
    return _IMPLS[_active].col_split_value(_as_c_matrix(m))


def scrambling_pair(s):
    """First orthogonal row pair of a nonnegative matrix, or (-1, -1)."""
    return _IMPLS[_active].scrambling_pair(_as_c_matrix(s))


def sym_eig_max(a, rel_tol=1e-10, rot_cap=100_000):
    """Largest eigenvalue of a symmetric matrix: (value, rotations, ok)."""
    work = np.array(a, dtype=np.float64, order="C", copy=True)
    return _IMPLS[_active].sym_eig_max(work, rel_tol, rot_cap)


def simplex_loop(t, basis, cap, tol):
    """Run Bland-rule pivots in place on tableau ``t`` with ``basis``."""
    return _IMPLS[_active].simplex_loop(t, basis, cap, tol)
