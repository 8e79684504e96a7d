"""Numba shim.

Kernels are written in the numba-compatible subset of Python.  They are
compiled with ``njit`` unless ``WHFC_DISABLE_NUMBA`` is set to a truthy
value or numba is unavailable, in which case the plain Python functions run
unchanged on the same numpy arrays.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("WHFC_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

NUMBA_ENABLED = False
if not _DISABLED:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False


def jit(func):
    if NUMBA_ENABLED:
        return _njit(cache=True)(func)
    return func


def python_impl(func):
    """The uncompiled implementation behind a kernel (identity when numba is off)."""
    return getattr(func, "py_func", func)
