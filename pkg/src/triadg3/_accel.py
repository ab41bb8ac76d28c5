"""Numba switch.

Set ``TRIADG3_USE_NUMBA=0`` before import to force the pure-numpy kernels.
"""

import os

USE_NUMBA = os.environ.get("TRIADG3_USE_NUMBA", "1").lower() not in ("0", "false", "no", "off")

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

JIT_OPTIONS = {"nogil": True, "cache": True}


def njit(func):
    """Compile ``func`` with numba when enabled, otherwise return it unchanged."""
    if USE_NUMBA:
        return numba.njit(**JIT_OPTIONS)(func)
    return func
