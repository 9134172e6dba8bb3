"""Backend selection for the hot kernels.

Numba is used when importable unless ``OTLAB_DISABLE_NUMBA`` is set to a
truthy value; the pure-numpy path is always available.  ``set_backend``
switches at runtime (tests and the benchmark run both paths).
"""

from __future__ import annotations

import os

try:
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

HAVE_NUMBA = _numba is not None

_TRUTHY = {"1", "true", "yes", "on"}
_backend = (
    "numpy"
    if not HAVE_NUMBA or os.environ.get("OTLAB_DISABLE_NUMBA", "").lower() in _TRUTHY
    else "numba"
)


def backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    old, _backend = _backend, name
    return old


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity otherwise."""
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f
