"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``PERMWAVE_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("PERMWAVE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernels forced")
    from . import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def default_threads() -> int:
    env = os.environ.get("PERMWAVE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def af_grid(omega_sub, theta, T, taus, omegas, threads: int | None = None):
    import numpy as np

    args = [np.ascontiguousarray(a, dtype=float) for a in (omega_sub, theta)]
    taus = np.ascontiguousarray(taus, dtype=float)
    omegas = np.ascontiguousarray(omegas, dtype=float)
    if _impl is _pykernels:
        return _pykernels.af_grid(*args, float(T), taus, omegas)
    return _impl.af_grid(*args, float(T), taus, omegas,
                         threads or default_threads())


def hungarian_max(Y):
    return _impl.hungarian_max(Y)


def detect_batch(X, M: int):
    return _impl.detect_batch(X, int(M))


af_points = _pykernels.af_points
