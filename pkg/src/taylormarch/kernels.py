"""Hot numerical kernels: stencil application and SOR relaxation sweeps.

Every kernel has two interchangeable implementations with identical
semantics and accumulation order (so results are bit-identical):

* ``*_loop`` -- explicit loops, compiled with numba when enabled,
* ``*_np``   -- vectorized pure-numpy fallback.

The module-level names (``stencil_1d``, ``sor_sweep_2d``, ...) are bound to
one backend at import time via :mod:`taylormarch._accel`.  Use
``get_implementations("numpy"|"numba")`` to reach a specific backend, e.g.
from ``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import numpy as np

from ._accel import NUMBA_ENABLED, njit

# ---------------------------------------------------------------------------
# stencil application
# ---------------------------------------------------------------------------


def _stencil_1d_loop(vals, weights, offsets, lo, hi, out):
    for i in range(lo, hi):
        acc = 0.0
        for m in range(weights.shape[0]):
            acc += weights[m] * vals[i + offsets[m]]
        out[i] = acc


def _stencil_1d_np(vals, weights, offsets, lo, hi, out):
    acc = np.zeros(hi - lo)
    for m in range(weights.shape[0]):
        o = offsets[m]
        acc += weights[m] * vals[lo + o : hi + o]
    out[lo:hi] = acc


def _stencil_2d_axis0_loop(vals, weights, offsets, lo0, hi0, lo1, hi1, out):
    for i in range(lo0, hi0):
        for j in range(lo1, hi1):
            acc = 0.0
            for m in range(weights.shape[0]):
                acc += weights[m] * vals[i + offsets[m], j]
            out[i, j] = acc


def _stencil_2d_axis0_np(vals, weights, offsets, lo0, hi0, lo1, hi1, out):
    acc = np.zeros((hi0 - lo0, hi1 - lo1))
    for m in range(weights.shape[0]):
        o = offsets[m]
        acc += weights[m] * vals[lo0 + o : hi0 + o, lo1:hi1]
    out[lo0:hi0, lo1:hi1] = acc


def _stencil_2d_axis1_loop(vals, weights, offsets, lo0, hi0, lo1, hi1, out):
    for i in range(lo0, hi0):
        for j in range(lo1, hi1):
            acc = 0.0
            for m in range(weights.shape[0]):
                acc += weights[m] * vals[i, j + offsets[m]]
            out[i, j] = acc


def _stencil_2d_axis1_np(vals, weights, offsets, lo0, hi0, lo1, hi1, out):
    acc = np.zeros((hi0 - lo0, hi1 - lo1))
    for m in range(weights.shape[0]):
        o = offsets[m]
        acc += weights[m] * vals[lo0:hi0, lo1 + o : hi1 + o]
    out[lo0:hi0, lo1:hi1] = acc


# ---------------------------------------------------------------------------
# red-black SOR sweeps for the compact (2nd-order) Laplacian
# ---------------------------------------------------------------------------


def _sor_sweep_1d_loop(p, rhs, cx, omega, lo, hi, parity):
    dinv = 1.0 / (2.0 * cx)
    delta = 0.0
    for i in range(lo + ((lo + parity) % 2 != 0), hi, 2):
        new = ((p[i - 1] + p[i + 1]) * cx - rhs[i]) * dinv
        change = omega * (new - p[i])
        p[i] += change
        if abs(change) > delta:
            delta = abs(change)
    return delta


def _sor_sweep_1d_np(p, rhs, cx, omega, lo, hi, parity):
    dinv = 1.0 / (2.0 * cx)
    start = lo + ((lo + parity) % 2 != 0)
    sl = slice(start, hi, 2)
    new = ((p[start - 1 : hi - 1 : 2] + p[start + 1 : hi + 1 : 2]) * cx - rhs[sl]) * dinv
    change = omega * (new - p[sl])
    p[sl] += change
    return float(np.max(np.abs(change))) if change.size else 0.0


def _sor_sweep_2d_loop(p, rhs, cx, cy, omega, lo0, hi0, lo1, hi1, parity):
    dinv = 1.0 / (2.0 * cx + 2.0 * cy)
    delta = 0.0
    for i in range(lo0, hi0):
        jstart = lo1 + ((i + lo1 + parity) % 2 != 0)
        for j in range(jstart, hi1, 2):
            new = ((p[i - 1, j] + p[i + 1, j]) * cx + (p[i, j - 1] + p[i, j + 1]) * cy - rhs[i, j]) * dinv
            change = omega * (new - p[i, j])
            p[i, j] += change
            if abs(change) > delta:
                delta = abs(change)
    return delta


def _sor_sweep_2d_np(p, rhs, cx, cy, omega, lo0, hi0, lo1, hi1, parity):
    dinv = 1.0 / (2.0 * cx + 2.0 * cy)
    delta = 0.0
    for i in range(lo0, hi0):
        jstart = lo1 + ((i + lo1 + parity) % 2 != 0)
        sl = slice(jstart, hi1, 2)
        if jstart >= hi1:
            continue
        new = (
            (p[i - 1, sl] + p[i + 1, sl]) * cx
            + (p[i, jstart - 1 : hi1 - 1 : 2] + p[i, jstart + 1 : hi1 + 1 : 2]) * cy
            - rhs[i, sl]
        ) * dinv
        change = omega * (new - p[i, sl])
        p[i, sl] += change
        if change.size:
            delta = max(delta, float(np.max(np.abs(change))))
    return delta


# ---------------------------------------------------------------------------
# backend wiring
# ---------------------------------------------------------------------------

_LOOP_KERNELS = {
    "stencil_1d": _stencil_1d_loop,
    "stencil_2d_axis0": _stencil_2d_axis0_loop,
    "stencil_2d_axis1": _stencil_2d_axis1_loop,
    "sor_sweep_1d": _sor_sweep_1d_loop,
    "sor_sweep_2d": _sor_sweep_2d_loop,
}

_NUMPY_KERNELS = {
    "stencil_1d": _stencil_1d_np,
    "stencil_2d_axis0": _stencil_2d_axis0_np,
    "stencil_2d_axis1": _stencil_2d_axis1_np,
    "sor_sweep_1d": _sor_sweep_1d_np,
    "sor_sweep_2d": _sor_sweep_2d_np,
}

_numba_cache: dict[str, object] = {}


def _numba_kernels() -> dict:
    if not _numba_cache:
        for name, fn in _LOOP_KERNELS.items():
            _numba_cache[name] = njit(cache=True)(fn)
    return _numba_cache


def get_implementations(backend: str) -> dict:
    """Return the kernel dict for an explicit backend ("numpy" or "numba")."""
    if backend == "numpy":
        return dict(_NUMPY_KERNELS)
    if backend == "numba":
        import numba  # noqa: F401  -- explicit request, fail if missing

        from numba import njit as _njit

        out = {}
        for name, fn in _LOOP_KERNELS.items():
            out[name] = _njit(cache=True)(fn)
        return out
    raise ValueError(f"unknown backend {backend!r}")


if NUMBA_ENABLED:
    _active = _numba_kernels()
else:
    _active = _NUMPY_KERNELS

stencil_1d = _active["stencil_1d"]
stencil_2d_axis0 = _active["stencil_2d_axis0"]
stencil_2d_axis1 = _active["stencil_2d_axis1"]
sor_sweep_1d = _active["sor_sweep_1d"]
sor_sweep_2d = _active["sor_sweep_2d"]

BACKEND = "numba" if NUMBA_ENABLED else "numpy"
