"""Finite-difference stencils of configurable derivative and accuracy order.

Coefficients come from imposing polynomial exactness: a stencil for the k-th
derivative with offsets s_j must reproduce d^k x^m / dx^k at 0 for every
monomial degree m up to the window size minus one.  The Vandermonde system
is solved exactly over rationals so the only floating error left is the
final float64 conversion.

Central stencils use the minimal symmetric window (radius (k + p - 1) // 2,
which achieves accuracy p by parity).  Near-boundary nodes get biased
windows of k + p points with the same polynomial exactness, never a
reduced-order fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fields import Field, GhostError
from . import kernels

#: hard cap on stencil window size; a request beyond this means the grid (or
#: ghost layer) is too coarse for the Taylor order asked for.
MAX_STENCIL_POINTS = 16


class StencilWidthError(ValueError):
    """Requested stencil cannot fit: k + p too large or ghosts too narrow."""


@dataclass(frozen=True)
class StencilSpec:
    derivative_order: int
    accuracy_order: int
    offsets: tuple[int, ...]
    weights: tuple[float, ...]  # per unit spacing; scale by h**-k on use

    def scaled_weights(self, h: float) -> np.ndarray:
        return np.asarray(self.weights) / h**self.derivative_order

    def exactness_degree(self) -> int:
        return self.derivative_order + self.accuracy_order - 1

    def max_monomial_error(self, h: float = 0.1) -> float:
        """Worst relative defect applying the stencil to monomials it must be
        exact on (evaluated at the stencil node, i.e. x = 0)."""
        k = self.derivative_order
        offs = np.asarray(self.offsets)
        w = self.scaled_weights(h)
        worst = 0.0
        for m in range(self.exactness_degree() + 1):
            got = float(w @ (offs * h) ** m)
            want = float(math.factorial(k)) if m == k else 0.0
            scale = max(abs(want), math.factorial(k))
            worst = max(worst, abs(got - want) / scale)
        return worst


def _solve_exactness(offsets: tuple[int, ...], k: int) -> tuple[float, ...]:
    """Exact rational solve of the polynomial-exactness system."""
    m = len(offsets)
    a = [[Fraction(off) ** i for off in offsets] for i in range(m)]
    b = [Fraction(math.factorial(k)) if i == k else Fraction(0) for i in range(m)]
    # Gaussian elimination with partial pivoting over Fraction
    for col in range(m):
        piv = max(range(col, m), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            raise ValueError(f"degenerate stencil offsets {offsets}")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        b[col] *= inv
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                b[r] -= f * b[col]
    return tuple(float(v) for v in b)


def central_radius(k: int, p: int) -> int:
    return (k + p - 1) // 2


@lru_cache(maxsize=None)
def make_stencil(k: int, p: int, offsets: tuple[int, ...] | None = None) -> StencilSpec:
    """Build a stencil for the k-th derivative at accuracy order p.

    With ``offsets=None`` a central stencil is returned (p must be even).
    Explicit offsets build a biased stencil evaluated at offset 0; the window
    must contain at least k + p points.
    """
    if k < 1:
        raise ValueError("derivative order k must be >= 1")
    if offsets is None:
        if p < 2 or p % 2 != 0:
            raise ValueError("central stencils need even accuracy order p >= 2")
        r = central_radius(k, p)
        if 2 * r + 1 > MAX_STENCIL_POINTS:
            raise StencilWidthError(
                f"central stencil for (k={k}, p={p}) needs {2 * r + 1} points "
                f"(cap {MAX_STENCIL_POINTS}); grid too coarse for this Taylor order"
            )
        offsets = tuple(range(-r, r + 1))
    else:
        offsets = tuple(int(o) for o in offsets)
        if len(offsets) < k + p:
            raise ValueError(f"biased stencil for (k={k}, p={p}) needs >= {k + p} points")
        if len(offsets) > MAX_STENCIL_POINTS:
            raise StencilWidthError(
                f"stencil window of {len(offsets)} points exceeds cap {MAX_STENCIL_POINTS}"
            )
    weights = _solve_exactness(offsets, k)
    return StencilSpec(k, p, offsets, weights)


def biased_stencil(k: int, p: int, position: int) -> StencilSpec:
    """Stencil on a window of k + p consecutive nodes, evaluated at node
    ``position`` within the window (0 = leftmost)."""
    m = k + p
    if not 0 <= position < m:
        raise ValueError("position must lie inside the window")
    return make_stencil(k, p, offsets=tuple(range(-position, m - position)))


# ---------------------------------------------------------------------------
# application to fields
# ---------------------------------------------------------------------------


def _apply_central(values: np.ndarray, spec: StencilSpec, h: float, axis: int,
                   lo: int, hi: int, out: np.ndarray) -> None:
    w = spec.scaled_weights(h)
    offs = np.asarray(spec.offsets, dtype=np.int64)
    if values.ndim == 1:
        kernels.stencil_1d(values, w, offs, lo, hi, out)
    elif axis == 0:
        kernels.stencil_2d_axis0(values, w, offs, lo, hi, 0, values.shape[1], out)
    else:
        kernels.stencil_2d_axis1(values, w, offs, 0, values.shape[0], lo, hi, out)


def apply_derivative(f: Field, k: int, axis: int = 0, p: int = 2,
                     boundary: str = "ghost") -> Field:
    """k-th spatial derivative of a field along ``axis`` at accuracy order p.

    boundary="ghost": central stencils everywhere; the ghost layer must be
    filled and wide enough.  boundary="onesided": no ghosts touched; nodes
    whose central window would leave the interior use biased stencils of the
    same accuracy built from interior values only.
    """
    grid = f.grid
    h = grid.spacing(axis)
    g = grid.ghost_width
    n = grid.shape[axis] if grid.ndim > 1 else grid.shape[0]
    spec = make_stencil(k, p)
    r = central_radius(k, p)
    out = np.zeros_like(f.values)

    if boundary == "ghost" or grid.is_periodic(axis):
        if not f.ghosts_filled:
            raise GhostError(
                f"derivative of {f.name or 'field'} needs filled ghosts; call fill_ghosts first"
            )
        if r > g:
            raise StencilWidthError(
                f"(k={k}, p={p}) stencil radius {r} exceeds ghost width {g}; "
                "configure a wider ghost layer for this Taylor order"
            )
        _apply_central(f.values, spec, h, axis, g, g + n, out)
    elif boundary == "onesided":
        lo, hi = g + r, g + n - r
        if hi > lo:
            _apply_central(f.values, spec, h, axis, lo, hi, out)
        m = k + p
        if m > n:
            raise StencilWidthError(
                f"axis has {n} nodes but a one-sided (k={k}, p={p}) stencil needs {m}"
            )
        for node in list(range(0, min(r, n))) + list(range(max(n - r, 0), n)):
            pos = node if node < r else m - (n - node)
            bs = biased_stencil(k, p, pos)
            wb = bs.scaled_weights(h)
            idx = g + node + np.asarray(bs.offsets)
            if grid.ndim == 1 or f.values.ndim == 1:
                out[g + node] = wb @ f.values[idx]
            elif axis == 0:
                out[g + node, :] = wb @ f.values[idx, :]
            else:
                out[:, g + node] = f.values[:, idx] @ wb
    else:
        raise ValueError(f"unknown boundary mode {boundary!r}")

    res = Field(grid, out, name=f"d{k}_{f.name}" if f.name else f"d{k}")
    return res


def derivative_at_boundary(f: Field, k: int, side: str, p: int = 2, axis: int = 0):
    """One-sided k-th derivative evaluated at the boundary node itself,
    built purely from interior values (used e.g. for boundary-flux extraction)."""
    grid = f.grid
    if grid.is_periodic(axis):
        raise ValueError("boundary derivative undefined on a periodic axis")
    h = grid.spacing(axis)
    g = grid.ghost_width
    n = grid.shape[axis] if grid.ndim > 1 else grid.shape[0]
    m = k + p
    if m > n:
        raise StencilWidthError(f"axis has {n} nodes but the stencil needs {m}")
    if side == "lo":
        spec = biased_stencil(k, p, 0)
        idx = g + np.asarray(spec.offsets)
    elif side == "hi":
        spec = biased_stencil(k, p, m - 1)
        idx = g + n - 1 + np.asarray(spec.offsets)
    else:
        raise ValueError("side must be 'lo' or 'hi'")
    w = spec.scaled_weights(h)
    if f.values.ndim == 1:
        return float(w @ f.values[idx])
    if axis == 0:
        return w @ f.values[idx, g : g + grid.shape[1]]
    return f.values[g : g + grid.shape[0], idx] @ w
