"""Boundary policies and ghost-layer filling.

Policies are attached per face.  Each policy knows how to produce the policy
governing the k-th temporal derivative of the same field (``level_policy``),
which is what the Taylor cascade applies to derived level fields: the time
derivative of a Dirichlet value is the Dirichlet value of the time
derivative, symmetry and extrapolation propagate unchanged.

Periodic axes need no policy; ghosts wrap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fields import Field


# ---------------------------------------------------------------------------
# time-dependent scalars with derivatives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeFunction:
    """A scalar function of time bundled with its time derivatives.

    ``fn`` and each entry of ``derivs`` may be a float (constant) or a
    callable of t.  Constants have all derivatives zero implicitly; for
    non-constant functions the cascade can only go as deep as the supplied
    derivatives.
    """

    fn: object
    derivs: tuple = ()

    def __call__(self, t: float) -> float:
        return float(self.fn(t)) if callable(self.fn) else float(self.fn)

    def deriv(self, k: int) -> "TimeFunction":
        if k == 0:
            return self
        if self.derivs:
            return TimeFunction(self.derivs[0], self.derivs[1:]).deriv(k - 1)
        if not callable(self.fn):
            return TimeFunction(0.0)
        raise ValueError(
            f"time function supplies {len(self.derivs)} derivatives; level {k} requested"
        )


def as_time_function(value) -> TimeFunction:
    if isinstance(value, TimeFunction):
        return value
    if callable(value):
        return TimeFunction(value)
    return TimeFunction(float(value))


def exponential_time_function(amplitude: float, rate: float, depth: int = 8) -> TimeFunction:
    """amplitude * exp(rate * t) with analytic derivatives rate**k * value."""
    import math

    def make(k):
        return lambda t, _k=k: amplitude * rate**_k * math.exp(rate * t)

    return TimeFunction(make(0), tuple(make(k) for k in range(1, depth + 1)))


# ---------------------------------------------------------------------------
# extrapolation rows (exact rational Lagrange coefficients)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _lagrange_row(degree: int, eval_at: int) -> tuple[float, ...]:
    """Coefficients c_m with  p(eval_at) = sum_m c_m f(m)  for the polynomial
    of ``degree`` interpolating f at nodes 0..degree."""
    xs = list(range(degree + 1))
    row = []
    for m in xs:
        c = Fraction(1)
        for j in xs:
            if j != m:
                c *= Fraction(eval_at - j, m - j)
        row.append(float(c))
    return tuple(row)


# ---------------------------------------------------------------------------
# policies
# ---------------------------------------------------------------------------


class BoundaryPolicy:
    def level_policy(self, k: int) -> "BoundaryPolicy":
        return self

    def fill(self, arr: np.ndarray, g: int, n: int, side: str, h: float, t: float,
             face_coords: np.ndarray | None = None) -> None:
        """Fill the ghost slots (and, for Dirichlet, the boundary node) of
        ``arr`` along its leading axis.  ``arr`` is oriented so that index g
        is the boundary node of this face and indices g-1, g-2, ... are its
        ghosts (callers hand in a flipped view for 'hi' faces)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Dirichlet(BoundaryPolicy):
    """Prescribed boundary value; ghosts extrapolate the interior polynomial
    through the boundary value so boundary stencils keep nominal accuracy."""

    value: object = 0.0
    degree: int = 3

    def level_policy(self, k: int) -> "Dirichlet":
        return Dirichlet(as_time_function(self.value).deriv(k), self.degree)

    def fill(self, arr, g, n, side, h, t, face_coords=None) -> None:
        val = as_time_function(self.value)(t)
        arr[g] = val
        d = min(self.degree, n - 1)
        for j in range(1, g + 1):
            row = _lagrange_row(d, -j)
            acc = row[0] * arr[g]
            for m in range(1, d + 1):
                acc = acc + row[m] * arr[g + m]
            arr[g - j] = acc


@dataclass(frozen=True)
class Neumann(BoundaryPolicy):
    """Prescribed outward-axis gradient dU/dx at the boundary node (signed
    along the axis coordinate, not the outward normal)."""

    gradient: object = 0.0

    def level_policy(self, k: int) -> "Neumann":
        return Neumann(as_time_function(self.gradient).deriv(k))

    def fill(self, arr, g, n, side, h, t, face_coords=None) -> None:
        gval = as_time_function(self.gradient)(t)
        sgn = -1.0 if side == "lo" else 1.0
        for j in range(1, g + 1):
            arr[g - j] = arr[g + j] + sgn * 2.0 * j * h * gval


@dataclass(frozen=True)
class Symmetry(BoundaryPolicy):
    """Even reflection about the boundary node."""

    def fill(self, arr, g, n, side, h, t, face_coords=None) -> None:
        for j in range(1, g + 1):
            arr[g - j] = arr[g + j]


@dataclass(frozen=True)
class Extrapolation(BoundaryPolicy):
    """Ghosts continue the interior polynomial; boundary node untouched."""

    degree: int = 3

    def fill(self, arr, g, n, side, h, t, face_coords=None) -> None:
        d = min(self.degree, n - 1)
        row_cache = [_lagrange_row(d, -j) for j in range(1, g + 1)]
        for j, row in zip(range(1, g + 1), row_cache):
            acc = row[0] * arr[g]
            for m in range(1, d + 1):
                acc = acc + row[m] * arr[g + m]
            arr[g - j] = acc


@dataclass(frozen=True)
class DirichletFace(BoundaryPolicy):
    """Dirichlet value varying along the face: fn(face_coords, t) -> array.

    ``tau_derivs`` maps level k to the k-th time derivative function with the
    same signature (used by the Taylor cascade's boundary injection).
    """

    fn: object = None
    tau_derivs: object = None  # callable (k) -> callable(coords, t)
    degree: int = 3

    def level_policy(self, k: int) -> "DirichletFace":
        if self.tau_derivs is None:
            raise ValueError("face Dirichlet needs tau_derivs for cascade levels")
        return DirichletFace(self.tau_derivs(k), self.tau_derivs, self.degree)

    def fill(self, arr, g, n, side, h, t, face_coords=None) -> None:
        vals = np.asarray(self.fn(face_coords, t), dtype=float)
        arr[g] = vals
        d = min(self.degree, n - 1)
        for j in range(1, g + 1):
            row = _lagrange_row(d, -j)
            acc = row[0] * arr[g]
            for m in range(1, d + 1):
                acc = acc + row[m] * arr[g + m]
            arr[g - j] = acc


class MissingPolicyError(ValueError):
    """A non-periodic face has no boundary policy."""


# ---------------------------------------------------------------------------
# ghost filling
# ---------------------------------------------------------------------------


def _oriented_view(values: np.ndarray, axis: int, side: str) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    if side == "hi":
        v = v[::-1]
    return v


def _fill_axis(values: np.ndarray, grid, axis: int, policies, t: float) -> None:
    g = grid.ghost_width
    n = grid.shape[axis] if grid.ndim > 1 else grid.shape[0]
    h = grid.spacing(axis)
    if grid.is_periodic(axis):
        v = np.moveaxis(values, axis, 0)
        for j in range(1, g + 1):
            v[g - j] = v[g + n - j]
            v[g + n - 1 + j] = v[g + j - 1]
        return
    for side in ("lo", "hi"):
        key = (axis, side)
        pol = policies.get(key) if policies else None
        if pol is None:
            raise MissingPolicyError(f"no boundary policy for face {key}")
        view = _oriented_view(values, axis, side)
        coords = None
        if grid.ndim == 2:
            other = 1 - axis
            go = grid.ghost_width
            full = np.empty(view.shape[1])
            inner = grid.coords(other)
            # clamp face coordinates into the transverse ghost band
            full[:go] = inner[0]
            full[go : go + len(inner)] = inner
            full[go + len(inner):] = inner[-1]
            coords = full
        pol.fill(view, g, n, side, h, t, face_coords=coords)


def fill_ghosts(f: Field, policies=None, t: float = 0.0) -> Field:
    """Return a copy of ``f`` with ghosts (and Dirichlet boundary nodes) set.

    ``policies`` maps (axis, side) -> BoundaryPolicy for every non-periodic
    face; for 1-D grids the shorthand {"lo": ..., "hi": ...} is accepted.
    """
    if policies and not isinstance(next(iter(policies)), tuple):
        policies = {(0, side): pol for side, pol in policies.items()}
    out = f.copy()
    for axis in range(f.grid.ndim):
        _fill_axis(out.values, f.grid, axis, policies, t)
    out.ghosts_filled = True
    return out


def level_policies(policies, k: int):
    """Map every policy in a face dict to its level-k counterpart."""
    if policies is None:
        return None
    if not isinstance(next(iter(policies)), tuple):
        policies = {(0, side): pol for side, pol in policies.items()}
    return {key: pol.level_policy(k) for key, pol in policies.items()}
