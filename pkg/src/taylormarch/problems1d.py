"""One-dimensional model problems: linear advection and viscous Burgers.

Burgers levels come from the generic recursion

    G_1     = nu * d2(U)/dx2 - U dU/dx
    G_{k+1} = nu * d2(G_k)/dx2 - d/dx[ (1/2) sum_{j=0..k} C(k,j) G_j G_{k-j} ],  k >= 1,

i.e. the quadratic term is time-differentiated as a product *before* the
spatial derivative is applied, which is exactly how the second level's
compact form d2f/dx2 - d(fU)/dx arises.  Levels 1-2 of the recursion
therefore coincide with the hand-written forms (burgers_rhs /
burgers_level2) to round-off, and the recursion extends the cascade to any
order up to ``max_order``.  Advection levels are repeated first derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .boundary import (
    BoundaryPolicy,
    Dirichlet,
    Extrapolation,
    Symmetry,
    as_time_function,
    fill_ghosts,
    level_policies,
)
from .engine import CascadeProblem
from .fields import Field
from .grids import Grid1D
from .stencils import apply_derivative


# ---------------------------------------------------------------------------
# Burgers right-hand sides (nodewise, on ghost-filled fields)
# ---------------------------------------------------------------------------


def burgers_rhs(u: Field, nu: float, p: int = 2) -> Field:
    """dU/dt = nu * U_xx - U * U_x."""
    d1 = apply_derivative(u, 1, p=p)
    d2 = apply_derivative(u, 2, p=p)
    return Field(u.grid, nu * d2.values - u.values * d1.values, name="dudt")


def burgers_level2(u: Field, f: Field, nu: float, p: int = 2) -> Field:
    """d2U/dt2 = nu * f_xx - (f U)_x  with f = dU/dt (compact form)."""
    f2 = apply_derivative(f, 2, p=p)
    fu = Field(u.grid, f.values * u.values, ghosts_filled=True)
    d_fu = apply_derivative(fu, 1, p=p)
    return Field(u.grid, nu * f2.values - d_fu.values, name="d2udt2")


def burgers_level2_expanded(u: Field, p: int = 2) -> Field:
    """The fully expanded second level for nu = 1:

        U_xxxx - 2 U U_xxx + (U^2 - 4 U_x) U_xx + 2 U (U_x)^2
    """
    d1 = apply_derivative(u, 1, p=p).values
    d2 = apply_derivative(u, 2, p=p).values
    d3 = apply_derivative(u, 3, p=p).values
    d4 = apply_derivative(u, 4, p=p).values
    uu = u.values
    vals = d4 - 2.0 * uu * d3 + (uu * uu - 4.0 * d1) * d2 + 2.0 * uu * d1 * d1
    return Field(u.grid, vals, name="d2udt2_expanded")


def burgers_levels_leibniz(u: Field, nu: float, q: int, p: int = 2,
                           refill=None, form: str = "compact") -> list[Field]:
    """Levels 1..q of the Burgers cascade by the product-rule recursion.

    ``form`` picks the discretization of the time-differentiated quadratic
    term (see _quadratic_term); "compact" reproduces the compact second level
    d2f/dx2 - d(fU)/dx to round-off.  ``refill(field, k)`` must return the
    level-k field with ghosts filled; on periodic grids it may be omitted.
    """
    if refill is None:
        if not u.grid.periodic:
            raise ValueError("non-periodic Burgers cascade needs a refill callback")
        refill = lambda f, k: fill_ghosts(f)  # noqa: E731
    levels = [u]
    for k in range(q):
        acc = nu * apply_derivative(levels[k], 2, p=p).values
        acc = acc - _quadratic_term(levels, k, p, form)
        nxt = refill(Field(u.grid, acc, name=f"G{k + 1}"), k + 1)
        levels.append(nxt)
    return levels[1:]


def _quadratic_term(levels: list[Field], k: int, p: int, form: str):
    """k-th time derivative of the discrete U dU/dx term.

    form="compact": for k >= 1 differentiate the product in time first and
    apply d/dx to (1/2) sum C(k,j) G_j G_{k-j} -- the structure behind the
    compact second level d(fU)/dx, matching it to round-off.

    form="flow": expand by the product rule, sum C(k,j) G_j d(G_{k-j})/dx.
    This is the exact k-th derivative of the *semidiscrete* flow (the
    directional derivative of the discrete rhs along itself), so marches
    built on it show clean temporal convergence orders.

    Both are consistent discretizations of the same continuum object and
    differ at the stencil accuracy order.
    """
    u = levels[0]
    if k == 0:
        return u.values * apply_derivative(u, 1, p=p).values
    if form == "compact":
        prod = 0.5 * sum(comb(k, j) * levels[j].values * levels[k - j].values
                         for j in range(k + 1))
        pf = Field(u.grid, prod, ghosts_filled=True)
        return apply_derivative(pf, 1, p=p).values
    if form == "flow":
        acc = 0.0
        for j in range(k + 1):
            dj = apply_derivative(levels[k - j], 1, p=p)
            acc = acc + comb(k, j) * levels[j].values * dj.values
        return acc
    raise ValueError(f"unknown quadratic-term form {form!r}")


def advection_rhs(u: Field, p: int = 2) -> Field:
    """du/dt = du/dx."""
    out = apply_derivative(u, 1, p=p)
    out.name = "dudt"
    return out


# ---------------------------------------------------------------------------
# cascade problems
# ---------------------------------------------------------------------------


@dataclass
class BurgersProblem(CascadeProblem):
    """Viscous Burgers on a Grid1D; nu = 1 recovers the unit-viscosity form.

    The marched cascade uses the "flow" form of the quadratic term (exact
    derivatives of the semidiscrete system), which is what keeps observed
    temporal orders at the Taylor order.
    """

    grid: Grid1D
    nu: float = 1.0
    initial: object = None
    bc_lo: BoundaryPolicy | None = None
    bc_hi: BoundaryPolicy | None = None
    p: int = 2
    max_order: int = 5
    form: str = "flow"

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("viscosity must be non-negative")
        if not self.grid.periodic and (self.bc_lo is None or self.bc_hi is None):
            raise ValueError("non-periodic Burgers needs a boundary policy at each end")

    def _policies(self):
        if self.grid.periodic:
            return None
        return {(0, "lo"): self.bc_lo, (0, "hi"): self.bc_hi}

    def initial_state(self) -> Field:
        return Field.from_function(self.grid, self.initial, name="U")

    def fill(self, state: Field, t: float) -> Field:
        return fill_ghosts(state, self._policies(), t)

    def level(self, k: int, state: Field, levels: list, t: float, ctx) -> Field:
        acc = self.nu * apply_derivative(levels[k - 1], 2, p=self.p).values
        acc = acc - _quadratic_term(levels, k - 1, self.p, self.form)
        out = Field(self.grid, acc, name=f"G{k}")
        return fill_ghosts(out, level_policies(self._policies(), k), t)


@dataclass
class AdvectionProblem(CascadeProblem):
    """du/dt = du/dx with inflow value u(0, t) prescribed at x = 0."""

    grid: Grid1D
    initial: object = None
    inflow: object = 0.0
    p: int = 2
    max_order: int = 5
    extrap_degree: int = 3

    def _policies(self, k: int = 0):
        if self.grid.periodic:
            return None
        inflow = as_time_function(self.inflow).deriv(k)
        return {(0, "lo"): Dirichlet(inflow, degree=self.extrap_degree),
                (0, "hi"): Extrapolation(self.extrap_degree)}

    def initial_state(self) -> Field:
        return Field.from_function(self.grid, self.initial, name="u")

    def fill(self, state: Field, t: float) -> Field:
        return fill_ghosts(state, self._policies(0), t)

    def level(self, k: int, state: Field, levels: list, t: float, ctx) -> Field:
        out = apply_derivative(levels[k - 1], 1, p=self.p)
        out.name = f"G{k}"
        return fill_ghosts(out, self._policies(k), t)


def constant_burgers(grid: Grid1D, value: float = 1.0, nu: float = 1.0, p: int = 2) -> BurgersProblem:
    """The constant-state benchmark: U(x, 0) = value with symmetry ends
    (realizing the zero-slope, zero-curvature conditions at x = 0)."""
    return BurgersProblem(
        grid=grid,
        nu=nu,
        initial=lambda x: value + 0.0 * x,
        bc_lo=Symmetry(),
        bc_hi=Symmetry(),
        p=p,
    )
