"""Unsteady convection-diffusion of temperature in Stokes flow around a
sphere, on the dimensionless (rho, theta) grid.

The spatial operator (dT/dtau = L T) is

    L = d2/drho2 + [2/rho - (Pe/2) cos(theta) (1 - 3/(2 rho) + 1/(2 rho^3))] d/drho
      + (1/rho^2) d2/dtheta2
      + [cot(theta)/rho^2 + (Pe sin(theta)/(2 rho)) (1 - 3/(4 rho) - 1/(4 rho^3))] d/dtheta.

L is linear and tau-independent, so cascade level k is simply L^k applied to
the current field, with the boundary row at rho = 1 injected from the k-th
tau-derivative of the surface temperature.  At the poles the singular
cot(theta) d/dtheta term is replaced by its limit d2/dtheta2 (the symmetry
condition makes dT/dtheta vanish there), and the Pe convection term carries
sin(theta) = 0.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .boundary import Dirichlet, DirichletFace, Symmetry, fill_ghosts
from .engine import CascadeProblem, InstabilityError, StepControl, march
from .fields import Field
from .grids import SphericalGrid2D
from .stencils import apply_derivative

TABLE_RADII = (1.0, 2.0, 5.0, 8.0)
TABLE_ANGLES = tuple(j * math.pi / 5.0 for j in range(8))  # 0 .. 7 pi/5
E_CUBED = math.exp(3.0)


@dataclass(frozen=True)
class SurfaceTemperature:
    """T_s(theta, tau) with analytic tau-derivatives for the cascade."""

    fn: object
    rate: float | None = None  # separable exponential rate, if any

    def __call__(self, theta, tau):
        return self.fn(theta, tau)

    def tau_deriv(self, k: int):
        if k == 0:
            return self.fn
        if self.rate is None:
            raise ValueError("surface temperature supplies no tau-derivatives; "
                             "provide a separable exponential history or derivatives")
        r = self.rate

        def dk(theta, tau, _k=k):
            return r**_k * self.fn(theta, tau)

        return dk


def cos_exp_surface(rate: float = 100.0) -> SurfaceTemperature:
    """The benchmark history |cos(theta)| exp(rate * tau)."""

    def fn(theta, tau):
        return np.abs(np.cos(theta)) * math.exp(rate * tau)

    return SurfaceTemperature(fn, rate=rate)


# ---------------------------------------------------------------------------
# spatial operator
# ---------------------------------------------------------------------------


def _operator_coefficients(grid: SphericalGrid2D, pe: float):
    """Interior-node coefficient arrays (A, B, C2) with the pole columns of B
    zeroed and C2 doubled there (regularized cot term)."""
    rho = grid.coords(0)[:, None]
    theta = grid.coords(1)[None, :]
    a = 2.0 / rho - 0.5 * pe * np.cos(theta) * (1.0 - 1.5 / rho + 0.5 / rho**3)
    c2 = np.ones_like(theta) / rho**2
    b = np.zeros(grid.shape)
    interior_theta = slice(1, grid.n_theta)
    th = theta[0, interior_theta]
    b[:, interior_theta] = (np.cos(th) / np.sin(th)) / rho**2 \
        + pe * np.sin(th) / (2.0 * rho) * (1.0 - 0.75 / rho - 0.25 / rho**3)
    c2 = np.broadcast_to(c2, grid.shape).copy()
    c2[:, 0] *= 2.0
    c2[:, -1] *= 2.0
    a = np.broadcast_to(a, grid.shape).copy()
    return a, b, c2


def sphere_rhs(T: Field, pe: float, p: int = 2, coeffs=None) -> Field:
    """dT/dtau = L T on a ghost-filled field."""
    grid = T.grid
    if coeffs is None:
        coeffs = _operator_coefficients(grid, pe)
    a, b, c2 = coeffs
    d1r = apply_derivative(T, 1, axis=0, p=p).interior
    d2r = apply_derivative(T, 2, axis=0, p=p).interior
    d1t = apply_derivative(T, 1, axis=1, p=p).interior
    d2t = apply_derivative(T, 2, axis=1, p=p).interior
    vals = d2r + a * d1r + c2 * d2t + b * d1t
    return Field.from_interior(grid, vals, name="dTdtau")


@dataclass
class SphereProblem(CascadeProblem):
    """Cascade problem for the sphere benchmark (levels are operator powers)."""

    grid: SphericalGrid2D = None
    pe: float = 1.0
    ts: SurfaceTemperature = dc_field(default_factory=cos_exp_surface)
    p: int = 2
    max_order: int = 5

    def __post_init__(self):
        self._coeffs = _operator_coefficients(self.grid, self.pe)

    def _policies(self, k: int):
        surf = self.ts.tau_deriv(k)
        return {
            (0, "lo"): DirichletFace(lambda coords, t, f=surf: f(coords, t),
                                     tau_derivs=self.ts.tau_deriv),
            (0, "hi"): Dirichlet(0.0),
            (1, "lo"): Symmetry(),
            (1, "hi"): Symmetry(),
        }

    def initial_state(self) -> Field:
        return Field.zeros(self.grid, name="T")

    def fill(self, state: Field, t: float) -> Field:
        return fill_ghosts(state, self._policies(0), t)

    def level(self, k: int, state: Field, levels: list, t: float, ctx) -> Field:
        out = sphere_rhs(levels[k - 1], self.pe, p=self.p, coeffs=self._coeffs)
        out.name = f"G{k}"
        return fill_ghosts(out, self._policies(k), t)


# ---------------------------------------------------------------------------
# benchmark table reproduction
# ---------------------------------------------------------------------------


@dataclass
class TableCaseConfig:
    pe: float = 1.0
    rho_max: float = 12.0
    n_rho: int = 44
    n_theta: int = 20
    dt: float = 2.0e-4
    tau_end: float = 0.03
    orders: tuple = (1, 2, 3)
    radii: tuple = TABLE_RADII
    angles: tuple = TABLE_ANGLES
    surface_rate: float = 100.0
    p: int = 2

    def grid(self) -> SphericalGrid2D:
        return SphericalGrid2D(rho_max=self.rho_max, n_rho=self.n_rho,
                               n_theta=self.n_theta, ghost_width=max(1, (self.p + 1) // 2))

    def n_steps(self) -> int:
        n = round(self.tau_end / self.dt)
        if abs(n * self.dt - self.tau_end) > 1e-12:
            raise ValueError("dt must divide tau_end")
        return n


@dataclass
class TableCaseResult:
    config: TableCaseConfig
    values: dict          # order -> array (len(radii), len(angles))
    timings: dict         # order -> wall seconds
    instabilities: dict   # order -> step index of failure, if any

    def value(self, order: int, r: float, theta: float) -> float:
        i = self.config.radii.index(r)
        j = self.config.angles.index(theta)
        return float(self.values[order][i, j])


def _node_index(coords: np.ndarray, target: float, what: str) -> int:
    i = int(np.argmin(np.abs(coords - target)))
    if abs(coords[i] - target) > 1e-9:
        raise ValueError(f"{what} = {target} does not lie on a grid node")
    return i


def run_table_case(config: TableCaseConfig) -> TableCaseResult:
    """March the benchmark at each requested order and sample the output
    lattice.  Angles beyond pi are obtained from the mirror symmetry
    T(theta) = T(2 pi - theta)."""
    grid = config.grid()
    problem = SphereProblem(grid=grid, pe=config.pe,
                            ts=cos_exp_surface(config.surface_rate), p=config.p)
    rho_idx = [_node_index(grid.coords(0), r, "r") for r in config.radii]
    theta_c = grid.coords(1)
    theta_idx = []
    for ang in config.angles:
        mirrored = ang if ang <= math.pi + 1e-12 else 2.0 * math.pi - ang
        theta_idx.append(_node_index(theta_c, mirrored, "theta"))

    values, timings, instabilities = {}, {}, {}
    control = StepControl(dt=config.dt, order=1, n_steps=config.n_steps())
    for order in config.orders:
        control = StepControl(dt=config.dt, order=order, n_steps=config.n_steps())
        t0 = _time.perf_counter()
        try:
            res = march(problem, problem.initial_state(), control)
        except InstabilityError as exc:
            instabilities[order] = exc.step
            timings[order] = _time.perf_counter() - t0
            continue
        timings[order] = _time.perf_counter() - t0
        interior = res.state.interior
        out = np.empty((len(rho_idx), len(theta_idx)))
        for i, ri in enumerate(rho_idx):
            for j, tj in enumerate(theta_idx):
                out[i, j] = interior[ri, tj]
        values[order] = out
    return TableCaseResult(config=config, values=values, timings=timings,
                           instabilities=instabilities)
