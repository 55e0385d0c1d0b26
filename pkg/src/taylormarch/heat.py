"""Heat conduction into a truncated half-space with a prescribed surface
temperature: the Taylor march, its boundary-flux extraction, the small-time
flux quadrature approximations, and the closed-form deficiency estimates.

The governing equation dT/dt = d2T/dx2 makes every cascade level a pure
spatial derivative: level k is the 2k-th x-derivative of the current field,
with the boundary values of each level injected from the time derivatives of
the surface history.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .boundary import Dirichlet, as_time_function, fill_ghosts
from .engine import CascadeProblem, MarchResult, StepControl, march
from .fields import Field
from .grids import Grid1D
from .quadrature import QuadratureError, kernel_integral
from . import oracles
from .stencils import apply_derivative, derivative_at_boundary

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# problem definition and cascade
# ---------------------------------------------------------------------------


@dataclass
class HeatProblem(CascadeProblem):
    """Semi-infinite heating benchmark truncated at grid.x_max.

    ``ts`` is the surface temperature history (value plus time derivatives up
    to the marched order).  ``boundary_mode`` selects how near-boundary
    spatial derivatives are formed: "onesided" (biased interior stencils of
    the same accuracy, the default) or "ghost" (extrapolated ghost layer).
    """

    grid: Grid1D
    ts: object = 1.0
    p: int = 2
    max_order: int = 5
    boundary_mode: str = "onesided"
    dirichlet_degree: int = 5

    def __post_init__(self):
        self.ts = as_time_function(self.ts)
        if self.grid.x_min != 0.0:
            raise ValueError("heat benchmark grid must start at x = 0")
        if self.grid.periodic:
            raise ValueError("heat benchmark grid cannot be periodic")

    def boundary_mismatch(self) -> float:
        """|T_s(0)|: nonzero means the surface history is incompatible with
        the zero initial field (reported, not fatal)."""
        return abs(self.ts(0.0))

    def initial_state(self) -> Field:
        return Field.zeros(self.grid, name="T")

    def _policies(self, k: int = 0):
        return {(0, "lo"): Dirichlet(self.ts.deriv(k), degree=self.dirichlet_degree),
                (0, "hi"): Dirichlet(0.0, degree=self.dirichlet_degree)}

    def fill(self, state: Field, t: float) -> Field:
        return fill_ghosts(state, self._policies(0), t)

    def level(self, k: int, state: Field, levels: list, t: float, ctx) -> Field:
        out = heat_level(state, k, p=self.p, boundary_mode=self.boundary_mode)
        out = fill_ghosts(out, self._policies(k), t)
        return out


def heat_level(T: Field, k: int, p: int = 2, boundary_mode: str = "onesided") -> Field:
    """Level k of the heat cascade: the 2k-th spatial derivative of T."""
    out = apply_derivative(T, 2 * k, p=p, boundary=boundary_mode)
    out.name = f"G{k}"
    return out


def heat_levels(T: Field, q: int, p: int = 2, boundary_mode: str = "onesided") -> list[Field]:
    """Levels 1..q (each the 2k-th derivative of the same input field)."""
    return [heat_level(T, k, p=p, boundary_mode=boundary_mode) for k in range(1, q + 1)]


# ---------------------------------------------------------------------------
# marched solution with flux history
# ---------------------------------------------------------------------------


@dataclass
class HeatResult:
    times: np.ndarray
    flux: np.ndarray          # inward boundary flux -dT/dx|_{x=0} per layer
    march: MarchResult
    boundary_mismatch: float = 0.0
    extras: dict = dc_field(default_factory=dict)

    @property
    def final_temperature(self) -> Field:
        return self.march.state


def boundary_flux(T: Field, p: int = 4) -> float:
    """Inward heat flux -dT/dx at x = 0 by a one-sided stencil."""
    return -float(derivative_at_boundary(T, 1, "lo", p=p))


def multi_step_taylor_solution(problem: HeatProblem, control: StepControl,
                               flux_accuracy: int = 4, store_every: int = 0) -> HeatResult:
    """Restart-per-step Taylor march of the heat benchmark.

    The derivative stack is rebuilt from the current field at every layer;
    the boundary flux is extracted after each step with a one-sided stencil
    of accuracy ``flux_accuracy``.
    """
    fluxes = [0.0]

    def on_step(i, t, state, stack):
        fluxes.append(boundary_flux(state, p=flux_accuracy))

    res = march(problem, problem.initial_state(), control, on_step=on_step,
                store_every=store_every)
    return HeatResult(
        times=res.times,
        flux=np.asarray(fluxes),
        march=res,
        boundary_mismatch=problem.boundary_mismatch(),
    )


# ---------------------------------------------------------------------------
# small-time flux quadrature approximations
# ---------------------------------------------------------------------------


def taylor_flux(ts, t: float, order: int, tol: float = 1e-10, route: str = "substitution") -> float:
    """Boundary flux by the truncated small-time series, evaluated as history
    quadratures:

        order 1:  -(3t/(4 sqrt(pi)))  J[T_s / (t-tau)^(5/2)]
        order 2:  order 1 - (3t^2/(16 sqrt(pi))) J[T_s (1/2 - 5/(t-tau)) / (t-tau)^(5/2)]
        order 3:  order 1 + (3t^2/(16 sqrt(pi))) J[...] + (t^3/(64 sqrt(pi))) J[T_s (1 - 42/(t-tau)) / (t-tau)^(7/2)]

    Valid for histories vanishing fast enough at tau -> t (otherwise the
    kernels diverge and QuadratureError is raised).
    """
    if order not in (1, 2, 3):
        raise ValueError("taylor_flux supports orders 1..3")
    j52 = kernel_integral(ts, t, 2.5, route=route, tol=tol)
    val = -(3.0 * t / (4.0 * SQRT_PI)) * j52
    if order == 1:
        return val
    j72 = kernel_integral(ts, t, 3.5, route=route, tol=tol)
    second = (3.0 * t**2 / (16.0 * SQRT_PI)) * (0.5 * j52 - 5.0 * j72)
    if order == 2:
        return val - second
    j92 = kernel_integral(ts, t, 4.5, route=route, tol=tol)
    third = (t**3 / (64.0 * SQRT_PI)) * (j72 - 42.0 * j92)
    return val + second + third


# ---------------------------------------------------------------------------
# closed-form deficiency estimates of the truncated series
# ---------------------------------------------------------------------------


def flux_error_estimate(x: float, t: float, order: int = 1) -> float:
    """Deficiency of the one-big-step Taylor reconstruction against the exact
    solution:

        order 1:  -(x / (4 sqrt(t))) e^(-x^2/(4t))
        order 2:  order 1 - (x / (16 sqrt(t))) (5 + x^2/(2t)) e^(-x^2/(4t))

    Exactly zero at x = 0 and decaying exponentially as t -> 0+ at fixed x.
    """
    if order not in (1, 2):
        raise ValueError("flux_error_estimate supports orders 1 and 2")
    if t <= 0:
        raise ValueError("t must be positive")
    if x == 0.0:
        return 0.0
    e = math.exp(-x * x / (4.0 * t))
    est = -(x / (4.0 * math.sqrt(t))) * e
    if order == 2:
        est -= (x / (16.0 * math.sqrt(t))) * (5.0 + x * x / (2.0 * t)) * e
    return est


def error_estimate_envelope(x: float, t: float) -> float:
    """The (x / (4 sqrt(t))) e^(-x^2/4t) magnitude envelope of the estimate."""
    if x == 0.0:
        return 0.0
    return (x / (4.0 * math.sqrt(t))) * math.exp(-x * x / (4.0 * t))


# ---------------------------------------------------------------------------
# flux comparison report
# ---------------------------------------------------------------------------


@dataclass
class FluxReport:
    """Boundary-flux values per method at one time, plus pairwise spreads."""

    t: float
    values: dict

    def relative_differences(self) -> dict:
        out = {}
        names = sorted(self.values)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                denom = max(abs(self.values[a]), abs(self.values[b]), 1e-300)
                out[(a, b)] = abs(self.values[a] - self.values[b]) / denom
        return out


def build_flux_report(ts, t: float, orders=(1, 2, 3), ts_deriv=None) -> FluxReport:
    """Evaluate the requested Taylor orders alongside both analytic oracles.

    Methods that do not converge for this history are reported as NaN rather
    than blocking the rest of the report.
    """
    values = {}
    for q in orders:
        try:
            values[f"taylor_{q}"] = taylor_flux(ts, t, q)
        except QuadratureError:
            values[f"taylor_{q}"] = float("nan")
    values["fractional"] = oracles.fractional_flux(ts, t)
    try:
        values["exact"] = oracles.exact_flux(ts, t, ts_deriv=ts_deriv)
    except QuadratureError:
        values["exact"] = float("nan")
    return FluxReport(t=t, values=values)
