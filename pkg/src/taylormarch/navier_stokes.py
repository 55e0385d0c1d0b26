"""Temporal-derivative cascade for incompressible non-isothermal flow.

Velocity and temperature advance by their first, second and third time
derivatives; the pressure never advances -- each layer solves one Poisson
equation lap p = rho div F and stores a short history of pressure layers
from which the pressure-gradient time derivatives are backward-differenced
(first-order accurate, matching how the cascade was derived).

The dissipation functions: Phi is the positive quadratic form in the
velocity gradients; Phi_1 and Phi_2 apply the identical form to the F and
F_1 fields respectively.

2-D runs carry v_z = 0 with all z-derivatives identically zero, on the same
code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .boundary import as_time_function, fill_ghosts
from .engine import CascadeProblem
from .fields import Field
from .grids import Grid2D
from .poisson import PoissonProblem, PoissonResult, divergence, poisson_solve
from .stencils import apply_derivative


@dataclass(frozen=True)
class FluidProperties:
    """rho, mu, lambda (heat conductivity), c (specific heat); nu = mu/rho."""

    rho: float
    mu: float
    lam: float
    c: float

    def __post_init__(self):
        for name in ("rho", "mu", "lam", "c"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def nu(self) -> float:
        return self.mu / self.rho


@dataclass(frozen=True)
class ExternalForce:
    """Body force components with supplied time derivatives (constants by
    default, e.g. gravity)."""

    fx: object = 0.0
    fy: object = 0.0
    fz: object = 0.0

    def at(self, t: float, k: int = 0) -> tuple[float, float, float]:
        return tuple(as_time_function(c).deriv(k)(t) for c in (self.fx, self.fy, self.fz))


# ---------------------------------------------------------------------------
# building blocks (pure functions over ghost-filled fields)
# ---------------------------------------------------------------------------


def _d(f: Field, axis, p: int = 2) -> np.ndarray:
    """First derivative along axis; axis None is the absent z direction."""
    if axis is None or axis >= f.grid.ndim:
        return np.zeros(f.grid.full_shape)
    return apply_derivative(f, 1, axis=axis, p=p).values


def _lap(f: Field, p: int = 2) -> np.ndarray:
    acc = np.zeros(f.grid.full_shape)
    for axis in range(f.grid.ndim):
        acc += apply_derivative(f, 2, axis=axis, p=p).values
    return acc


def _wrap(grid, values, name="") -> Field:
    """Field from raw values with periodic ghosts re-wrapped."""
    return fill_ghosts(Field(grid, values, name=name))


def _advect(velocity, values_derivs) -> np.ndarray:
    """(v . grad) of a field given its per-axis derivative arrays."""
    acc = np.zeros_like(values_derivs[0])
    for v, d in zip(velocity, values_derivs):
        acc += v.values * d
    return acc


def _component_grads(fields, p: int = 2):
    """d(field_i)/d(axis_j) arrays for a velocity-like triple; the z slot is
    zeros in 2-D."""
    grid = fields[0].grid
    axes = [0, 1, 2 if grid.ndim == 3 else None]
    return [[_d(f, ax, p) for ax in axes] for f in fields]


def dissipation_phi(fx: Field, fy: Field, fz: Field | None, props: FluidProperties,
                    p: int = 2) -> Field:
    """The dissipation quadratic form applied to a field triple:

        (mu / (rho c)) (2 [dx(fx)^2 + dy(fy)^2 + dz(fz)^2]
                        + (dy fx + dx fy)^2 + (dz fx + dx fz)^2 + (dz fy + dy fz)^2)

    Applying it to the velocity gives Phi; to the F fields, Phi_1; to the
    F_1 fields, Phi_2.  Non-negative at every node by construction.
    """
    grid = fx.grid
    if fz is None:
        fz = Field(grid, ghosts_filled=True)
    dxfx, dyfx, dzfx = (_d(fx, a, p) for a in (0, 1, 2 if grid.ndim == 3 else None))
    dxfy, dyfy, dzfy = (_d(fy, a, p) for a in (0, 1, 2 if grid.ndim == 3 else None))
    dxfz, dyfz, dzfz = (_d(fz, a, p) for a in (0, 1, 2 if grid.ndim == 3 else None))
    diag = dxfx**2 + dyfy**2 + dzfz**2
    shear = (dyfx + dxfy) ** 2 + (dzfx + dxfz) ** 2 + (dzfy + dyfz) ** 2
    vals = props.mu / (props.rho * props.c) * (2.0 * diag + shear)
    return Field(grid, vals, name="phi")


def ns_rhs(velocity, temperature: Field, props: FluidProperties,
           force=(0.0, 0.0, 0.0), p: int = 2):
    """F = nu lap(v) - (v . grad) v + f  and  F_T = Phi + (lam/(rho c)) lap(T) - (v . grad) T."""
    grid = velocity[0].grid
    grads = _component_grads(velocity, p)
    F = []
    for i, v in enumerate(velocity):
        vals = props.nu * _lap(v, p) - _advect(velocity, grads[i]) + force[i]
        F.append(Field(grid, vals, name=f"F{'xyz'[i]}"))
    phi = dissipation_phi(velocity[0], velocity[1],
                          velocity[2] if len(velocity) > 2 else None, props, p)
    axes = [0, 1, 2 if grid.ndim == 3 else None]
    t_grads = [_d(temperature, ax, p) for ax in axes]
    ft_vals = phi.values + props.lam / (props.rho * props.c) * _lap(temperature, p) \
        - _advect(velocity, t_grads)
    return tuple(F), Field(grid, ft_vals, name="FT")


def ns_level1(F, F_T: Field, pressure: Field, props: FluidProperties, p: int = 2):
    """dv/dt = F - (1/rho) grad p;  dT/dt = F_T."""
    grid = F[0].grid
    axes = [0, 1, 2 if grid.ndim == 3 else None]
    out = []
    for i, Fi in enumerate(F):
        gp = _d(pressure, axes[i], p)
        out.append(Field(grid, Fi.values - gp / props.rho, name=f"dv{'xyz'[i]}dt"))
    return tuple(out), Field(grid, F_T.values.copy(), name="dTdt")


def ns_level2(velocity, temperature: Field, F, v_t, F_T: Field,
              props: FluidProperties, dforce=(0.0, 0.0, 0.0), dpgrad=None, p: int = 2):
    """Second temporal derivatives.

    F_1 = nu lap(dv/dt) + df/dt - [(dv/dt . grad) v + (v . grad) dv/dt],
    Phi_1 = dissipation form on the F fields,
    F_T^1 = Phi_1 + (lam/(rho c)) lap(F_T) - [(v . grad) F_T + (grad T . dv/dt)],
    d2v/dt2 = F_1 - (1/rho) grad(dp/dt),  d2T/dt2 = F_T^1.
    """
    grid = velocity[0].grid
    axes = [0, 1, 2 if grid.ndim == 3 else None]
    v_grads = _component_grads(velocity, p)
    vt_fields = [_wrap(grid, g.values, g.name) for g in v_t]
    vt_grads = _component_grads(vt_fields, p)
    F1 = []
    for i in range(len(velocity)):
        vals = (props.nu * _lap(vt_fields[i], p) + dforce[i]
                - (_advect(vt_fields, v_grads[i]) + _advect(velocity, vt_grads[i])))
        F1.append(Field(grid, vals, name=f"F1{'xyz'[i]}"))

    Fw = [_wrap(grid, f.values, f.name) for f in F]
    phi1 = dissipation_phi(Fw[0], Fw[1], Fw[2] if len(Fw) > 2 else None, props, p)
    ftw = _wrap(grid, F_T.values, "FT")
    t_grads = [_d(temperature, ax, p) for ax in axes]
    ft_grads = [_d(ftw, ax, p) for ax in axes]
    ft1_vals = (phi1.values + props.lam / (props.rho * props.c) * _lap(ftw, p)
                - (_advect(velocity, ft_grads)
                   + sum(t_grads[j] * vt_fields[j].values for j in range(len(velocity)))))
    FT1 = Field(grid, ft1_vals, name="FT1")

    v_tt = []
    for i in range(len(velocity)):
        vals = F1[i].values.copy()
        if dpgrad is not None:
            vals -= dpgrad[i].values / props.rho
        v_tt.append(Field(grid, vals, name=f"d2v{'xyz'[i]}dt2"))
    return tuple(F1), FT1, tuple(v_tt), Field(grid, FT1.values.copy(), name="d2Tdt2")


def ns_level3(velocity, temperature: Field, F, v_t, F1, v_tt, F_T: Field, FT1: Field,
              props: FluidProperties, d2force=(0.0, 0.0, 0.0), d2pgrad=None, p: int = 2):
    """Third temporal derivatives.

    F_2 = nu lap(d2v/dt2) + d2f/dt2 - [(d2v/dt2 . grad) v
          + 2 (dv/dt . grad) dv/dt + (v . grad) d2v/dt2],
    Phi_2 = dissipation form on the F_1 fields,
    F_T^2 = Phi_2 + (lam/(rho c)) lap(F_T^1)
            - [(F_1 . grad) T + 2 (F . grad) F_T + (v . grad) F_T^1],
    d3v/dt3 = F_2 - (1/rho) grad(d2p/dt2),  d3T/dt3 = F_T^2.
    """
    grid = velocity[0].grid
    axes = [0, 1, 2 if grid.ndim == 3 else None]
    v_grads = _component_grads(velocity, p)
    vt_fields = [_wrap(grid, g.values, g.name) for g in v_t]
    vtt_fields = [_wrap(grid, g.values, g.name) for g in v_tt]
    vt_grads = _component_grads(vt_fields, p)
    vtt_grads = _component_grads(vtt_fields, p)
    F2 = []
    for i in range(len(velocity)):
        vals = (props.nu * _lap(vtt_fields[i], p) + d2force[i]
                - (_advect(vtt_fields, v_grads[i])
                   + 2.0 * _advect(vt_fields, vt_grads[i])
                   + _advect(velocity, vtt_grads[i])))
        F2.append(Field(grid, vals, name=f"F2{'xyz'[i]}"))

    F1w = [_wrap(grid, f.values, f.name) for f in F1]
    phi2 = dissipation_phi(F1w[0], F1w[1], F1w[2] if len(F1w) > 2 else None, props, p)
    Fw = [_wrap(grid, f.values, f.name) for f in F]
    ft1w = _wrap(grid, FT1.values, "FT1")
    ftw = _wrap(grid, F_T.values, "FT")
    t_grads = [_d(temperature, ax, p) for ax in axes]
    ft_grads = [_d(ftw, ax, p) for ax in axes]
    ft1_grads = [_d(ft1w, ax, p) for ax in axes]
    ft2_vals = (phi2.values + props.lam / (props.rho * props.c) * _lap(ft1w, p)
                - (sum(t_grads[j] * F1w[j].values for j in range(len(velocity)))
                   + 2.0 * sum(ft_grads[j] * Fw[j].values for j in range(len(velocity)))
                   + _advect(velocity, ft1_grads)))
    FT2 = Field(grid, ft2_vals, name="FT2")

    v_ttt = []
    for i in range(len(velocity)):
        vals = F2[i].values.copy()
        if d2pgrad is not None:
            vals -= d2pgrad[i].values / props.rho
        v_ttt.append(Field(grid, vals, name=f"d3v{'xyz'[i]}dt3"))
    return tuple(F2), FT2, tuple(v_ttt), Field(grid, FT2.values.copy(), name="d3Tdt3")


# ---------------------------------------------------------------------------
# marched problem
# ---------------------------------------------------------------------------


@dataclass
class NSProblem(CascadeProblem):
    """Periodic-box incompressible flow marched by the Taylor engine.

    State is the tuple (vx, vy, T); v_z = 0 identically (2-D mode).  The
    per-layer context holds the Poisson-projected pressure, its gradient,
    and backward-difference gradient time derivatives from the layer
    history (zero until enough layers exist).
    """

    grid: Grid2D = None
    props: FluidProperties = None
    force: ExternalForce = dc_field(default_factory=ExternalForce)
    p: int = 2
    poisson_tol: float = 1e-10
    poisson_solver: str = "cg"
    poisson_operator: str = "wide"
    max_order: int = 3
    history_depth: int = 3

    def __post_init__(self):
        if not (self.grid.periodic_x and self.grid.periodic_y):
            raise ValueError("NSProblem marches periodic boxes")
        self._history: list[tuple[float, Field]] = []
        self.last_poisson: PoissonResult | None = None

    # -- engine interface ---------------------------------------------------

    def fill(self, state, t: float):
        return tuple(fill_ghosts(f) for f in state)

    def prepare(self, state, t: float):
        vx, vy, T = state
        velocity = (vx, vy)
        F, F_T = ns_rhs(velocity, T, self.props, self.force.at(t), self.p)
        rhs = divergence([_wrap(self.grid, f.values, f.name) for f in F], self.p)
        rhs = Field.from_interior(self.grid, self.props.rho * rhs.interior)
        res = poisson_solve(PoissonProblem(rhs, None, tol=self.poisson_tol,
                                           solver=self.poisson_solver,
                                           operator=self.poisson_operator))
        self.last_poisson = res
        pressure = fill_ghosts(res.pressure)
        self._push_history(t, pressure)
        dp, d2p = self._pressure_grad_derivs()
        return {
            "F": F, "F_T": F_T, "pressure": pressure,
            "dpgrad": dp, "d2pgrad": d2p, "velocity": velocity,
        }

    def level(self, k: int, state, levels: list, t: float, ctx):
        vx, vy, T = state
        velocity = ctx["velocity"]
        if k == 1:
            (gx, gy), T1 = self._level1(ctx)
            ctx["v_t"], ctx["T_t"] = (gx, gy), T1
            return (gx, gy, T1)
        if k == 2:
            F1, FT1, v_tt, T_tt = ns_level2(velocity, T, ctx["F"], ctx["v_t"], ctx["F_T"],
                                            self.props, self.force.at(t, 1),
                                            ctx["dpgrad"], self.p)
            ctx["F1"], ctx["FT1"], ctx["v_tt"] = F1, FT1, v_tt
            return (*v_tt, T_tt)
        if k == 3:
            _, _, v_ttt, T_ttt = ns_level3(velocity, T, ctx["F"], ctx["v_t"], ctx["F1"],
                                           ctx["v_tt"], ctx["F_T"], ctx["FT1"], self.props,
                                           self.force.at(t, 2), ctx["d2pgrad"], self.p)
            return (*v_ttt, T_ttt)
        raise ValueError("NS cascade supplies levels 1..3")

    def _level1(self, ctx):
        g, T1 = ns_level1(ctx["F"], ctx["F_T"], ctx["pressure"], self.props, self.p)
        return g, T1

    # -- pressure history ---------------------------------------------------

    def reset_pressure_history(self) -> None:
        self._history.clear()

    def _push_history(self, t: float, pressure: Field) -> None:
        self._history = [(tp, pp) for tp, pp in self._history if tp < t - 1e-14]
        self._history.append((t, pressure))
        if len(self._history) > self.history_depth:
            self._history = self._history[-self.history_depth:]

    def _pressure_grad_derivs(self):
        """Backward differences of grad p over stored layers (first-order)."""
        if len(self._history) < 2:
            return None, None
        (t2, p2), (t1, p1) = self._history[-2], self._history[-1]
        dt1 = t1 - t2
        dp_vals = (p1.values - p2.values) / dt1
        dp = [self._grad_component(dp_vals, axis) for axis in (0, 1)]
        if len(self._history) < 3:
            return dp, None
        (t3, p3) = self._history[-3]
        dt2 = t2 - t3
        rate1 = (p1.values - p2.values) / dt1
        rate2 = (p2.values - p3.values) / dt2
        d2p_vals = 2.0 * (rate1 - rate2) / (t1 - t3)
        d2p = [self._grad_component(d2p_vals, axis) for axis in (0, 1)]
        return dp, d2p

    def _grad_component(self, vals, axis) -> Field:
        f = _wrap(self.grid, vals)
        return Field(self.grid, _d(f, axis, self.p))

    # -- convenience --------------------------------------------------------

    def state_from_functions(self, vx_fn, vy_fn, T_fn, div_tol: float = 1e-8):
        """Build the (vx, vy, T) state and enforce that the initial velocity
        is discretely divergence-free (the projection keeps it so afterwards,
        but cannot repair inconsistent initial data)."""
        vx = Field.from_function(self.grid, vx_fn, name="vx")
        vy = Field.from_function(self.grid, vy_fn, name="vy")
        T = Field.from_function(self.grid, T_fn, name="T")
        div = divergence((fill_ghosts(vx), fill_ghosts(vy)), self.p).max_abs()
        if div > div_tol:
            raise ValueError(
                f"initial velocity is not discretely divergence-free (max |div v| = {div:.3g})"
            )
        return (vx, vy, T)

    def post_step_divergence(self, state) -> float:
        vx, vy, _ = self.fill(state, 0.0)
        return divergence((vx, vy), self.p).max_abs()
