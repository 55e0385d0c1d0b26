"""Pressure Poisson equation on structured grids.

Two discrete Laplacians are available:

* "compact" -- the standard second-derivative stencil per axis.  Default,
  red-black SOR or CG.
* "wide"    -- the composition div(grad) of the first-derivative stencils
  used everywhere else.  This is the operator that actually appears in the
  projection step, so solving with it makes the post-step discrete
  divergence track the solver tolerance exactly.  Periodic grids only,
  CG solver.

For all-Neumann/periodic problems the rhs mean is removed before solving
(compatibility) and the solution is normalized to zero mean.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .boundary import Dirichlet, DirichletFace, Neumann, _fill_axis, fill_ghosts
from .fields import Field
from . import kernels
from .stencils import apply_derivative


def divergence(velocity, p: int = 2) -> Field:
    """Discrete divergence: sum over axes of the first-derivative stencil."""
    fields = list(velocity)
    grid = fields[0].grid
    acc = np.zeros(grid.full_shape)
    for axis, f in enumerate(fields[: grid.ndim]):
        acc += apply_derivative(f, 1, axis=axis, p=p).values
    return Field(grid, acc, name="div")


def laplacian(f: Field, operator: str = "compact", p: int = 2) -> Field:
    """Apply the selected discrete Laplacian to a ghost-filled field."""
    grid = f.grid
    if operator == "compact":
        acc = np.zeros(grid.full_shape)
        for axis in range(grid.ndim):
            acc += apply_derivative(f, 2, axis=axis, p=p).values
        return Field(grid, acc, name="lap")
    if operator == "wide":
        acc = np.zeros(grid.full_shape)
        for axis in range(grid.ndim):
            g1 = apply_derivative(f, 1, axis=axis, p=p)
            g1 = fill_ghosts(g1)  # periodic wrap
            acc += apply_derivative(g1, 1, axis=axis, p=p).values
        return Field(grid, acc, name="lap")
    raise ValueError(f"unknown operator {operator!r}")


@dataclass
class PoissonProblem:
    rhs: Field
    policies: dict | None = None        # (axis, side) -> policy; None for periodic
    tol: float = 1e-10
    max_iter: int = 20000
    omega: float = 1.7
    solver: str = "sor"                 # "sor" | "cg"
    operator: str = "compact"           # "compact" | "wide"

    def __post_init__(self):
        grid = self.rhs.grid
        all_periodic = all(grid.is_periodic(a) for a in range(grid.ndim))
        if not all_periodic:
            pols = self.policies or {}
            if not isinstance(next(iter(pols), (0, "lo")), tuple):
                pols = {(0, side): pol for side, pol in pols.items()}
                self.policies = pols
            for axis in range(grid.ndim):
                if grid.is_periodic(axis):
                    continue
                for side in ("lo", "hi"):
                    if (axis, side) not in (self.policies or {}):
                        raise ValueError(f"no boundary policy for face {(axis, side)}")
        if self.operator == "wide" and not all_periodic:
            raise NotImplementedError("the wide div(grad) operator is supported on periodic grids")
        if not np.isfinite(self.rhs.interior).all():
            raise ValueError("rhs contains non-finite values")

    @property
    def pure_neumann(self) -> bool:
        grid = self.rhs.grid
        if all(grid.is_periodic(a) for a in range(grid.ndim)):
            return True
        return not any(_is_dirichlet(p) for p in (self.policies or {}).values())


def _is_dirichlet(pol) -> bool:
    return isinstance(pol, (Dirichlet, DirichletFace))


@dataclass
class PoissonResult:
    pressure: Field
    residual: float
    iterations: int
    converged: bool
    extras: dict = dc_field(default_factory=dict)


def _residual(p: Field, rhs: np.ndarray, problem: PoissonProblem, t: float = 0.0) -> float:
    pf = fill_ghosts(p, problem.policies, t)
    return _residual_from_filled(pf, rhs, problem)


def residual_norm(result_pressure: Field, problem: PoissonProblem, t: float = 0.0) -> float:
    """Independent recomputation of the max-norm residual on the equation's
    unknown nodes (Dirichlet boundary rows carry data, not equations)."""
    return _residual(result_pressure, _prepare_rhs(problem), problem, t)


def _prepare_rhs(problem: PoissonProblem) -> np.ndarray:
    rhs = problem.rhs.interior.copy()
    if problem.pure_neumann:
        rhs -= rhs.mean()
    return rhs


def poisson_solve(problem: PoissonProblem, t: float = 0.0) -> PoissonResult:
    """Solve lap p = rhs to the requested max-norm residual.

    Non-convergence is not an exception: the best iterate is returned with
    ``converged=False`` and the achieved residual.
    """
    if problem.solver == "sor":
        if problem.operator != "compact":
            raise NotImplementedError("SOR drives the compact operator; use solver='cg' for 'wide'")
        return _solve_sor(problem, t)
    if problem.solver == "cg":
        return _solve_cg(problem, t)
    raise ValueError(f"unknown solver {problem.solver!r}")


# ---------------------------------------------------------------------------
# red-black SOR (compact operator)
# ---------------------------------------------------------------------------


def _sweep_bounds(grid, policies):
    """Per-axis sweep ranges in full-array indices: Dirichlet boundary nodes
    are frozen data, every other node is an unknown."""
    g = grid.ghost_width
    bounds = []
    for axis in range(grid.ndim):
        n = grid.shape[axis] if grid.ndim > 1 else grid.shape[0]
        lo, hi = g, g + n
        if not grid.is_periodic(axis):
            if _is_dirichlet(policies.get((axis, "lo"))):
                lo += 1
            if _is_dirichlet(policies.get((axis, "hi"))):
                hi -= 1
        bounds.append((lo, hi))
    return bounds


def _solve_sor(problem: PoissonProblem, t: float) -> PoissonResult:
    grid = problem.rhs.grid
    rhs_int = _prepare_rhs(problem)
    rhs_full = np.zeros(grid.full_shape)
    g = grid.ghost_width
    if grid.ndim == 1:
        rhs_full[g:-g] = rhs_int
    else:
        rhs_full[g:-g, g:-g] = rhs_int

    pol = problem.policies
    bounds = _sweep_bounds(grid, pol or {})
    pf = fill_ghosts(Field(grid, name="p"), pol, t)
    vals = pf.values

    def refresh_ghosts():
        for axis in range(grid.ndim):
            _fill_axis(vals, grid, axis, pol, t)

    check_every = 20
    iterations = 0
    residual = np.inf
    while iterations < problem.max_iter:
        for parity in (0, 1):
            if grid.ndim == 1:
                cx = 1.0 / grid.h**2
                kernels.sor_sweep_1d(vals, rhs_full, cx, problem.omega,
                                     bounds[0][0], bounds[0][1], parity)
            else:
                cx = 1.0 / grid.spacing(0) ** 2
                cy = 1.0 / grid.spacing(1) ** 2
                kernels.sor_sweep_2d(vals, rhs_full, cx, cy, problem.omega,
                                     bounds[0][0], bounds[0][1],
                                     bounds[1][0], bounds[1][1], parity)
            refresh_ghosts()
        iterations += 1
        if iterations % check_every == 0 or iterations == problem.max_iter:
            pf = Field(grid, vals, ghosts_filled=True)
            residual = _residual_from_filled(pf, rhs_int, problem)
            if residual <= problem.tol:
                break

    out = Field(grid, vals, name="p")
    if problem.pure_neumann:
        out.values -= out.interior.mean()
        out = fill_ghosts(out, pol, t)
        out = Field(grid, out.values, name="p")
    residual = _residual(out, rhs_int, problem)
    return PoissonResult(out, residual, iterations, residual <= problem.tol)


def _residual_from_filled(pf: Field, rhs_int: np.ndarray, problem: PoissonProblem) -> float:
    lap = laplacian(pf, operator=problem.operator)
    mask = _unknown_mask(pf.grid, problem.policies or {})
    return float(np.max(np.abs(lap.interior[mask] - rhs_int[mask])))


# ---------------------------------------------------------------------------
# conjugate gradients (matrix-free, either operator)
# ---------------------------------------------------------------------------


def _homogeneous_policies(policies):
    if policies is None:
        return None
    out = {}
    for key, pol in policies.items():
        if _is_dirichlet(pol):
            out[key] = Dirichlet(0.0, pol.degree)
        elif isinstance(pol, Neumann):
            out[key] = Neumann(0.0)
        else:
            out[key] = pol
    return out


def _unknown_mask(grid, policies) -> np.ndarray:
    mask = np.ones(grid.shape, dtype=bool)
    for axis in range(grid.ndim):
        if grid.is_periodic(axis):
            continue
        idx_lo = [slice(None)] * grid.ndim
        idx_hi = [slice(None)] * grid.ndim
        idx_lo[axis] = 0
        idx_hi[axis] = -1
        if _is_dirichlet(policies.get((axis, "lo"))):
            mask[tuple(idx_lo)] = False
        if _is_dirichlet(policies.get((axis, "hi"))):
            mask[tuple(idx_hi)] = False
    return mask


def _solve_cg(problem: PoissonProblem, t: float) -> PoissonResult:
    grid = problem.rhs.grid
    rhs_int = _prepare_rhs(problem)
    pol = problem.policies or {}
    hom = _homogeneous_policies(pol)
    mask = _unknown_mask(grid, pol)
    pure = problem.pure_neumann

    def op(x_masked: np.ndarray) -> np.ndarray:
        f = Field(grid, name="x")
        f.interior[mask] = x_masked
        ff = fill_ghosts(f, hom, 0.0)
        lap = laplacian(ff, operator=problem.operator)
        return -lap.interior[mask]  # negate: -lap is positive semidefinite

    # affine part from inhomogeneous boundary data
    base = Field(grid, name="p0")
    basef = fill_ghosts(base, pol, t)
    lap0 = laplacian(basef, operator=problem.operator)
    b = -(rhs_int[mask] - lap0.interior[mask])
    if pure:
        b = b - b.mean()

    x = np.zeros_like(b)
    r = b - op(x)
    d = r.copy()
    rs = float(r @ r)
    iterations = 0
    scale = max(float(np.max(np.abs(b))), 1e-300)
    while iterations < problem.max_iter:
        iterations += 1
        ad = op(d)
        denom = float(d @ ad)
        if denom == 0.0:
            break
        alpha = rs / denom
        x += alpha * d
        r -= alpha * ad
        if pure:
            r -= r.mean()
        rs_new = float(r @ r)
        if np.max(np.abs(r)) <= 0.5 * problem.tol:
            # inner criterion on the CG residual; final check is the true one
            rs = rs_new
            break
        d = r + (rs_new / rs) * d
        rs = rs_new

    sol = Field(grid, name="p")
    sol.interior[mask] = x
    solf = fill_ghosts(sol, pol, t)
    vals = solf.values.copy()
    out = Field(grid, vals, name="p")
    if pure:
        out.values -= out.interior.mean()
    residual = _residual(out, rhs_int, problem)
    converged = residual <= problem.tol
    if not converged and iterations < problem.max_iter:
        # CG stagnated on the inner criterion; report honestly
        pass
    return PoissonResult(out, residual, iterations, converged)
