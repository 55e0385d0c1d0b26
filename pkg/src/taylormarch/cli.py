"""Command-line experiment harness.

Subcommands:

* ``run``      -- execute one configured experiment, write the CSV report.
* ``sweep``    -- repeat a run under time-step halving and fit observed
                  temporal orders against a reference.
* ``validate`` -- run the oracle-equivalence suite and print a pass/fail
                  matrix.

Exit codes: 0 success, 2 config error, 3 numerical instability,
4 oracle mismatch beyond tolerance (run --strict, or any validate failure).
"""

from __future__ import annotations

import argparse
import math
import sys
import time as _time

import numpy as np

from .boundary import TimeFunction
from .config import ConfigError, ExperimentConfig, load_config
from .engine import InstabilityError, StepControl, march
from .fields import Field
from .grids import Grid1D, Grid2D
from .heat import HeatProblem, multi_step_taylor_solution
from .navier_stokes import ExternalForce, FluidProperties, NSProblem
from .oracles import duhamel_erfc_profile
from .problems1d import AdvectionProblem, BurgersProblem, constant_burgers
from .reports import RunReport, SweepReport, fit_observed_order
from .sphere import TableCaseConfig, run_table_case

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INSTABILITY = 3
EXIT_ORACLE = 4


# ---------------------------------------------------------------------------
# problem runners
# ---------------------------------------------------------------------------


def _advection_problem(cfg: ExperimentConfig) -> AdvectionProblem:
    grid = Grid1D(0.0, cfg.x_max, cfg.n_cells, ghost_width=3)
    return AdvectionProblem(grid=grid, initial=lambda x: x,
                            inflow=TimeFunction(lambda t: t, (1.0,)), p=cfg.accuracy)


def _burgers_problem(cfg: ExperimentConfig) -> BurgersProblem:
    if cfg.initial == "constant":
        grid = Grid1D(0.0, 1.0, cfg.n_cells, ghost_width=3)
        return constant_burgers(grid, value=cfg.value, nu=cfg.nu, p=cfg.accuracy)
    grid = Grid1D(0.0, 2.0 * math.pi, cfg.n_cells, ghost_width=3, periodic=True)
    return BurgersProblem(grid=grid, nu=cfg.nu, initial=np.sin, p=cfg.accuracy)


def _ns_problem(cfg: ExperimentConfig):
    grid = Grid2D(0.0, 2.0 * math.pi, cfg.n_cells, 0.0, 2.0 * math.pi, cfg.n_cells,
                  ghost_width=2, periodic_x=True, periodic_y=True)
    props = FluidProperties(rho=cfg.rho, mu=cfg.mu, lam=cfg.lam, c=cfg.c)
    problem = NSProblem(grid=grid, props=props, force=ExternalForce(),
                        p=cfg.accuracy, poisson_tol=cfg.poisson_tol)
    ics = {
        "uniform": (lambda X, Y: 1.0 + 0 * X, lambda X, Y: 0 * X, lambda X, Y: 2.0 + 0 * X),
        "shear": (lambda X, Y: np.sin(Y), lambda X, Y: 0 * X,
                  lambda X, Y: np.sin(X) * np.sin(Y)),
        "taylor-green": (lambda X, Y: np.sin(X) * np.cos(Y),
                         lambda X, Y: -np.cos(X) * np.sin(Y),
                         lambda X, Y: np.cos(X) + np.sin(Y)),
    }
    return problem, problem.state_from_functions(*ics[cfg.ic])


def _run_1d(cfg: ExperimentConfig, report: RunReport, problem, oracle_fn=None) -> None:
    stride = max(1, cfg.output_stride)
    for order in cfg.orders:
        control = StepControl(dt=cfg.dt, order=order, n_steps=cfg.n_steps)
        t0 = _time.perf_counter()
        res = march(problem, problem.initial_state(), control)
        report.timings[order] = _time.perf_counter() - t0
        x = problem.grid.coords()[::stride]
        report.add_rows(order, res.final_time, x, res.state.interior[::stride])
        if cfg.oracle and oracle_fn is not None:
            delta = oracle_fn(res)
            report.oracle_deltas[f"order_{order}"] = delta


def _heat_oracle(cfg: ExperimentConfig, grid: Grid1D, t_end: float):
    """Exact field samples and boundary flux for the configured surface history."""
    from .oracles import PolynomialHistory, duhamel_solution, fractional_flux

    if cfg.surface == "ramp":
        hist = PolynomialHistory((0.0, cfg.surface_value))
        exact = np.array([duhamel_solution(hist, xi, t_end) for xi in grid.coords()])
        return exact, fractional_flux(hist, t_end)
    exact = cfg.surface_value * np.array([duhamel_erfc_profile(xi, t_end)
                                          for xi in grid.coords()])
    return exact, cfg.surface_value / math.sqrt(math.pi * t_end)


def run_experiment(cfg: ExperimentConfig) -> RunReport:
    report = RunReport(problem=cfg.problem, orders=list(cfg.orders))

    if cfg.problem == "advection":
        problem = _advection_problem(cfg)

        def oracle(res):
            exact = problem.grid.coords() + res.final_time
            return float(np.max(np.abs(res.state.interior - exact)))

        _run_1d(cfg, report, problem, oracle)

    elif cfg.problem == "burgers":
        problem = _burgers_problem(cfg)
        if cfg.initial == "constant":
            def oracle(res):
                return float(np.max(np.abs(res.state.interior - cfg.value)))
        else:
            def oracle(res):
                h = problem.grid.h
                m_end = float(np.sum(res.state.interior) * h)
                m_0 = float(np.sum(problem.initial_state().interior) * h)
                return abs(m_end - m_0) / max(abs(m_0), 1.0)
        _run_1d(cfg, report, problem, oracle)

    elif cfg.problem == "heat-semiinfinite":
        n_steps = round(cfg.t_end / cfg.dt)
        grid = Grid1D(0.0, cfg.x_max, cfg.n_cells, ghost_width=3)
        if cfg.surface == "ramp":
            v = cfg.surface_value
            ts = TimeFunction(lambda t, _v=v: _v * t, (v,))
        else:
            ts = cfg.surface_value
        problem = HeatProblem(grid=grid, ts=ts, p=cfg.accuracy)
        stride = max(1, cfg.output_stride)
        for order in cfg.orders:
            control = StepControl(dt=cfg.dt, order=order, n_steps=n_steps)
            t0 = _time.perf_counter()
            res = multi_step_taylor_solution(problem, control, flux_accuracy=cfg.flux_accuracy)
            report.timings[order] = _time.perf_counter() - t0
            x = grid.coords()[::stride]
            t_end = float(res.times[-1])
            report.add_rows(order, t_end, x, res.final_temperature.interior[::stride])
            if cfg.oracle:
                exact, flux_exact = _heat_oracle(cfg, grid, t_end)
                field_err = float(np.max(np.abs(res.final_temperature.interior - exact)))
                flux_err = abs(res.flux[-1] - flux_exact) / abs(flux_exact)
                report.oracle_deltas[f"order_{order}_field"] = field_err
                report.oracle_deltas[f"order_{order}_flux"] = flux_err
        report.notes.append(f"boundary_mismatch: {problem.boundary_mismatch():.3g}")

    elif cfg.problem == "navier-stokes-2d":
        problem, state0 = _ns_problem(cfg)
        stride = max(1, cfg.output_stride)
        for order in cfg.orders:
            problem.reset_pressure_history()
            control = StepControl(dt=cfg.dt, order=order, n_steps=cfg.n_steps)
            t0 = _time.perf_counter()
            res = march(problem, state0, control)
            report.timings[order] = _time.perf_counter() - t0
            vx, vy, T = res.state
            X = problem.grid.coords(0)[::stride]
            Y = problem.grid.coords(1)[::stride]
            XX, YY = np.meshgrid(X, Y, indexing="ij")
            vals = T.interior[::stride, ::stride]
            report.add_rows(order, res.final_time, XX.ravel(), vals.ravel(), YY.ravel())
            report.solver_residuals.append(problem.last_poisson.residual)
            if cfg.oracle:
                if cfg.ic == "uniform":
                    delta = max(float(np.max(np.abs(vx.interior - 1.0))),
                                float(np.max(np.abs(vy.interior))))
                elif cfg.ic == "shear":
                    decay = math.exp(-problem.props.nu * res.final_time)
                    exact = decay * np.sin(problem.grid.coords(1))[None, :]
                    delta = float(np.max(np.abs(vx.interior - exact)))
                else:
                    delta = problem.post_step_divergence(res.state)
                report.oracle_deltas[f"order_{order}"] = delta

    elif cfg.problem == "sphere-stokes":
        table_cfg = TableCaseConfig(pe=cfg.pe, rho_max=cfg.rho_max, n_rho=cfg.n_rho,
                                    n_theta=cfg.n_theta, dt=cfg.dt, tau_end=cfg.tau_end,
                                    orders=tuple(cfg.orders), surface_rate=cfg.surface_rate,
                                    p=cfg.accuracy)
        res = run_table_case(table_cfg)
        if res.instabilities:
            order, step = next(iter(res.instabilities.items()))
            raise InstabilityError(step, step * cfg.dt, f"sphere order {order}")
        report.timings.update(res.timings)
        for order in cfg.orders:
            for i, r in enumerate(table_cfg.radii):
                row = res.values[order][i]
                report.add_rows(order, cfg.tau_end, [r] * len(table_cfg.angles), row,
                                list(table_cfg.angles))
            if cfg.oracle:
                surface = math.exp(cfg.surface_rate * cfg.tau_end)
                expect = np.array([surface * abs(math.cos(a)) for a in table_cfg.angles])
                got = res.values[order][0]
                delta = float(np.max(np.abs(got - expect) / np.maximum(np.abs(expect), 1e-6)))
                report.oracle_deltas[f"order_{order}_boundary"] = delta
    else:
        raise ConfigError(f"unhandled problem {cfg.problem!r}")

    return report


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def run_sweep(cfg: ExperimentConfig, halvings: int, reference: str = "auto") -> SweepReport:
    """Run at dt, dt/2, ..., dt/2^halvings and fit observed temporal orders.

    Reference: "oracle" measures against the analytic solution (advection,
    heat); "finest" measures against an extra run of the same order at
    dt/2^(halvings+2), which cancels the fixed spatial error and isolates
    the temporal order.  "auto" picks oracle for advection (exact) and
    finest elsewhere: for diffusion problems at the explicit stability
    limit the temporal error of orders >= 2 sits below the spatial floor,
    so oracle-referenced slopes saturate.
    """
    from .config import validate as _validate

    if halvings < 2:
        raise ConfigError("sweep needs at least 2 halvings")
    if reference == "auto":
        reference = "oracle" if cfg.problem == "advection" else "finest"

    dts = [cfg.dt / 2**i for i in range(halvings + 1)]
    errors: dict = {q: [] for q in cfg.orders}

    def one(order: int, i_halve: int):
        sub = dict(cfg.to_dict())
        sub["dt"] = cfg.dt / 2**i_halve
        if "n_steps" in sub:
            sub["n_steps"] = int(sub["n_steps"]) * 2**i_halve
        sub["orders"] = [order]
        rep = run_experiment(_validate(sub))
        vals = np.array([row[4] for row in rep.rows])
        keys = [k for k in rep.oracle_deltas if k.endswith("_field")] or list(rep.oracle_deltas)
        delta = max(rep.oracle_deltas[k] for k in keys) if keys else float("nan")
        return vals, delta

    for order in cfg.orders:
        runs = [one(order, i) for i in range(halvings + 1)]
        if reference == "finest":
            ref_vals, _ = one(order, halvings + 2)
            errors[order] = [float(np.max(np.abs(v - ref_vals))) for v, _ in runs]
        else:
            errors[order] = [d for _, d in runs]

    slopes = {}
    for order, errs in errors.items():
        if max(errs) < 1e-12:
            slopes[order] = float("nan")  # exact: slope undefined
        else:
            slopes[order] = fit_observed_order(dts, errs)
    return SweepReport(problem=cfg.problem, dts=dts, errors=errors,
                       slopes=slopes, reference=reference)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def run_validate() -> tuple[list, bool]:
    """Oracle-equivalence suite; returns (check rows, all_passed)."""
    from .oracles import (ExponentialHistory, PolynomialHistory, duhamel_solution,
                          exact_flux, fractional_flux, gaussian_moment_integral,
                          spatial_derivative_integral)
    from .poisson import PoissonProblem, poisson_solve
    from .boundary import DirichletFace
    from scipy.integrate import quad

    checks = []

    def record(name, value, tol):
        checks.append((name, value, tol, value <= tol))

    # flux route equivalence on an endpoint-vanishing history
    t0 = 0.4
    hist = PolynomialHistory((t0 * t0, -2.0 * t0, 1.0))  # (t0 - tau)^2
    ff = fractional_flux(hist, t0)
    ef = exact_flux(hist, t0)
    record("flux_fractional_vs_exact", abs(ff - ef) / max(abs(ef), 1e-300), 1e-6)

    # regularized route for the unit step history
    step = ExponentialHistory(1.0, 0.0)
    reg = exact_flux(step, 0.25)
    record("flux_regularized_unit_step", abs(reg - 1.0 / math.sqrt(math.pi * 0.25))
           / (1.0 / math.sqrt(math.pi * 0.25)), 1e-8)

    # derivative kernels vs centered FD of the Duhamel solution
    ramp = PolynomialHistory((0.0, 1.0))
    x, t = 0.8, 0.3
    h = 0.02
    for k in (2, 3):
        if k == 2:
            fd = (duhamel_solution(ramp, x + h, t) - 2 * duhamel_solution(ramp, x, t)
                  + duhamel_solution(ramp, x - h, t)) / h**2
        else:
            fd = (duhamel_solution(ramp, x + 2 * h, t) - 2 * duhamel_solution(ramp, x + h, t)
                  + 2 * duhamel_solution(ramp, x - h, t)
                  - duhamel_solution(ramp, x - 2 * h, t)) / (2 * h**3)
        kernel = spatial_derivative_integral(ramp, x, t, k)
        record(f"derivative_kernel_k{k}_vs_fd", abs(kernel - fd) / max(abs(fd), 1e-300), 1e-3)

    # Gaussian moments vs brute-force quadrature
    for power in (2, 4, 6, 8):
        closed = gaussian_moment_integral(1.0, 0.25, power)
        c = 1.0 / (2.0 * math.sqrt(0.25))
        brute = 2.0 * quad(lambda xi: xi**power * math.exp(-xi * xi), c, np.inf)[0]
        record(f"gaussian_moment_{power}", abs(closed - brute), 1e-10)

    # manufactured Poisson solution
    g = Grid2D(0, 1, 24, 0, 1, 24, ghost_width=2)
    X, Y = np.meshgrid(g.coords(0), g.coords(1), indexing="ij")
    rhs = Field.from_interior(g, 4.0 + 0 * X)
    pol = {}
    for axis in (0, 1):
        for side in ("lo", "hi"):
            cval = 0.0 if side == "lo" else 1.0
            if axis == 0:
                fn = lambda coords, t, c=cval: c**2 + coords**2
            else:
                fn = lambda coords, t, c=cval: coords**2 + c**2
            pol[(axis, side)] = DirichletFace(fn, degree=3)
    res = poisson_solve(PoissonProblem(rhs, pol, tol=1e-10))
    err = float(np.max(np.abs(res.pressure.interior - (X**2 + Y**2))))
    record("poisson_manufactured_quadratic", err, 1e-8)
    record("poisson_residual", res.residual, 1e-10)

    # Duhamel solution satisfies the PDE (FD residual)
    hh, dt = 0.02, 1e-4
    xs, ts = 0.9, 0.35
    ramp2 = PolynomialHistory((0.0, 0.0, 1.0))
    d_t = (duhamel_solution(ramp2, xs, ts + dt) - duhamel_solution(ramp2, xs, ts - dt)) / (2 * dt)
    d_xx = (duhamel_solution(ramp2, xs + hh, ts) - 2 * duhamel_solution(ramp2, xs, ts)
            + duhamel_solution(ramp2, xs - hh, ts)) / hh**2
    record("duhamel_pde_residual", abs(d_t - d_xx), 1e-3)

    return checks, all(ok for (_, _, _, ok) in checks)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="taylormarch",
                                 description="Taylor-series time-marching experiment harness")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute one configured experiment")
    run.add_argument("--config", required=True, help="path to the JSON config")
    run.add_argument("--out", default=None, help="CSV output path")
    run.add_argument("--strict", action="store_true",
                     help="exit 4 when an oracle delta exceeds oracle_tol")
    run.add_argument("--full-precision", action="store_true",
                     help="emit CSV values at full precision")

    sweep = sub.add_parser("sweep", help="time-step halving convergence study")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--halve-dt", type=int, required=True, metavar="K",
                       help="number of halvings (>= 2)")
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--reference", choices=("auto", "oracle", "finest"), default="auto")

    sub.add_parser("validate", help="run the oracle-equivalence suite")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "validate":
        checks, ok = run_validate()
        width = max(len(name) for name, *_ in checks)
        for name, value, tol, passed in checks:
            tag = "PASS" if passed else "FAIL"
            print(f"{tag}  {name:<{width}}  value={value:.3e}  tol={tol:.1e}")
        print(f"{'all checks passed' if ok else 'FAILURES present'}")
        return EXIT_OK if ok else EXIT_ORACLE

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "run":
        try:
            report = run_experiment(cfg)
        except InstabilityError as exc:
            print(f"instability: {exc}", file=sys.stderr)
            return EXIT_INSTABILITY
        out = args.out or cfg.get("out") or f"{cfg.problem}.csv"
        report.write_csv(out, full_precision=args.full_precision)
        print(report.summary())
        print(f"wrote {out}")
        if args.strict and report.oracle_deltas:
            worst = max(report.oracle_deltas.values())
            if worst > cfg.oracle_tol:
                print(f"oracle mismatch: {worst:.3e} > {cfg.oracle_tol:.1e}", file=sys.stderr)
                return EXIT_ORACLE
        return EXIT_OK

    if args.command == "sweep":
        try:
            sweep = run_sweep(cfg, args.halve_dt, args.reference)
        except InstabilityError as exc:
            print(f"instability: {exc}", file=sys.stderr)
            return EXIT_INSTABILITY
        print(sweep.summary())
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(sweep.to_csv())
            print(f"wrote {args.out}")
        return EXIT_OK

    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
