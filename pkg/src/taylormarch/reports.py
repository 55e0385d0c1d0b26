"""Run reports and CSV emission.

CSV layout (one row per output point):

    problem,order,tau,r_or_x,theta,value

1-D problems leave the theta column empty.  Values print at 6 significant
digits by default; full precision (repr-exact round trip) on request.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

CSV_HEADER = "problem,order,tau,r_or_x,theta,value"


@dataclass
class RunReport:
    problem: str
    orders: list
    rows: list = dc_field(default_factory=list)   # (order, tau, r_or_x, theta|None, value)
    timings: dict = dc_field(default_factory=dict)
    oracle_deltas: dict = dc_field(default_factory=dict)
    solver_residuals: list = dc_field(default_factory=list)
    slopes: dict = dc_field(default_factory=dict)
    notes: list = dc_field(default_factory=list)

    def add_rows(self, order, tau, coords, values, second_coords=None):
        values = np.atleast_1d(values)
        coords = np.atleast_1d(coords)
        if second_coords is None:
            for x, v in zip(coords, values):
                self.rows.append((order, tau, float(x), None, float(v)))
        else:
            for x, th, v in zip(coords, second_coords, values):
                self.rows.append((order, tau, float(x), float(th), float(v)))

    def to_csv(self, full_precision: bool = False) -> str:
        fmt = "{:.17g}" if full_precision else "{:.6g}"

        def num(v):
            return fmt.format(v)

        lines = [CSV_HEADER]
        for order, tau, x, theta, value in self.rows:
            th = "" if theta is None else num(theta)
            lines.append(f"{self.problem},{order},{num(tau)},{num(x)},{th},{num(value)}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str, full_precision: bool = False) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv(full_precision))

    def summary(self) -> str:
        lines = [f"problem: {self.problem}", f"orders: {self.orders}",
                 f"rows: {len(self.rows)}"]
        for order in self.orders:
            if order in self.timings:
                lines.append(f"order {order}: {self.timings[order]:.3f} s")
        for name, delta in self.oracle_deltas.items():
            lines.append(f"oracle {name}: {delta:.3e}")
        for name, slope in self.slopes.items():
            lines.append(f"slope {name}: {slope}")
        lines.extend(self.notes)
        return "\n".join(lines)


def fit_observed_order(dts, errors) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    good = errors > 0
    if good.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(dts[good]), np.log(errors[good]), 1)[0])


@dataclass
class SweepReport:
    problem: str
    dts: list
    errors: dict          # order -> list of errors per dt
    slopes: dict          # order -> fitted slope (nan => errors at round-off)
    reference: str

    def to_csv(self) -> str:
        lines = ["problem,order,dt,error"]
        for order, errs in sorted(self.errors.items()):
            for dt, e in zip(self.dts, errs):
                lines.append(f"{self.problem},{order},{dt:.10g},{e:.10g}")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        lines = [f"problem: {self.problem} (reference: {self.reference})"]
        for order in sorted(self.errors):
            slope = self.slopes[order]
            tag = "exact (errors at round-off)" if math.isnan(slope) else f"{slope:.2f}"
            errs = ", ".join(f"{e:.3e}" for e in self.errors[order])
            lines.append(f"order {order}: errors [{errs}] -> observed order {tag}")
        return "\n".join(lines)
