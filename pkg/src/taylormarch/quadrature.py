"""Adaptive quadrature of the weakly singular history kernels.

The kernels int_0^t T_s(tau) (t - tau)^(-nu) dtau appear throughout the
boundary-flux formulas.  The substitution u = sqrt(t - tau) turns the
integrand into 2 T_s(t - u^2) u^(1 - 2 nu), which is integrable only when
the history vanishes fast enough at tau -> t; when it does not, the
operation reports non-convergence instead of returning a number.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad


class QuadratureError(RuntimeError):
    """Quadrature failed to converge; carries the achieved error estimate."""

    def __init__(self, message: str, achieved_error: float = float("nan")):
        self.achieved_error = achieved_error
        super().__init__(message)


def adaptive_quad(fn, a: float, b: float, tol: float = 1e-10, limit: int = 400,
                  points=None) -> float:
    """scipy.integrate.quad with non-convergence escalated to QuadratureError."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(fn, a, b, epsabs=tol, epsrel=tol, limit=limit, points=points)
        except IntegrationWarning:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                val, err = quad(fn, a, b, epsabs=tol, epsrel=tol, limit=limit, points=points)
            raise QuadratureError(
                f"quadrature did not converge (achieved error estimate {err:.3g})", err
            )
    if not np.isfinite(val):
        raise QuadratureError("quadrature returned a non-finite value")
    return val


def kernel_integral(ts, t: float, nu: float, route: str = "substitution",
                    tol: float = 1e-10) -> float:
    """int_0^t T_s(tau) (t - tau)^(-nu) dtau.

    route="substitution" integrates over u = sqrt(t - tau) (the default);
    route="direct" integrates over tau as an independent cross-check.
    """
    if t <= 0:
        raise ValueError("kernel integral needs t > 0")
    scale = max(abs(float(ts(tau))) for tau in np.linspace(0.0, t, 17))
    end = abs(float(ts(t)))
    if nu >= 1.0 and end > 1e-9 * max(scale, 1.0):
        raise QuadratureError(
            f"history does not vanish at the endpoint (T_s(t) = {end:.3g}); the "
            f"(t - tau)^(-{nu}) kernel integral diverges -- supply a vanishing "
            "history or use the regularized flux route"
        )
    if route == "substitution":
        root = np.sqrt(t)

        def fn(u):
            return 2.0 * ts(t - u * u) * u ** (1.0 - 2.0 * nu)

        return adaptive_quad(fn, 0.0, root, tol=tol)
    if route == "direct":
        def fn(tau):
            return ts(tau) * (t - tau) ** (-nu)

        return adaptive_quad(fn, 0.0, t, tol=tol, limit=800)
    raise ValueError(f"unknown route {route!r}")
