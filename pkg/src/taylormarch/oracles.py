"""Analytic and quadrature reference solutions for the half-space heat problem.

Everything here is independent of the finite-difference/Taylor code paths:
the boundary flux via the half-order time derivative of the surface
temperature, the exact convolution (Duhamel) solution, the history-kernel
representations of high spatial derivatives, and the Gaussian moment
closed forms those reduce to.

The derivative kernels are generated from the identity

    d^k/dx^k [x e^(-a x^2)] = -(1/2a) (-sqrt(a))^(k+1) H_{k+1}(sqrt(a) x) e^(-a x^2)

with a = 1/(4 (t - tau)) and H_n the physicists' Hermite polynomials; each
kernel is cross-checked against brute-force differentiation in the test
suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermval
from scipy.special import erf, erfc, gamma

from .quadrature import QuadratureError, adaptive_quad, kernel_integral

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# surface-temperature histories with closed-form half-derivatives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialHistory:
    """T_s(tau) = sum_m coeffs[m] tau^m (coefficients low to high)."""

    coeffs: tuple

    def __call__(self, tau):
        return sum(c * tau**m for m, c in enumerate(self.coeffs))

    def deriv(self, tau):
        return sum(m * c * tau ** (m - 1) for m, c in enumerate(self.coeffs) if m >= 1)

    def half_derivative(self, t: float) -> float:
        """d^(1/2) T_s / dt^(1/2) = sum_m c_m Gamma(m+1)/Gamma(m+1/2) t^(m-1/2)."""
        acc = 0.0
        for m, c in enumerate(self.coeffs):
            acc += c * gamma(m + 1.0) / gamma(m + 0.5) * t ** (m - 0.5)
        return acc

    def shifted_coeffs(self, t: float) -> tuple:
        """Coefficients b_j of the same polynomial in powers of (t - tau)."""
        n = len(self.coeffs)
        b = [0.0] * n
        for m, c in enumerate(self.coeffs):
            for j in range(m + 1):
                b[j] += c * math.comb(m, j) * t ** (m - j) * (-1.0) ** j
        return tuple(b)

    def kernel_integral_closed(self, t: float, nu: float) -> float:
        """Closed form of int_0^t T_s (t-tau)^(-nu) dtau, convergent only when
        every (t - tau)-power below nu - 1 has zero coefficient."""
        b = self.shifted_coeffs(t)
        acc = 0.0
        for j, bj in enumerate(b):
            if abs(bj) < 1e-14 * max(1.0, max(abs(v) for v in b)):
                continue
            if j - nu <= -1.0:
                raise QuadratureError(
                    f"(t-tau)^{j} component makes the (t-tau)^(-{nu}) kernel diverge"
                )
            acc += bj * t ** (j - nu + 1.0) / (j - nu + 1.0)
        return acc


@dataclass(frozen=True)
class ExponentialHistory:
    """T_s(tau) = amplitude * exp(rate * tau)."""

    amplitude: float = 1.0
    rate: float = 0.0

    def __call__(self, tau):
        return self.amplitude * np.exp(self.rate * np.asarray(tau, dtype=float))

    def deriv(self, tau):
        return self.rate * self(tau)

    def half_derivative(self, t: float) -> float:
        a = self.rate
        if a == 0.0:
            return self.amplitude / math.sqrt(math.pi * t)
        if a > 0:
            root = math.sqrt(a)
            return self.amplitude * (root * math.exp(a * t) * erf(root * math.sqrt(t))
                                     + 1.0 / math.sqrt(math.pi * t))
        # decaying history: erf of imaginary argument, use Dawson form
        from scipy.special import dawsn

        root = math.sqrt(-a)
        return self.amplitude * (1.0 / math.sqrt(math.pi * t)
                                 - 2.0 * root / SQRT_PI * dawsn(root * math.sqrt(t)))


# ---------------------------------------------------------------------------
# boundary flux, two analytic routes
# ---------------------------------------------------------------------------


def fractional_flux(ts, t: float, tol: float = 1e-10) -> float:
    """Inward boundary flux -q_s = -(dT/dx)(0) as the half-order time
    derivative of the surface temperature:

        (1/sqrt(pi)) d/dt int_0^t T_s(tau) / sqrt(t - tau) dtau.

    Histories with closed forms (PolynomialHistory, ExponentialHistory) are
    evaluated analytically; any other callable goes through the singular
    quadrature followed by Richardson-extrapolated differentiation.
    """
    if t <= 0:
        raise ValueError("flux defined for t > 0")
    if hasattr(ts, "half_derivative"):
        return float(ts.half_derivative(t))

    def integral(tt: float) -> float:
        root = math.sqrt(tt)
        return adaptive_quad(lambda u: 2.0 * ts(tt - u * u), 0.0, root, tol=tol)

    h = 1e-4 * t
    d1 = (integral(t + h) - integral(t - h)) / (2.0 * h)
    d2 = (integral(t + 0.5 * h) - integral(t - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0 / SQRT_PI


def exact_flux(ts, t: float, ts_deriv=None, tol: float = 1e-10) -> float:
    """Inward boundary flux from the convolution solution:

        -q_s = -(1/(2 sqrt(pi))) int_0^t T_s(tau) (t - tau)^(-3/2) dtau.

    Direct quadrature needs the history to vanish at tau -> t.  Otherwise the
    regularized route (differentiation moved inside the integral,

        (1/sqrt(pi)) [ T_s(0) t^(-1/2) + int_0^t T_s'(tau) (t-tau)^(-1/2) dtau ] )

    is used, which requires the history's derivative.
    """
    if t <= 0:
        raise ValueError("flux defined for t > 0")
    end = abs(float(ts(t)))
    scale = max(abs(float(ts(tau))) for tau in np.linspace(0.0, t, 17))
    if end <= 1e-9 * max(scale, 1.0):
        return -kernel_integral(ts, t, 1.5, tol=tol) / (2.0 * SQRT_PI)

    deriv = ts_deriv
    if deriv is None and hasattr(ts, "deriv"):
        deriv = ts.deriv
    if deriv is None:
        h = 1e-6 * max(t, 1.0)
        deriv = lambda tau: (ts(tau + h) - ts(max(tau - h, 0.0))) / (h + min(h, tau))  # noqa: E731
    root = math.sqrt(t)
    tail = adaptive_quad(lambda u: 2.0 * deriv(t - u * u), 0.0, root, tol=tol)
    return (float(ts(0.0)) / root + tail) / SQRT_PI


# ---------------------------------------------------------------------------
# Duhamel convolution solution
# ---------------------------------------------------------------------------


def duhamel_solution(ts, x: float, t: float, tol: float = 1e-11) -> float:
    """Exact temperature of the half-space heated by T_s(t) at x = 0:

        T(x, t) = (2/sqrt(pi)) int_{x/(2 sqrt(t))}^inf T_s(t - x^2/(4 xi^2)) e^(-xi^2) dxi.

    At x = 0 this returns T_s(t) exactly.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0.0:
        return float(ts(t))
    c = x / (2.0 * math.sqrt(t))

    def fn(xi):
        return ts(t - x * x / (4.0 * xi * xi)) * np.exp(-xi * xi)

    val = adaptive_quad(fn, c, np.inf, tol=tol)
    return 2.0 / SQRT_PI * val


def duhamel_erfc_profile(x: float, t: float) -> float:
    """Closed form of the Duhamel solution for T_s = 1."""
    return float(erfc(x / (2.0 * math.sqrt(t))))


# ---------------------------------------------------------------------------
# history-kernel representations of spatial derivatives
# ---------------------------------------------------------------------------


def derivative_kernel(k: int, x, s):
    """Bracket B_k with  d^k T/dx^k = (1/(2 sqrt(pi))) int T_s s^(-3/2) e^(-x^2/4s) B_k dtau."""
    a = 1.0 / (4.0 * np.asarray(s, dtype=float))
    ra = np.sqrt(a)
    coeffs = np.zeros(k + 2)
    coeffs[k + 1] = 1.0
    h = hermval(ra * np.asarray(x, dtype=float), coeffs)
    return -(1.0 / (2.0 * a)) * (-ra) ** (k + 1) * h


def boundary_odd_derivative(ts, t: float, k: int, tol: float = 1e-10) -> float:
    """Limit x -> 0+ of the k-th spatial derivative, k = 2n + 1 odd:

        (-1)^n (2n+1)! / (4^n n! 2 sqrt(pi)) * int_0^t T_s (t-tau)^(-(n + 3/2)) dtau.
    """
    if k % 2 != 1:
        raise ValueError("the x -> 0 boundary limit exists for odd derivative orders")
    n = (k - 1) // 2
    coef = (-1.0) ** n * math.factorial(2 * n + 1) / (4.0**n * math.factorial(n) * 2.0 * SQRT_PI)
    if isinstance(ts, PolynomialHistory):
        j = ts.kernel_integral_closed(t, n + 1.5)
    else:
        j = kernel_integral(ts, t, n + 1.5, tol=tol)
    return coef * j


def spatial_derivative_integral(ts, x: float, t: float, k: int, tol: float = 1e-10) -> float:
    """d^k T/dx^k at (x, t) from the history-kernel representation, k in 2..7.

    At x = 0 odd orders reduce to the boundary limit; even orders have no
    pointwise x = 0 limit in this representation.
    """
    if not 1 <= k <= 7:
        raise ValueError("k must lie in 1..7")
    if x < 0:
        raise ValueError("x must be non-negative")
    if t <= 0:
        raise ValueError("t must be positive")
    if x == 0.0:
        return boundary_odd_derivative(ts, t, k, tol=tol)

    s_floor = x * x / (4.0 * 700.0)  # below this the Gaussian factor underflows

    def fn(tau):
        s = t - tau
        if s <= s_floor:
            return 0.0
        return (ts(tau) * s**-1.5 * np.exp(-x * x / (4.0 * s))
                * derivative_kernel(k, x, s))

    val = adaptive_quad(fn, 0.0, t, tol=tol, limit=800)
    return val / (2.0 * SQRT_PI)


def taylor_series_field(ts, x: float, t: float, order: int) -> float:
    """The one-big-step Taylor reconstruction of the temperature field,

        T~(x, t) = sum_{n=1..order} (t^n / n!) d^(2n) T/dx^(2n) (x, t),

    used to measure the deficiency of the truncated series against the
    Duhamel solution."""
    acc = 0.0
    for n in range(1, order + 1):
        acc += t**n / math.factorial(n) * spatial_derivative_integral(ts, x, t, 2 * n)
    return acc


# ---------------------------------------------------------------------------
# Gaussian moment closed forms
# ---------------------------------------------------------------------------


def gaussian_tail(c: float) -> float:
    """int_c^inf e^(-xi^2) dxi."""
    return 0.5 * SQRT_PI * float(erfc(c))


def gaussian_moment_integral(x: float, t: float, power: int) -> float:
    """Closed form of 2 int_c^inf xi^power e^(-xi^2) dxi with c = x/(2 sqrt(t)),
    even powers up to 8, by the parts recurrence 2 I_n = c^(n-1) e^(-c^2) + (n-1) I_(n-2)."""
    if power not in (0, 2, 4, 6, 8):
        raise ValueError("power must be an even integer <= 8")
    c = x / (2.0 * math.sqrt(t))
    e = math.exp(-c * c)
    tail = gaussian_tail(c)
    if power == 0:
        return 2.0 * tail
    if power == 2:
        return c * e + tail
    if power == 4:
        return (c**3 + 1.5 * c) * e + 1.5 * tail
    if power == 6:
        return (c**5 + 2.5 * c**3 + 3.75 * c) * e + 3.75 * tail
    return (c**7 + 3.5 * c**5 + 8.75 * c**3 + 13.125 * c) * e + 13.125 * tail


def deficiency_moment(x: float, t: float) -> float:
    """Closed form of the second-order deficiency integral

        int_c^inf 2 (t^2 xi^4 / x^4) e^(-xi^2) (4 xi^4 - 20 xi^2 + 15) dxi
            = (c^3/4 - 3c/8) e^(-c^2),   c = x/(2 sqrt(t)).

    The Gaussian-tail parts cancel exactly, leaving a purely local expression.
    """
    c = x / (2.0 * math.sqrt(t))
    return (c**3 / 4.0 - 3.0 * c / 8.0) * math.exp(-c * c)
