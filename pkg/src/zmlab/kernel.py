"""The smoothing kernels f_r(x) = (1/2 pi i) int_(c) Gamma(s) x^{-s} s^{-r} ds.

Three routes that share no code path:

``fr_mellin``
    Gauss-Legendre panels on the truncated vertical line Re s = c.
``fr_closed_form``
    Adaptive quadrature of (1/r!) int_x^inf log^r(t/x) e^{-t} dt.
``fr_ode``
    Integrates the system d f_k / du = -f_{k-1}, u = log x, downward from
    a point where every f_k is below 1e-14, seeded with f_0 = e^{-x}.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import QuadratureError
from .numerics import panel_nodes
from .zeta import log_gamma_array


class Method(str, enum.Enum):
    MELLIN = "MELLIN"
    CLOSED_FORM = "CLOSED_FORM"
    ODE = "ODE"


@dataclass(frozen=True)
class KernelValue:
    r: int
    x: float
    value: float
    method: Method
    err_est: float

    def to_dict(self) -> dict:
        return {"r": self.r, "x": self.x, "value": self.value,
                "method": self.method.value, "err_est": self.err_est}


def upper_envelope(r: int, x: float) -> float:
    """x^{-r} e^{-x}, an upper bound for f_r(x) on x > 0."""
    return x ** (-r) * math.exp(-x)


def lower_envelope(r: int, x: float) -> float:
    """log^r(1/x) / (r! e), a lower bound for f_r(x) when 0 < x <= 1 and r >= 1."""
    return math.log(1.0 / x) ** r / (math.factorial(r) * math.e)


def _check(r: int, x: float) -> None:
    if r < 0 or int(r) != r:
        raise ValueError("r must be a non-negative integer")
    if not x > 0:
        raise ValueError("x must be positive")


# --------------------------------------------------------------------------
# vertical line
# --------------------------------------------------------------------------

def _gamma_bound(c: float, t: float) -> float:
    """Stirling-type upper bound for |Gamma(c + it)|, c >= 1, t > 0."""
    z = complex(c, t)
    arg = math.atan2(t, c)
    return math.sqrt(2 * math.pi) * abs(z) ** (c - 0.5) * math.exp(-t * arg - c + 1 / (6 * abs(z)))


def _line_integral(r: int, x: float, c: float, t_cut: float, width: float, order: int) -> float:
    t, w = panel_nodes(0.0, t_cut, width, order)
    s = c + 1j * t
    integrand = np.exp(log_gamma_array(s) - s * math.log(x)) * s ** (-r)
    # conjugate symmetry of the integrand folds [-T, T] onto [0, T]
    return float((w * integrand.real).sum() / math.pi)


def fr_mellin(r: int, x: float, c: float = 1.0, t_cut: float = 60.0) -> KernelValue:
    """f_r(x) from the Mellin-Barnes line integral truncated at |Im s| = t_cut."""
    _check(r, x)
    if c < 1.0:
        raise ValueError("the line Re s = c needs c >= 1")
    if t_cut < 50.0:
        raise ValueError("t_cut must be >= 50")
    tail_rate = math.pi / 2 - max(0.0, c - 0.5 - r) / t_cut
    tail = _gamma_bound(c, t_cut) * x ** (-c) * abs(complex(c, t_cut)) ** (-r) / tail_rate / math.pi
    if tail > 1e-8:
        raise QuadratureError(f"tail envelope {tail:.3g} exceeds 1e-8; increase t_cut")
    fine = _line_integral(r, x, c, t_cut, 0.5, 24)
    coarse = _line_integral(r, x, c, t_cut, 1.0, 24)
    return KernelValue(r, x, fine, Method.MELLIN, abs(fine - coarse) + tail)


# --------------------------------------------------------------------------
# closed form
# --------------------------------------------------------------------------

def _closed_tail(r: int, x: float, upper: float) -> float:
    # log^r(t/x) <= log^r(U/x) (t/U)^r for t >= U, then int (t/U)^r e^-t
    gam = special.gammaincc(r + 1, upper) * special.gamma(r + 1)
    return math.log(upper / x) ** r * gam / upper ** r / math.factorial(r)


def fr_closed_form(r: int, x: float) -> KernelValue:
    """f_r(x) = (1/r!) int_x^inf log^r(t/x) e^{-t} dt (r = 0 gives e^{-x})."""
    _check(r, x)
    if r > 30:
        raise ValueError("r must be <= 30")
    if r == 0:
        return KernelValue(0, x, math.exp(-x), Method.CLOSED_FORM, 0.0)
    upper = x + 40.0 * (r + 1)
    lf = math.lgamma(r + 1)
    # t = x + u keeps the endpoint zero of order r at u = 0
    f = lambda u: math.exp(r * math.log(math.log1p(u / x)) - x - u - lf) if u > 0 else 0.0  # noqa: E731
    val, err = integrate.quad(f, 0.0, upper - x, epsabs=1e-14, epsrel=1e-13, limit=400,
                              points=[min(1.0, upper - x), min(r + 1.0, upper - x)])
    tail = _closed_tail(r, x, upper)
    total_err = err + tail
    if total_err > 1e-10 * max(1.0, val):
        raise QuadratureError(f"closed-form quadrature error {total_err:.3g} above target")
    return KernelValue(r, x, val, Method.CLOSED_FORM, total_err)


def fr_closed_form_values(R: int, xs) -> np.ndarray:
    """f_R at many points through the closed form."""
    xs = np.asarray(xs, dtype=float)
    if R == 0:
        return np.exp(-xs)
    return np.array([fr_closed_form(R, float(x)).value for x in xs])


# --------------------------------------------------------------------------
# ODE / iterated integration
# --------------------------------------------------------------------------

MAX_ODE_DEPTH = 10
ODE_FLOOR = 1e-14


def _ode_start(r: int, x: float) -> float:
    u = max(x, 1.0) + 1.0
    while upper_envelope(1, u) > ODE_FLOOR or upper_envelope(r, u) > ODE_FLOOR:
        u += 1.0
    return u


def _ode_solve(r: int, x: float, rtol: float) -> float:
    x_hi = _ode_start(r, x)

    def rhs(u, y):
        prev = np.empty_like(y)
        prev[0] = math.exp(-math.exp(u))
        prev[1:] = y[:-1]
        return -prev

    sol = integrate.solve_ivp(rhs, (math.log(x_hi), math.log(x)), np.zeros(r),
                              method="DOP853", rtol=rtol, atol=1e-17)
    if not sol.success:
        raise QuadratureError(f"ODE integration failed: {sol.message}")
    return float(sol.y[-1, -1])


def fr_ode(r: int, x: float) -> KernelValue:
    """f_r(x) from f_k(x) = int_x^inf f_{k-1}(t) dt / t, integrated as an ODE in log x."""
    _check(r, x)
    if r > MAX_ODE_DEPTH:
        raise ValueError(f"nesting depth {r} exceeds budget {MAX_ODE_DEPTH}")
    if r == 0:
        return KernelValue(0, x, math.exp(-x), Method.ODE, 0.0)
    fine = _ode_solve(r, x, 1e-13)
    coarse = _ode_solve(r, x, 1e-10)
    # dropping f_k(x_hi) <= 1e-14 shifts every later level by at most that much
    err = abs(fine - coarse) + r * ODE_FLOOR
    return KernelValue(r, x, fine, Method.ODE, err)


def kernel(r: int, x: float, method: Method | str = Method.CLOSED_FORM) -> KernelValue:
    method = Method(method) if not isinstance(method, Method) else method
    if method is Method.MELLIN:
        return fr_mellin(r, x)
    if method is Method.ODE:
        return fr_ode(r, x)
    return fr_closed_form(r, x)
