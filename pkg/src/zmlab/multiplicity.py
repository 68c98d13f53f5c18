"""Multiplicity certification and the Jensen / moment probes.

Certification counts zeros inside a small circle with the argument
principle, ``(1/2 pi i) \\oint f'/f``, integrated by the trapezoid rule.
Both the certifier and the Jensen probe accept any analytic function, so
tests can swap zeta for polynomials whose zeros are known exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bounds import BoundReport, FormulaId
from .errors import CertificationError, QuadratureError
from .numerics import adaptive_simpson, circle_nodes
from .zeros import ZeroRecord
from .zeta import SPoint, as_complex, zeta_and_deriv_array, zeta_array

ArrayFunc = Callable[[np.ndarray], np.ndarray]

ACCEPT_RESIDUAL = 0.1
TARGET_RESIDUAL = 0.01
MAX_NODES = 2 ** 16
MIN_RADIUS = 1e-4


@dataclass(frozen=True)
class Certificate:
    rho: SPoint
    multiplicity: int
    radius: float
    winding_residual: float
    nodes: int
    raw_winding: complex

    def to_dict(self) -> dict:
        return {"rho": [self.rho.sigma, self.rho.t], "multiplicity": self.multiplicity,
                "radius": self.radius, "winding_residual": self.winding_residual,
                "nodes": self.nodes}


def _zeta_logderiv(w: np.ndarray) -> np.ndarray:
    v, dv, _, _ = zeta_and_deriv_array(w)
    return dv / v


def polynomial_logderiv(roots: Sequence[complex], mult: Sequence[int] | None = None) -> ArrayFunc:
    """f'/f for f(s) = prod (s - a_j)^{m_j}."""
    roots = np.asarray(roots, dtype=complex)
    mult = np.ones(roots.size) if mult is None else np.asarray(mult, dtype=float)

    def g(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        return (mult[None, :] / (w[:, None] - roots[None, :])).sum(axis=1)
    return g


def winding_number(logderiv: ArrayFunc, center: complex, radius: float, n: int) -> complex:
    """Trapezoid approximation of (1/2 pi i) times the contour integral of f'/f."""
    w, e = circle_nodes(center, radius, n)
    # dw = i r e^{i theta} d theta, so (1/2 pi i) int = mean(f'/f * r e^{i theta})
    return complex(np.mean(logderiv(w) * radius * e))


def _isolating_radius(rho: complex, radius: float, zeros: Sequence[ZeroRecord] | None) -> float:
    if not zeros:
        return radius
    others = [abs(rho - z.rho) for z in zeros if abs(rho - z.rho) > 1e-8]
    if not others:
        return radius
    nearest = min(others)
    while radius >= nearest * 0.9 and radius >= MIN_RADIUS:
        radius *= 0.5
    return radius


def certify_multiplicity(rho, radius: float = 0.05,
                         zeros: Sequence[ZeroRecord] | None = None,
                         logderiv: ArrayFunc | None = None,
                         start_nodes: int = 32, max_nodes: int = MAX_NODES) -> Certificate:
    """Count the zeros inside the circle |s - rho| = radius (with multiplicity).

    The radius is halved until no other cached zero lies within it. Nodes
    double until the raw winding number is within 0.01 of an integer and
    stable between refinements; a residual above 0.1 refuses the certificate.
    """
    rho_c = as_complex(rho)
    if radius < MIN_RADIUS:
        raise ValueError(f"radius must be >= {MIN_RADIUS:g}")
    r = _isolating_radius(rho_c, radius, zeros)
    if r < MIN_RADIUS:
        raise CertificationError("cannot isolate the zero above the minimum radius")
    f = logderiv or _zeta_logderiv
    n = start_nodes
    prev = None
    while True:
        raw = winding_number(f, rho_c, r, n)
        m = int(round(raw.real))
        resid = abs(raw - m)
        stable = prev is not None and abs(raw - prev) < TARGET_RESIDUAL
        if resid < TARGET_RESIDUAL and stable:
            break
        if n >= max_nodes:
            if resid < ACCEPT_RESIDUAL:
                break
            raise CertificationError(
                f"node cap {max_nodes} reached with winding residual {resid:.3g}",
                residual=resid)
        prev, n = raw, 2 * n
    return Certificate(SPoint.from_complex(rho_c), m, r, resid, n, raw)


def certify_zeros(zeros: Sequence[ZeroRecord], radius: float = 0.05) -> Sequence[ZeroRecord]:
    """Certify every record in place and return the same container (scan range kept)."""
    for z in zeros:
        cert = certify_multiplicity(z.rho, radius, zeros)
        z.multiplicity = cert.multiplicity
        z.cert_radius = cert.radius
        z.cert_residual = cert.winding_residual
    return zeros


# --------------------------------------------------------------------------
# Jensen
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class JensenSides:
    lhs: float
    rhs: float
    nodes: int
    interior: int


def jensen_sides(func: ArrayFunc, center: complex, R: float,
                 zeros: Sequence[complex], mult: Sequence[int] | None = None,
                 tol: float = 1e-12, start_nodes: int = 64,
                 max_nodes: int = MAX_NODES, boundary_tol: float = 1e-6) -> JensenSides:
    """Both sides of Jensen's formula for ``f`` on the disk |z - center| <= R.

    lhs = log|f(center)| + sum over zeros in the open disk of log(R/|rho - center|)
    rhs = mean of log|f| on the boundary circle (periodic trapezoid).
    """
    zeros = np.asarray(zeros, dtype=complex)
    mult = np.ones(zeros.size, dtype=int) if mult is None else np.asarray(mult, dtype=int)
    d = np.abs(zeros - center)
    if np.any(np.abs(d - R) < boundary_tol):
        raise QuadratureError("a zero lies on the Jensen circle (log singularity)")
    inside = d < R
    f0 = complex(np.asarray(func(np.array([center])))[0])
    lhs = math.log(abs(f0)) + float((mult[inside] * np.log(R / d[inside])).sum())
    n, prev = start_nodes, None
    while True:
        w, _ = circle_nodes(center, R, n)
        rhs = float(np.mean(np.log(np.abs(func(w)))))
        if prev is not None and abs(rhs - prev) <= tol:
            break
        if n >= max_nodes:
            raise QuadratureError(f"Jensen boundary mean did not settle with {n} nodes")
        prev, n = rhs, 2 * n
    return JensenSides(lhs, rhs, n, int(mult[inside].sum()))


def jensen_probe(gamma: float, R: float = 0.5,
                 zeros: Sequence[ZeroRecord] | None = None) -> JensenSides:
    """Jensen's formula for f(z) = zeta(1 + i gamma + z)."""
    if gamma < 10.0:
        raise ValueError("gamma must be >= 10")
    center = complex(1.0, gamma)
    if abs(zeta_array(center)[0][0]) <= 1e-8:
        raise ValueError("|zeta(1 + i gamma)| too small")
    zeros = zeros or []
    if any(abs(z.gamma - gamma) <= 1e-3 for z in zeros):
        raise ValueError("gamma lies within 1e-3 of a zero ordinate")
    rhos = [z.rho for z in zeros]
    mult = [z.multiplicity or 1 for z in zeros]
    return jensen_sides(lambda w: zeta_array(w)[0], center, R, rhos, mult)


# --------------------------------------------------------------------------
# moment bound
# --------------------------------------------------------------------------

def moment_lower_bound(beta: float, gamma: float, delta: float, k: int,
                       tol: float = 1e-9, a: float | None = None,
                       b: float | None = None) -> float:
    """Integral of |zeta(beta + i gamma + i alpha)|^k over alpha in [delta, 2 delta].

    ``a`` / ``b`` override the integration limits (used for additivity checks).
    """
    if not 0.0 < delta < 0.25:
        raise ValueError("delta must lie in (0, 1/4)")
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    if gamma < 10.0:
        raise ValueError("gamma must be >= 10")
    lo = delta if a is None else a
    hi = 2.0 * delta if b is None else b

    def f(alpha: float) -> float:
        return abs(zeta_array(complex(beta, gamma + alpha))[0][0]) ** k
    val, _ = adaptive_simpson(f, lo, hi, tol)
    return val


@dataclass(frozen=True)
class MomentBoundInput:
    beta: float
    gamma: float
    delta: float
    k: int
    ell: float
    o1_const: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.delta < 0.25:
            raise ValueError("delta must lie in (0, 1/4)")
        if self.k not in (1, 2):
            raise ValueError("k must be 1 or 2")
        if not self.ell > 0:
            raise ValueError("ell must be positive")
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")


def ell_power_form(delta: float, gamma: float, A: float) -> float:
    """ell = delta * gamma^(-A / delta)."""
    return delta * gamma ** (-A / delta)


def _moment_value(inp: MomentBoundInput, o1: float, log_ell: float) -> float:
    return (math.log(inp.gamma) - log_ell / inp.k + o1) / math.log(1.0 / inp.delta)


def moment_mult_bound(inp: MomentBoundInput, log_ell: float | None = None) -> BoundReport:
    """(log gamma - (1/k) log ell + O(1)) / log(1/delta).

    ``log_ell`` may be passed directly when ell underflows a double. The
    report flags the result as sensitive when moving the O(1) constant
    across [0, 5] changes the bound by more than 5%.
    """
    le = math.log(inp.ell) if log_ell is None else log_ell
    value = _moment_value(inp, inp.o1_const, le)
    lo, hi = _moment_value(inp, 0.0, le), _moment_value(inp, 5.0, le)
    sensitive = abs(hi - lo) > 0.05 * abs(lo) if lo != 0 else True
    params = {"beta": inp.beta, "gamma": inp.gamma, "delta": inp.delta, "k": inp.k,
              "ell": inp.ell, "log_ell": le, "o1_const": inp.o1_const,
              "o1_sensitive": sensitive}
    notes = "bound moves by more than 5% for O(1) constant in [0, 5]" if sensitive else ""
    return BoundReport(FormulaId.MOMENT, value, params, notes=notes,
                       constants={"o1_const": inp.o1_const})
