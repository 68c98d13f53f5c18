"""Evaluators for the multiplicity bounds and the Levinson-style machinery.

Every bound carries unspecified absolute constants. They live in
:class:`BoundConstants` (all default to 1.0) and each :class:`BoundReport`
lists the constants it actually used, so nothing is silently calibrated.
Reports for inputs outside a formula's range come back with
``valid=False``, a note, and ``value=0.0`` (never NaN or infinity).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import optimize, special

from .errors import PoleError, QuadratureError
from .numerics import circle_nodes, golden_section
from .zeros import ZeroRecord, _require_coverage
from .zeta import zeta_array, zeta_logderiv_array, as_complex


class FormulaId(str, enum.Enum):
    THM1 = "THM1"
    THM2 = "THM2"
    THM2_OPT = "THM2_OPT"
    THM3_M = "THM3_M"
    THM3_BETA = "THM3_BETA"
    THM4_BETA = "THM4_BETA"
    THM4_M = "THM4_M"
    CLASSICAL = "CLASSICAL"
    WINDOW = "WINDOW"
    MOMENT = "MOMENT"


@dataclass(frozen=True)
class BoundConstants:
    c_thm1_loglog: float = 1.0
    c_thm3: float = 1.0
    c2_thm3: float = 1.0
    c_thm4: float = 1.0
    o_envelope: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"constant {name} must be a positive finite number")


DEFAULT_CONSTANTS = BoundConstants()


@dataclass
class BoundReport:
    formula_id: FormulaId
    value: float
    params: dict = field(default_factory=dict)
    valid: bool = True
    notes: str = ""
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("BoundReport.value must be finite")

    def to_dict(self) -> dict:
        return {
            "formula_id": self.formula_id.value,
            "value": self.value,
            "params": dict(self.params),
            "valid": self.valid,
            "notes": self.notes,
            "constants": dict(self.constants),
        }


def _invalid(fid: FormulaId, note: str, params: dict, constants: dict | None = None) -> BoundReport:
    return BoundReport(fid, 0.0, params, valid=False, notes=note, constants=constants or {})


def _loglog(gamma: float) -> float:
    return math.log(math.log(gamma))


# --------------------------------------------------------------------------
# maxima of log|zeta|
# --------------------------------------------------------------------------

def _log_abs_zeta(sig: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.log(np.abs(zeta_array(sig + 1j * t)[0]))


def _grid_level(gamma, sigma_min, sigma_max, w, g):
    ts = np.linspace(gamma - w, gamma + w, g + 1)
    if sigma_max > sigma_min:
        ss = np.linspace(sigma_min, sigma_max, g + 1)
    else:
        ss = np.array([sigma_min])
    S, T = np.meshgrid(ss, ts, indexing="ij")
    vals = _log_abs_zeta(S.ravel(), T.ravel()).reshape(S.shape)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[i, j])
    # one local refinement pass inside the neighbouring cells
    dt = ts[1] - ts[0]
    t_lo, t_hi = max(ts[0], ts[j] - dt), min(ts[-1], ts[j] + dt)
    if ss.size > 1:
        ds = ss[1] - ss[0]
        s_lo, s_hi = max(ss[0], ss[i] - ds), min(ss[-1], ss[i] + ds)
        res = optimize.minimize(
            lambda p: -_log_abs_zeta(np.array([p[0]]), np.array([p[1]]))[0],
            x0=[ss[i], ts[j]], bounds=[(s_lo, s_hi), (t_lo, t_hi)], method="L-BFGS-B")
    else:
        res = optimize.minimize(
            lambda p: -_log_abs_zeta(np.array([sigma_min]), np.array([p[0]]))[0],
            x0=[ts[j]], bounds=[(t_lo, t_hi)], method="L-BFGS-B")
    return max(best, float(-res.fun))


def measure_max(gamma: float, sigma_min: float, t_half_width: float, grid: int,
                sigma_max: float = 3.0) -> float:
    """Grid maximum of log|zeta(sigma + i(gamma + t))| over the rectangle.

    ``sigma`` ranges over ``[sigma_min, sigma_max]`` (pass equal values for a
    vertical segment) and ``|t| <= t_half_width``. The grid levels
    ``grid, grid/2, ...`` (down to 16) are nested and each gets one local
    refinement pass, so doubling ``grid`` never lowers the result. This is
    a lower estimate of the true maximum.
    """
    if gamma < 10.0:
        raise ValueError("gamma must be >= 10")
    if grid < 16:
        raise ValueError("grid must be >= 16")
    sigma_max = max(sigma_min, min(sigma_max, 3.0))
    best = -math.inf
    g = grid
    while g >= 16:
        best = max(best, _grid_level(gamma, sigma_min, sigma_max, t_half_width, g))
        if g % 2:
            break
        g //= 2
    return best


# --------------------------------------------------------------------------
# thm1 (Jensen) and thm2 (three circles)
# --------------------------------------------------------------------------

def _check_strip(beta: float, gamma: float, gamma_min: float = 10.0) -> str | None:
    if not beta > 0.5:
        return "beta must exceed 1/2"
    if not beta < 1.0:
        return "beta must be below 1"
    if gamma < gamma_min:
        return f"gamma must be >= {gamma_min:g}"
    return None


def thm1_bound(beta: float, gamma: float, max_log_zeta: float,
               k: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """(max log|zeta| + C log log gamma) / log(1/(2 - 2 beta))."""
    params = {"beta": beta, "gamma": gamma, "max_log_zeta": max_log_zeta}
    used = {"c_thm1_loglog": k.c_thm1_loglog}
    bad = _check_strip(beta, gamma)
    if bad:
        return _invalid(FormulaId.THM1, bad, params, used)
    denom = math.log(1.0 / (2.0 - 2.0 * beta))
    num = max_log_zeta + k.c_thm1_loglog * _loglog(gamma)
    params.update(denominator=denom, numerator=num)
    return BoundReport(FormulaId.THM1, num / denom, params, notes=(
        "max_log_zeta is a grid estimate; the bound needs the true maximum"), constants=used)


def _thm2_parts(beta: float, c: float):
    e = (c + beta - 1.0) / (c + beta - 0.5)
    log_brace = math.log(c / (1.0 - beta)) + e * math.log((beta - 0.5) / c)
    return e, log_brace


def thm2_bound(beta: float, gamma: float, c: float, m_log: float,
               k: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """thm2 bound for a free constant c > 1 - beta.

    ``m_log`` is log M, M the maximum of |zeta(1/2 + i gamma + i t)| for
    |t| <= log^2 gamma. The equalising choice of X depends on the
    multiplicity being bounded; it is reported for r equal to the bound.
    """
    params = {"beta": beta, "gamma": gamma, "c": c, "m_log": m_log}
    used = {"c_thm1_loglog": k.c_thm1_loglog}
    bad = _check_strip(beta, gamma)
    if bad:
        return _invalid(FormulaId.THM2, bad, params, used)
    if not c > 1.0 - beta:
        return _invalid(FormulaId.THM2, "c must exceed 1 - beta", params, used)
    e, denom = _thm2_parts(beta, c)
    params.update(exponent=e, denominator=denom)
    if not denom > 0.0:
        return _invalid(FormulaId.THM2, "denominator is not positive for this c", params, used)
    num = e * m_log + k.c_thm1_loglog * _loglog(gamma)
    value = num / denom
    # log X = (log M + r log(c/(beta - 1/2))) / (c + beta - 1/2)
    params["log_X_at_r"] = (m_log + value * math.log(c / (beta - 0.5))) / (c + beta - 0.5)
    params["numerator"] = num
    return BoundReport(FormulaId.THM2, value, params, constants=used)


def thm2_bound_reduced(beta: float, gamma: float, m_log: float,
                       k: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """thm2 with c = 3/2 - beta written in its reduced form.

    log M / log{(3/2 - beta)(beta - 1/2)/(1 - beta)^2}; the log log term is
    carried with the factor 2 that the reduction produces.
    """
    params = {"beta": beta, "gamma": gamma, "c": 1.5 - beta, "m_log": m_log}
    used = {"c_thm1_loglog": k.c_thm1_loglog}
    bad = _check_strip(beta, gamma)
    if bad:
        return _invalid(FormulaId.THM2, bad, params, used)
    denom = math.log((1.5 - beta) * (beta - 0.5) / (1.0 - beta) ** 2)
    params["denominator"] = denom
    if not denom > 0.0:
        return _invalid(FormulaId.THM2, "denominator is not positive", params, used)
    value = (m_log + 2.0 * k.c_thm1_loglog * _loglog(gamma)) / denom
    return BoundReport(FormulaId.THM2, value, params, constants=used)


def _thm2_objective(beta, gamma, m_log, k):
    def f(c: float) -> float:
        r = thm2_bound(beta, gamma, c, m_log, k)
        return r.value if r.valid else math.inf
    return f


def thm2_optimize_c(beta: float, gamma: float, m_log: float,
                    k: BoundConstants = DEFAULT_CONSTANTS,
                    c_max: float = 10.0, n_scan: int = 400) -> BoundReport:
    """Minimise the thm2 bound over c in (1 - beta + 1e-6, c_max].

    A geometric pre-scan brackets the minimum and golden-section search
    polishes it; the result is deterministic in its inputs.
    """
    params = {"beta": beta, "gamma": gamma, "m_log": m_log}
    bad = _check_strip(beta, gamma)
    if bad:
        return _invalid(FormulaId.THM2_OPT, bad, params)
    c_min = 1.0 - beta + 1e-6
    f = _thm2_objective(beta, gamma, m_log, k)
    cs = np.geomspace(c_min, c_max, n_scan)
    vals = np.array([f(c) for c in cs])
    if not np.isfinite(vals).any():
        return _invalid(FormulaId.THM2_OPT, "no valid c in the search window", params)
    i = int(np.argmin(vals))
    lo, hi = cs[max(i - 1, 0)], cs[min(i + 1, n_scan - 1)]
    c_best, v_best = golden_section(f, lo, hi, tol=1e-13)
    if not v_best <= vals[i]:
        c_best, v_best = float(cs[i]), float(vals[i])
    rep = thm2_bound(beta, gamma, c_best, m_log, k)
    rep.formula_id = FormulaId.THM2_OPT
    rep.params["c_window"] = [c_min, c_max]
    return rep


def crossover_beta(tol: float = 1e-15) -> float:
    """beta in (1/2, 1) where the reduced thm2 and the thm1 denominators meet."""
    def g(b: float) -> float:
        return (math.log((1.5 - b) * (b - 0.5) / (1.0 - b) ** 2)
                - math.log(1.0 / (2.0 - 2.0 * b)))
    lo, hi = 0.5 + 1e-9, 1.0 - 1e-9
    glo = g(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm < 0) == (glo < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# thm3 (power-sum moments)
# --------------------------------------------------------------------------

def subconvexity_exponent(sigma: float, t: float, C: float = 122.0) -> float:
    """log of t^{C(1-sigma)^{3/2}} log^{2/3} t, the near-1-line growth shape.

    Reported as a diagnostic only; the range of validity is implicit.
    """
    return C * (1.0 - sigma) ** 1.5 * math.log(t) + (2.0 / 3.0) * math.log(math.log(t))


def thm3_mult_bound(beta: float, gamma: float,
                    k: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """C (1 - beta)^{3/2} log gamma + C2 log log gamma."""
    params = {"beta": beta, "gamma": gamma}
    used = {"c_thm3": k.c_thm3, "c2_thm3": k.c2_thm3}
    bad = _check_strip(beta, gamma)
    if bad:
        return _invalid(FormulaId.THM3_M, bad, params, used)
    main = k.c_thm3 * (1.0 - beta) ** 1.5 * math.log(gamma)
    tail = k.c2_thm3 * _loglog(gamma)
    value = main + tail
    params.update(main_term=main, loglog_term=tail,
                  lhs_coefficient=beta * math.log(2.0) + (3 * beta - 3) * math.log(1 - beta),
                  log_X_at_r=thm3_log_x(beta, gamma, value, k),
                  subconvexity_log_bound=subconvexity_exponent(3 * beta - 2, gamma)
                  if 3 * beta - 2 >= 0.5 else None)
    return BoundReport(FormulaId.THM3_M, value, params, constants=used)


def thm3_log_x(beta: float, gamma: float, r: float,
               k: BoundConstants = DEFAULT_CONSTANTS) -> float:
    """log of the equalising X for a hypothesised multiplicity r."""
    d = 3.0 - 2.0 * beta
    return (-r * math.log(2.0) - r * math.log(1.0 - beta)
            + k.c_thm3 * (1.0 - beta) ** 1.5 * math.log(gamma)) / d


def thm3_beta_ceiling(r: float, gamma: float, k: BoundConstants = DEFAULT_CONSTANTS,
                      regime_factor: float = 1.0) -> BoundReport:
    """1 - C (r / log gamma)^{2/3}."""
    params = {"r": r, "gamma": gamma}
    used = {"c_thm3": k.c_thm3}
    if r < 1 or gamma < 10.0:
        return _invalid(FormulaId.THM3_BETA, "need r >= 1 and gamma >= 10", params, used)
    value = 1.0 - k.c_thm3 * (r / math.log(gamma)) ** (2.0 / 3.0)
    notes = ""
    ratio = r / _loglog(gamma)
    params["r_over_loglog"] = ratio
    if ratio <= regime_factor:
        notes = "r is not large against log log gamma; ceiling is informational only"
    return BoundReport(FormulaId.THM3_BETA, value, params, notes=notes, constants=used)


# --------------------------------------------------------------------------
# thm4 (isolation hypothesis)
# --------------------------------------------------------------------------

def thm4_beta_ceiling(r: float, gamma: float,
                      k: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """1 - r^{1/(2 log log gamma)} / (C log log gamma)."""
    params = {"r": r, "gamma": gamma}
    used = {"c_thm4": k.c_thm4}
    if not r > 0 or gamma < 15.0:
        return _invalid(FormulaId.THM4_BETA, "need r > 0 and log log gamma >= 1", params, used)
    L = _loglog(gamma)
    value = 1.0 - r ** (1.0 / (2.0 * L)) / (k.c_thm4 * L)
    params["loglog_gamma"] = L
    notes = []
    if r < 1:
        notes.append("r < 1 is not a multiplicity; value shown for the algebraic inverse")
    valid = 0.0 < value < 1.0
    if not valid:
        notes.append("ceiling leaves (0, 1): forces the beta < 1 - delta regime, "
                     "r exceeds (C log log gamma)^(log log gamma)")
    elif value <= 0.5:
        notes.append("ceiling at or left of the critical line")
    rep = BoundReport(FormulaId.THM4_BETA, value, params, valid=valid,
                      notes="; ".join(notes), constants=used)
    return rep


def thm4_mult_ceiling(beta: float, gamma: float,
                      k: BoundConstants = DEFAULT_CONSTANTS) -> BoundReport:
    """(C (1 - beta) log log gamma)^{2 log log gamma}."""
    params = {"beta": beta, "gamma": gamma}
    used = {"c_thm4": k.c_thm4}
    bad = _check_strip(beta, gamma, gamma_min=15.0)
    if bad:
        return _invalid(FormulaId.THM4_M, bad, params, used)
    L = _loglog(gamma)
    value = (k.c_thm4 * (1.0 - beta) * L) ** (2.0 * L)
    params["loglog_gamma"] = L
    return BoundReport(FormulaId.THM4_M, value, params, constants=used)


@dataclass(frozen=True)
class LevinsonParams:
    M: int
    sigma: float
    factor: float            # (100M / (1 + 100M))^M
    bracket: float | None    # 3 - 4 r factor
    chain_holds: bool | None


def levinson_params(gamma: float, beta: float, r: float | None = None) -> LevinsonParams:
    """M = [log log gamma] + 1 and sigma = 1 + 100 M (1 - beta).

    With ``r`` given, also evaluates 3 - 4 r (100M/(1+100M))^M and checks
    3 - 4 r e^{-1/100} < 3 - 7r/2 <= -r/2 together with the factor
    exceeding e^{-1/100}.
    """
    if gamma < 15.0:
        raise ValueError("gamma must satisfy log log gamma >= 1")
    if not 0.5 < beta < 1.0:
        raise ValueError("beta must lie in (1/2, 1)")
    M = int(math.floor(_loglog(gamma))) + 1
    sigma = 1.0 + 100.0 * M * (1.0 - beta)
    factor = (100.0 * M / (1.0 + 100.0 * M)) ** M
    bracket = chain = None
    if r is not None:
        bracket = 3.0 - 4.0 * r * factor
        a = 3.0 - 4.0 * r * math.exp(-0.01)
        b = 3.0 - 3.5 * r
        chain = bool(factor > math.exp(-0.01) and bracket < a < b <= -0.5 * r)
    return LevinsonParams(M, sigma, factor, bracket, chain)


def trig_polynomial(theta) -> tuple[np.ndarray, np.ndarray]:
    """(3 + 4 cos t + cos 2t, 2 (1 + cos t)^2) elementwise."""
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta)
    return 3.0 + 4.0 * c + np.cos(2.0 * theta), 2.0 * (1.0 + c) ** 2


# --------------------------------------------------------------------------
# F_m
# --------------------------------------------------------------------------

@lru_cache(maxsize=4)
def von_mangoldt_array(n_max: int) -> np.ndarray:
    """Lambda(n) for 0 <= n <= n_max."""
    lam = np.zeros(n_max + 1)
    is_p = np.ones(n_max + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(math.isqrt(n_max)) + 1):
        if is_p[p]:
            is_p[p * p::p] = False
    for p in np.nonzero(is_p)[0]:
        lp = math.log(p)
        q = int(p)
        while q <= n_max:
            lam[q] = lp
            q *= p
    return lam


@dataclass(frozen=True)
class FmSeries:
    value: complex
    tail: float
    n_max: int


def fm_tail_envelope(sigma: float, m: int, n_max: int) -> float:
    """Integral of log^m u * u^{-sigma} over [n_max, inf)."""
    a = sigma - 1.0
    x = a * math.log(n_max)
    return float(special.gammaincc(m + 1, x) * special.gamma(m + 1) / a ** (m + 1))


def fm_series(sigma: float, t: float, m: int, n_max: int = 10 ** 6,
              tail_budget: float | None = None) -> FmSeries:
    """Truncated Dirichlet series sum Lambda(n) log^{m-1}(n) n^{-s} with a tail envelope."""
    if sigma <= 1.0 + 1e-3:
        raise ValueError("sigma must exceed 1 + 1e-3")
    if m < 1:
        raise ValueError("m must be >= 1")
    if n_max < 100:
        raise ValueError("n_max must be >= 100")
    if math.log(n_max) < m / sigma:
        raise ValueError("n_max too small for a monotone tail envelope")
    tail = fm_tail_envelope(sigma, m, n_max)
    if tail_budget is not None and tail > tail_budget:
        raise ValueError(f"sigma = {sigma} too close to 1: tail envelope {tail:.3g} "
                         f"exceeds budget {tail_budget:.3g}")
    lam = von_mangoldt_array(n_max)
    n = np.nonzero(lam)[0]
    ln = np.log(n)
    w = lam[n] * ln ** (m - 1)
    terms = w * np.exp(-sigma * ln) * np.exp(-1j * t * ln)
    return FmSeries(complex(terms.sum()), tail, n_max)


def fm_cauchy(s, m: int, radius: float = 0.05, tol: float = 1e-10,
              max_nodes: int = 2 ** 14) -> complex:
    """(-1)^m d^{m-1}/ds^{m-1} (zeta'/zeta)(s) via Cauchy's formula on a circle.

    The circle must avoid the pole at 1 and every zero of zeta.
    """
    s = as_complex(s)
    if m < 1:
        raise ValueError("m must be >= 1")
    if abs(s - 1.0) <= radius:
        raise PoleError("circle reaches the pole at s = 1")
    j = m - 1
    scale = math.factorial(j) / radius ** j
    n, prev = 32, None
    while True:
        w, e = circle_nodes(s, radius, n)
        est = (-1) ** m * scale * complex(np.mean(zeta_logderiv_array(w) * e ** (-j)))
        if prev is not None and abs(est - prev) <= tol * max(1.0, abs(est)):
            return est
        if n >= max_nodes:
            raise QuadratureError("fm_cauchy did not converge")
        prev, n = est, 2 * n


def fm_zero_sum(s, m: int, zeros: Sequence[ZeroRecord],
                k: BoundConstants = DEFAULT_CONSTANTS) -> tuple[complex, float]:
    """-sum over zeros with |gamma - t| <= 1 of (s - rho)^{-m}, and the O(log|t|) envelope."""
    s = as_complex(s)
    if m < 2:
        raise ValueError("m must be >= 2")
    t = s.imag
    _require_coverage(zeros, t - 1.0, t + 1.0)
    total = 0j
    for z in zeros:
        if abs(z.gamma - t) <= 1.0:
            d = s - z.rho
            if abs(d) < 1e-12:
                raise PoleError(f"s coincides with the zero {z.rho}")
            total -= (z.multiplicity or 1) * d ** (-m)
    return total, k.o_envelope * math.log(abs(t)) if abs(t) > 1 else k.o_envelope
