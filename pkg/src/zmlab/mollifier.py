"""Moebius mollifier tables, M_X(s), and the smoothed mollified sum identity.

With a(n) = sum_{d | n, d <= X} mu(d) the Dirichlet series of a is
zeta(s) M_X(s), and Mellin inversion of the f_R kernel gives

    sum_n a(n) n^{-rho} f_R(n / Y)
        = (1 / 2 pi i) int_(2) zeta(rho + s) M_X(rho + s) Y^s Gamma(s + 1) s^{-R-1} ds.

``mellin_identity_check`` evaluates both sides independently: the left by
direct summation with the closed-form kernel, the right on the vertical line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError, ZmlabError
from .kernel import fr_closed_form_values
from .numerics import panel_nodes
from .zeta import as_complex, log_gamma_array, zeta_array

N_MAX_LIMIT = 10 ** 7
IDENTITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class MollifierTable:
    """Arrays indexed by n (entry 0 unused): mu(n), d(n) and a(n) up to n_max."""

    X: float
    n_max: int
    mu: np.ndarray
    a: np.ndarray
    d: np.ndarray

    @property
    def x_floor(self) -> int:
        return int(math.floor(self.X))

    def rows(self, lo: int = 1, hi: int | None = None):
        hi = self.n_max if hi is None else min(hi, self.n_max)
        for n in range(lo, hi + 1):
            yield n, int(self.mu[n]), int(self.d[n]), int(self.a[n])


def smallest_prime_factor(n_max: int) -> np.ndarray:
    """spf[n] for 0 <= n <= n_max (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n_max + 1, dtype=np.int32)
    for p in range(2, math.isqrt(n_max) + 1):
        if spf[p] == 0:
            block = spf[p * p::p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def mobius_and_divisors(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """mu(n) and d(n) from the smallest-prime-factor table, vectorised over n."""
    spf = smallest_prime_factor(n_max)
    mu = np.ones(n_max + 1, dtype=np.int8)
    d = np.ones(n_max + 1, dtype=np.int32)
    rem = np.arange(n_max + 1, dtype=np.int64)
    mu[0], d[0] = 0, 0
    active = np.flatnonzero(rem > 1)
    while active.size:
        p = spf[rem[active]].astype(np.int64)
        e = np.zeros(active.size, dtype=np.int32)
        div = np.ones(active.size, dtype=bool)
        while div.any():
            idx = active[div]
            rem[idx] //= p[div]
            e[div] += 1
            div = rem[active] % p == 0
        d[active] *= e + 1
        mu[active] = np.where(e >= 2, 0, -mu[active])
        active = active[rem[active] > 1]
    return mu, d


def mollifier_build(X: float, n_max: int) -> MollifierTable:
    """Sieve mu and d up to n_max, then a(n) by accumulating mu(d) over multiples of d <= X."""
    if X < 1:
        raise ValueError("X must be >= 1")
    if not X <= n_max:
        raise ValueError("need X <= n_max")
    if n_max > N_MAX_LIMIT:
        raise ZmlabError(f"n_max = {n_max} exceeds the memory budget of {N_MAX_LIMIT}")
    n_max = int(n_max)
    mu, d = mobius_and_divisors(n_max)
    a = np.zeros(n_max + 1, dtype=np.int32)
    for k in range(1, int(math.floor(X)) + 1):
        if mu[k]:
            a[k::k] += mu[k]
    return MollifierTable(float(X), n_max, mu, a, d)


def m_x(s, table: MollifierTable) -> complex:
    """M_X(s) = sum_{n <= X} mu(n) n^{-s}."""
    s = as_complex(s)
    xf = table.x_floor
    if xf > table.n_max:
        raise ValueError("table does not cover X")
    n = np.arange(1, xf + 1, dtype=float)
    mu = table.mu[1:xf + 1].astype(float)
    return complex((mu * np.exp(-s * np.log(n))).sum())


def m_x_array(s: np.ndarray, table: MollifierTable) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    xf = table.x_floor
    idx = np.flatnonzero(table.mu[1:xf + 1]) + 1
    mu = table.mu[idx].astype(float)
    return np.exp(-np.outer(s, np.log(idx.astype(float)))) @ mu


def dirichlet_sum(s, table: MollifierTable, n_max: int | None = None) -> complex:
    """sum_{n <= n_max} a(n) n^{-s}."""
    s = as_complex(s)
    n_max = table.n_max if n_max is None else n_max
    idx = np.flatnonzero(table.a[1:n_max + 1]) + 1
    return complex((table.a[idx] * np.exp(-s * np.log(idx.astype(float)))).sum())


def dirichlet_tail_envelope(sigma: float, n_max: int) -> float:
    """Bound for |sum_{n > n_max} a(n) n^{-s}| via |a(n)| <= d(n) <= 2 sqrt(n), sigma > 3/2."""
    if sigma <= 1.5:
        raise ValueError("tail envelope needs sigma > 3/2")
    return 2.0 * n_max ** (1.5 - sigma) / (sigma - 1.5)


# --------------------------------------------------------------------------
# identity
# --------------------------------------------------------------------------

def default_n_max(Y: float) -> int:
    return int(math.ceil(max(2.0 * Y * math.log(Y), 30.0 * Y)))


def smoothed_tail_envelope(beta: float, Y: float, R: int, N: int) -> float:
    """Bound for sum_{n > N} |a(n)| n^{-beta} f_R(n/Y).

    Uses |a(n)| <= d(n) <= n and f_R(x) <= x^{-R} e^{-x}. For N >= 2Y(1 - beta)
    the factor n^{1-beta} e^{-n/2Y} is decreasing, leaving a geometric series
    in e^{-n/2Y}.
    """
    if N < 2.0 * Y * max(1.0 - beta, 0.0):
        raise ValueError("N too small for the geometric tail bound")
    q = math.exp(-1.0 / (2.0 * Y))
    lead = N ** (1.0 - beta) * (Y / N) ** R * math.exp(-N / (2.0 * Y))
    return lead * q ** (N + 1) / (1.0 - q)


def identity_lhs(rho: complex, table: MollifierTable, Y: float, R: int, N: int) -> complex:
    idx = np.flatnonzero(table.a[1:N + 1]) + 1
    f = fr_closed_form_values(R, idx / Y)
    return complex((table.a[idx] * np.exp(-rho * np.log(idx.astype(float))) * f).sum())


def _identity_integrand(rho: complex, table: MollifierTable, Y: float, R: int,
                        t: np.ndarray) -> np.ndarray:
    s = 2.0 + 1j * t
    w = rho + s
    z, _ = zeta_array(w)
    # Gamma(s + 1) s^{-R-1} = Gamma(s) s^{-R}
    return z * m_x_array(w, table) * np.exp(s * math.log(Y) + log_gamma_array(s)) * s ** (-R)


def identity_rhs(rho: complex, table: MollifierTable, Y: float, R: int,
                 t_cut: float, width: float = 0.5, order: int = 24) -> complex:
    t, w = panel_nodes(-t_cut, t_cut, width, order)
    vals = _identity_integrand(rho, table, Y, R, t)
    # ds = i dt cancels the i of 1/(2 pi i)
    return complex((w * vals).sum() / (2.0 * math.pi))


def rhs_tail_envelope(rho: complex, table: MollifierTable, Y: float, R: int, t_cut: float) -> float:
    """Bound for the line integral beyond |Im s| = t_cut.

    |zeta(w) M_X(w)| <= zeta(Re w) sum |mu(n)| n^{-Re w}, |Gamma(2 + it)| is
    bounded by the Stirling majorant, and the remaining integral of
    e^{-pi t / 2} t^{1.5 - R} is dominated by a geometric factor.
    """
    sig = rho.real + 2.0
    zbound = float(zeta_array(complex(sig, 0.0))[0][0].real)
    xf = table.x_floor
    n = np.arange(1, xf + 1, dtype=float)
    mbound = float((np.abs(table.mu[1:xf + 1]) * n ** (-sig)).sum())
    a = abs(complex(2.0, t_cut))
    gamma_bound = math.sqrt(2 * math.pi) * a ** 1.5 * math.exp(-t_cut * math.atan2(t_cut, 2.0) - 2 + 1 / (6 * a))
    rate = math.pi / 2 - max(0.0, 1.5 - R) / t_cut
    one_side = zbound * mbound * Y ** 2 * gamma_bound * a ** (-R) / rate
    return 2.0 * one_side / (2.0 * math.pi)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: complex
    rhs: complex
    gap: float
    lhs_envelope: float
    rhs_envelope: float
    quad_delta: float
    n_max: int

    def to_dict(self) -> dict:
        return {"lhs": [self.lhs.real, self.lhs.imag], "rhs": [self.rhs.real, self.rhs.imag],
                "gap": self.gap, "lhs_envelope": self.lhs_envelope,
                "rhs_envelope": self.rhs_envelope, "quad_delta": self.quad_delta,
                "n_max": self.n_max}


def mellin_identity_check(rho, X: float, Y: float, R: int, n_max: int | None = None,
                          t_cut: float = 60.0, tol: float = IDENTITY_TOL,
                          table: MollifierTable | None = None) -> IdentityCheck:
    """Compare both sides of the smoothed mollifier identity at rho.

    R is the kernel index on the left; the line integral carries s^{-R-1}.
    Raises QuadratureError when either truncation envelope exceeds ``tol``.
    """
    rho_c = as_complex(rho)
    if not rho_c.real > 0.5:
        raise ValueError("Re(rho) must exceed 1/2")
    if not 1.0 <= X <= Y:
        raise ValueError("need 1 <= X <= Y")
    if R < 0 or int(R) != R:
        raise ValueError("R must be a non-negative integer")
    n_need = 2.0 * Y * math.log(Y) if Y > 1 else 1.0
    n_max = default_n_max(Y) if n_max is None else int(n_max)
    if n_max < n_need:
        raise ValueError("n_max must be >= 2 Y log Y")
    if table is None or table.n_max < n_max or table.X != X:
        table = mollifier_build(X, n_max)
    lhs_env = smoothed_tail_envelope(rho_c.real, Y, R, n_max)
    rhs_env = rhs_tail_envelope(rho_c, table, Y, R, t_cut)
    if lhs_env > tol or rhs_env > tol:
        raise QuadratureError(
            f"truncation envelope too large (sum {lhs_env:.3g}, line {rhs_env:.3g}); "
            "raise n_max or t_cut")
    lhs = identity_lhs(rho_c, table, Y, R, n_max)
    rhs = identity_rhs(rho_c, table, Y, R, t_cut)
    coarse = identity_rhs(rho_c, table, Y, R, t_cut, width=1.0)
    return IdentityCheck(lhs, rhs, abs(lhs - rhs), lhs_env, rhs_env, abs(rhs - coarse), n_max)


def b_coeffs(table: MollifierTable, Y: float, R: int, n_max: int | None = None) -> np.ndarray:
    """b(n) = a(n) f_R(n/Y) / f_R(1/Y) for X < n <= n_max (entry i is n = floor(X) + 1 + i)."""
    n_max = table.n_max if n_max is None else n_max
    if n_max < table.X:
        raise ValueError("n_max must be >= X")
    if n_max > table.n_max:
        raise ValueError("table does not reach n_max")
    n = np.arange(table.x_floor + 1, n_max + 1)
    a = table.a[n].astype(float)
    b = np.zeros(n.size)
    nz = a != 0
    ref = fr_closed_form_values(R, [1.0 / Y])[0]
    b[nz] = a[nz] * fr_closed_form_values(R, n[nz] / Y) / ref
    if np.any(np.abs(b) > np.abs(a)):
        raise ZmlabError("kernel monotonicity violated: |b(n)| > |a(n)|")
    return b
