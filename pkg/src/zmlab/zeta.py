"""Double-precision evaluation of zeta, chi, log-gamma and Hardy's Z.

Everything here is computed from scratch in binary64:

* ``zeta`` uses Euler-Maclaurin summation for ``sigma >= 1/2`` and the
  functional equation ``zeta(s) = chi(s) zeta(1 - s)`` to the left of the
  critical line. The truncation error is bounded by the first omitted
  Bernoulli term times ``|s + 2K + 1| / (sigma + 2K + 1)``.
* ``log_gamma`` is the Stirling series after shifting ``Re z`` above 10 with
  the recurrence ``Gamma(z + 1) = z Gamma(z)``.
* ``zeta_deriv`` takes derivatives through Cauchy's formula on a circle,
  integrated with the trapezoid rule.

The vectorised ``*_array`` variants are what the scanners and quadratures
call; the scalar functions wrap them and return :class:`EvalResult`.
Values for ``t < 0`` are obtained by conjugating the value at ``conj(s)``,
so conjugate symmetry holds bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import PoleError, PrecisionError, QuadratureError
from .numerics import circle_nodes

EPS = np.finfo(float).eps
LOG_2 = math.log(2.0)
LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)

T_MAX_SUPPORTED = 1.0e4
EM_BERNOULLI_TERMS = 12
MIN_TARGET_ERROR = 1e-12
_MAX_N_DOUBLINGS = 6
_BLOCK_ELEMENTS = 2_000_000

# B_2, B_4, ..., B_26
_BERNOULLI_2K = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
    Fraction(-236364091, 2730), Fraction(8553103, 6),
]
# B_2k / (2k)!  for the Euler-Maclaurin tail
_EM_COEF = [float(b / math.factorial(2 * k))
            for k, b in enumerate(_BERNOULLI_2K, start=1)]
# B_2k / (2k (2k - 1))  for the Stirling series
_STIRLING_COEF = [float(b / (2 * k * (2 * k - 1)))
                  for k, b in enumerate(_BERNOULLI_2K, start=1)]
_STIRLING_TERMS = 10
_STIRLING_SHIFT = 10.0

ComplexLike = Union["SPoint", complex, float]


@dataclass(frozen=True)
class SPoint:
    """A point ``s = sigma + i t``."""

    sigma: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise ValueError(f"SPoint fields must be finite, got ({self.sigma}, {self.t})")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    @classmethod
    def from_complex(cls, z: complex) -> "SPoint":
        z = complex(z)
        return cls(z.real, z.imag)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_error: float

    def __post_init__(self):
        if not (self.abs_error >= 0.0 and math.isfinite(self.abs_error)):
            raise ValueError(f"abs_error must be finite and >= 0, got {self.abs_error}")


def as_complex(s: ComplexLike) -> complex:
    if isinstance(s, SPoint):
        return s.s
    z = complex(s)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite argument {z}")
    return z


# --------------------------------------------------------------------------
# log Gamma
# --------------------------------------------------------------------------

def log_gamma_array(z) -> np.ndarray:
    """Principal branch of log Gamma, elementwise. No pole checking."""
    z = np.asarray(z, dtype=complex)
    shift = np.where(z.real < _STIRLING_SHIFT,
                     np.ceil(_STIRLING_SHIFT - z.real), 0.0).astype(np.int64)
    acc = np.zeros_like(z)
    w = z.copy()
    for k in range(int(shift.max(initial=0))):
        m = shift > k
        acc[m] += np.log(w[m])
        w[m] += 1.0
    # Stirling series at w with Re w >= 10
    res = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI
    inv = 1.0 / w
    inv2 = inv * inv
    p = inv
    for c in _STIRLING_COEF[:_STIRLING_TERMS]:
        res += c * p
        p = p * inv2
    return res - acc


def log_gamma(z: complex) -> complex:
    """Principal-branch ``log Gamma(z)``; relative error about 1e-13 or better."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise PoleError(f"log_gamma has a pole at {z.real:g}")
    return complex(log_gamma_array(np.array([z]))[0])


# --------------------------------------------------------------------------
# chi
# --------------------------------------------------------------------------

def _log_sin(z: np.ndarray) -> np.ndarray:
    """log sin(z) computed without overflow for large |Im z| (branch irrelevant)."""
    out = np.empty_like(z)
    up = z.imag >= 0
    zu = z[up]
    out[up] = -1j * zu - np.log(2j) + np.log(np.exp(2j * zu) - 1.0)
    zd = z[~up]
    out[~up] = 1j * zd - np.log(2j) + np.log(1.0 - np.exp(-2j * zd))
    return out


def chi_array(s) -> tuple[np.ndarray, np.ndarray]:
    """chi(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s); returns (values, abs_errors)."""
    s = np.asarray(s, dtype=complex)
    lg = log_gamma_array(1.0 - s)
    log_rest = s * LOG_2 + (s - 1.0) * LOG_PI + lg
    z = 0.5 * np.pi * s
    small = np.abs(z.imag) < 30.0
    val = np.empty_like(s)
    val[small] = np.exp(log_rest[small]) * np.sin(z[small])
    big = ~small
    if big.any():
        val[big] = np.exp(log_rest[big] + _log_sin(z[big]))
    # relative error of exp(...) tracks the absolute error of its exponent
    scale = np.abs(s) * (LOG_2 + LOG_PI) + np.abs(lg) + np.abs(z) + 1.0
    return val, 8.0 * EPS * scale * np.abs(val)


def _check_chi_pole(s: complex) -> None:
    if s.imag == 0.0 and s.real >= 1.0 and s.real == math.floor(s.real):
        raise PoleError(f"chi closed form has a pole at s = {s.real:g}")


def chi(s: ComplexLike) -> EvalResult:
    """chi(s) from the Gamma/sine closed form in log space."""
    s = as_complex(s)
    _check_chi_pole(s)
    v, e = chi_array(np.array([s]))
    return EvalResult(complex(v[0]), float(e[0]))


# --------------------------------------------------------------------------
# Euler-Maclaurin core
# --------------------------------------------------------------------------

def em_terms_for(t_abs: float) -> int:
    return max(20, int(math.ceil(1.3 * t_abs)))


def _em_block(s: np.ndarray, N: int, with_deriv: bool):
    n = np.arange(1, N, dtype=float)
    logn = np.log(n)
    E = np.exp(-np.multiply.outer(s, logn))
    head = E.sum(axis=-1)
    terms_abs = np.exp(-np.multiply.outer(s.real, logn))
    mag = terms_abs.sum(axis=-1)
    # the phase t log n of each term is off by ~|s| log n eps; these errors
    # add like a random walk, so carry their root-sum-square
    phase = np.abs(s) * np.sqrt(((terms_abs * logn) ** 2).sum(axis=-1))
    lN = math.log(N)
    NmS = np.exp(-s * lN)
    sm1 = s - 1.0
    val = head + N * NmS / sm1 + 0.5 * NmS
    if with_deriv:
        dval = -(E * logn).sum(axis=-1)
        dval += N * NmS * (-lN / sm1 - 1.0 / (sm1 * sm1)) - 0.5 * lN * NmS
        dP = np.ones_like(s)
    P = s.copy()
    Np = NmS / N
    K = EM_BERNOULLI_TERMS
    for k in range(1, K + 1):
        c = _EM_COEF[k - 1]
        val += c * P * Np
        if with_deriv:
            dval += c * (dP - lN * P) * Np
            dP = dP * (s + 2 * k - 1) * (s + 2 * k) + P * (2.0 * s + 4 * k - 1)
        P = P * (s + 2 * k - 1) * (s + 2 * k)
        Np = Np / (N * N)
    first_omitted = np.abs(_EM_COEF[K] * P * Np)
    trunc = first_omitted * np.abs(s + 2 * K + 1) / (s.real + 2 * K + 1)
    rnd = 4.0 * EPS * (mag + phase + np.abs(N * NmS / sm1) + 1.0)
    if with_deriv:
        # derivative remainder: same geometric decay, one extra log N factor
        dtrunc = trunc * (lN + 1.0) * 2.0
        drnd = 4.0 * EPS * (mag * lN + 1.0)
        return val, trunc, rnd, dval, dtrunc + drnd
    return val, trunc, rnd


def _em_evaluate(s: np.ndarray, target: float, with_deriv: bool = False):
    """Euler-Maclaurin on an array (all Im s >= 0 expected)."""
    s = np.asarray(s, dtype=complex)
    out = np.empty_like(s)
    err = np.empty(s.shape, dtype=float)
    dout = np.empty_like(s) if with_deriv else None
    derr = np.empty(s.shape, dtype=float) if with_deriv else None
    if s.size == 0:
        return (out, err, dout, derr) if with_deriv else (out, err)
    # bucket points by their default term count to keep block shapes regular
    n_default = np.maximum(20, np.ceil(1.3 * np.abs(s.imag))).astype(np.int64)
    n_default = ((n_default + 15) // 16) * 16
    for N0 in np.unique(n_default):
        idx = np.nonzero(n_default == N0)[0]
        N = int(N0)
        for doubling in range(_MAX_N_DOUBLINGS + 1):
            step = max(1, _BLOCK_ELEMENTS // N)
            vals, trs, rns, dvs, des = [], [], [], [], []
            for j in range(0, idx.size, step):
                blk = s[idx[j:j + step]]
                res = _em_block(blk, N, with_deriv)
                vals.append(res[0]); trs.append(res[1]); rns.append(res[2])
                if with_deriv:
                    dvs.append(res[3]); des.append(res[4])
            trunc = np.concatenate(trs)
            if trunc.max() <= target:
                break
            if doubling == _MAX_N_DOUBLINGS:
                raise PrecisionError(
                    f"Euler-Maclaurin truncation {trunc.max():.3g} exceeds target "
                    f"{target:.3g} with N = {N}")
            N *= 2
        out[idx] = np.concatenate(vals)
        err[idx] = trunc + np.concatenate(rns)
        if with_deriv:
            dout[idx] = np.concatenate(dvs)
            derr[idx] = np.concatenate(des)
    if with_deriv:
        return out, err, dout, derr
    return out, err


def _validate_window(s: np.ndarray) -> None:
    if s.size and np.abs(s.imag).max() > T_MAX_SUPPORTED:
        raise ValueError(f"|t| must not exceed {T_MAX_SUPPORTED:g}")
    if s.size and np.abs(s - 1.0).min() < 1e-12:
        raise PoleError("zeta has a pole at s = 1")


def zeta_array(s, target_abs_error: float = MIN_TARGET_ERROR) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised zeta; returns (values, abs_error estimates)."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    _validate_window(s)
    if target_abs_error < MIN_TARGET_ERROR:
        raise ValueError(f"target_abs_error must be >= {MIN_TARGET_ERROR:g}")
    neg = s.imag < 0
    w = np.where(neg, np.conj(s), s)
    out = np.empty_like(w)
    err = np.empty(w.shape, dtype=float)
    # near s = 0 the reflected form is 0 * pole; the Euler-Maclaurin
    # continuation is valid there (sigma > -2K - 1)
    direct = (w.real >= 0.5) | (np.abs(w) < 0.25)
    if direct.any():
        out[direct], err[direct] = _em_evaluate(w[direct], target_abs_error)
    fe = ~direct
    if fe.any():
        wf = w[fe]
        reflected = np.conj(1.0 - wf)   # conj keeps Im >= 0 for the core
        z1, e1 = _em_evaluate(reflected, target_abs_error)
        z1, e1 = np.conj(z1), e1
        c, ce = chi_array(wf)
        out[fe] = c * z1
        err[fe] = np.abs(c) * e1 + ce * np.abs(z1)
    out = np.where(neg, np.conj(out), out)
    return out, err


def zeta(s: ComplexLike, target_abs_error: float = MIN_TARGET_ERROR) -> EvalResult:
    """zeta(s) with an a priori error estimate.

    Raises :class:`PoleError` within 1e-12 of ``s = 1`` and
    :class:`PrecisionError` when the truncation budget cannot be met.
    """
    z = as_complex(s)
    v, e = zeta_array(np.array([z]), target_abs_error)
    return EvalResult(complex(v[0]), float(e[0]))


def zeta_em_direct(s: ComplexLike, target_abs_error: float = MIN_TARGET_ERROR) -> EvalResult:
    """Euler-Maclaurin without the functional-equation branch (any sigma > -20).

    Exposed so the functional equation can be checked against an
    independent evaluation on the left of the critical line.
    """
    z = as_complex(s)
    _validate_window(np.array([z]))
    flip = z.imag < 0
    w = z.conjugate() if flip else z
    v, e = _em_evaluate(np.array([w]), target_abs_error)
    val = complex(v[0])
    return EvalResult(val.conjugate() if flip else val, float(e[0]))


def zeta_and_deriv_array(s, target_abs_error: float = MIN_TARGET_ERROR):
    """(zeta, zeta', err, derr) from the termwise-differentiated Euler-Maclaurin sum."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    _validate_window(s)
    neg = s.imag < 0
    w = np.where(neg, np.conj(s), s)
    v, e, dv, de = _em_evaluate(w, target_abs_error, with_deriv=True)
    v = np.where(neg, np.conj(v), v)
    dv = np.where(neg, np.conj(dv), dv)
    return v, dv, e, de


def zeta_logderiv_array(s) -> np.ndarray:
    """zeta'/zeta, elementwise."""
    v, dv, _, _ = zeta_and_deriv_array(s)
    return dv / v


def zeta_deriv(s: ComplexLike, k: int, radius: float | None = None,
               target_abs_error: float = 1e-10, max_nodes: int = 2 ** 14) -> EvalResult:
    """k-th derivative of zeta by the Cauchy integral on a circle around ``s``.

    The trapezoid rule is spectrally accurate for this periodic analytic
    integrand; the node count doubles until two successive estimates agree.
    """
    s = as_complex(s)
    if not (0 <= k <= 12):
        raise ValueError("derivative order must satisfy 0 <= k <= 12")
    dist = abs(s - 1.0)
    if radius is None:
        radius = min(0.25, 0.5 * dist)
    if radius <= 0.0 or dist <= radius:
        raise PoleError(f"circle of radius {radius:g} around {s} reaches the pole at 1")
    scale = math.factorial(k) / radius ** k
    n = 16
    prev = None
    while True:
        w, e = circle_nodes(s, radius, n)
        zv, ze = zeta_array(w)
        est = complex(scale * np.mean(zv * e ** (-k)))
        floor = scale * float(ze.max()) + 100.0 * EPS * scale * float(np.abs(zv).max())
        if prev is not None:
            diff = abs(est - prev)
            if diff <= max(target_abs_error, floor):
                return EvalResult(est, diff + floor)
        if n >= max_nodes:
            raise QuadratureError(
                f"Cauchy derivative did not converge with {n} nodes "
                f"(last change {abs(est - prev):.3g})")
        prev = est
        n *= 2


# --------------------------------------------------------------------------
# Hardy Z
# --------------------------------------------------------------------------

def theta_array(t) -> np.ndarray:
    """Riemann-Siegel theta from log Gamma."""
    t = np.asarray(t, dtype=float)
    return log_gamma_array(0.25 + 0.5j * t).imag - 0.5 * t * LOG_PI


def theta(t: float) -> float:
    return float(theta_array(np.array([t]))[0])


def hardy_z_array(t, check: bool = True) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    zv, _ = zeta_array(0.5 + 1j * t)
    rot = np.exp(1j * theta_array(t)) * zv
    if check:
        resid = np.abs(rot.imag)
        if resid.size and resid.max() > 1e-6:
            raise PrecisionError(
                f"Hardy Z imaginary residue {resid.max():.3g} exceeds 1e-6")
    return rot.real


def hardy_z(t: float) -> float:
    """Z(t) = e^{i theta(t)} zeta(1/2 + it), real for real t >= 2."""
    if t < 2.0:
        raise ValueError("hardy_z requires t >= 2")
    return float(hardy_z_array(np.array([float(t)]))[0])
