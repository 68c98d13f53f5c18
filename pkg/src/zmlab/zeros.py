"""Critical-line zeros: sign-change scan of Hardy Z, N(T), S(T), zero cache.

The scan brackets sign changes of Z(t) on a uniform grid and refines each
bracket by bisection. The count is then checked against the
Riemann-von Mangoldt main term plus a tracked S(T); sub-intervals whose
count disagrees are rescanned with a halved step.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ArgumentTrackingError, CoverageError, ZeroCountMismatch
from .zeta import hardy_z_array, zeta_array

CACHE_HEADER = ["index", "gamma", "beta", "multiplicity", "cert_radius",
                "cert_residual", "loc_error"]
BISECTION_TOL = 1e-9
MAX_STEP_HALVINGS = 4
CHECK_CHUNK = 10.0
O_ENVELOPE_DEFAULT = 1.0
FIRST_ORDINATE_FLOOR = 14.0
ORDINATE_GUARD = 1e-4


@dataclass
class ZeroRecord:
    index: int
    gamma: float
    beta: float = 0.5
    multiplicity: int | None = None
    cert_radius: float | None = None
    cert_residual: float | None = None
    loc_error: float = BISECTION_TOL

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("index must be >= 1")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.multiplicity is not None and self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")

    @property
    def rho(self) -> complex:
        return complex(self.beta, self.gamma)


@dataclass(frozen=True)
class CountWindow:
    T: float
    n_counted: int | None
    n_formula: float
    s_of_t: float
    smooth: float
    o_envelope: float


# --------------------------------------------------------------------------
# smooth part, S(T), N(T)
# --------------------------------------------------------------------------

def smooth_part(T: float) -> float:
    """(T/2pi) log(T/2pi) - T/2pi + 7/8."""
    x = T / (2.0 * math.pi)
    return x * math.log(x) - x + 0.875


def _track_leg(a: complex, b: complex, step: float, zero_tol: float) -> float:
    """Accumulated arg change of zeta along the segment a -> b."""
    length = abs(b - a)
    n = max(1, int(math.ceil(length / step)))
    u = np.linspace(0.0, 1.0, n + 1)
    vals = zeta_array(a + (b - a) * u)[0]
    while True:
        if np.abs(vals).min() < zero_tol:
            raise ArgumentTrackingError(
                f"path {a} -> {b} passes within ~{zero_tol:g} of a zero")
        dang = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(dang) >= 0.5 * math.pi
        if not bad.any():
            return float(dang.sum())
        if np.diff(u)[bad].min() * length < 1e-12:
            raise ArgumentTrackingError(f"step underflow tracking arg on {a} -> {b}")
        # halve only the offending steps
        mids = 0.5 * (u[:-1][bad] + u[1:][bad])
        mvals = zeta_array(a + (b - a) * mids)[0]
        u = np.concatenate([u, mids])
        vals = np.concatenate([vals, mvals])
        order = np.argsort(u, kind="stable")
        u, vals = u[order], vals[order]


def s_of_t(T: float, step: float = 0.25, zero_tol: float = 1e-6) -> float:
    """S(T) = arg zeta(1/2 + iT) / pi by continuous variation 2 -> 2+iT -> 1/2+iT."""
    if T < 2.0:
        raise ValueError("s_of_t requires T >= 2")
    total = _track_leg(2.0 + 0j, complex(2.0, T), step, zero_tol)
    total += _track_leg(complex(2.0, T), complex(0.5, T), step, zero_tol)
    return total / math.pi


def count_formula(T: float, zeros: Sequence[ZeroRecord] | None = None,
                  o_const: float = O_ENVELOPE_DEFAULT) -> CountWindow:
    """Riemann-von Mangoldt count with S(T); the O(1/T) term is only an envelope.

    T within ORDINATE_GUARD of a known ordinate is rejected instead of
    adopting a one-sided convention for S at a jump.
    """
    if T < 2.0:
        raise ValueError("count_formula requires T >= 2")
    if zeros is not None and any(abs(z.gamma - T) < ORDINATE_GUARD for z in zeros):
        raise ValueError(f"T = {T:g} lies within {ORDINATE_GUARD:g} of a zero ordinate")
    sm = smooth_part(T)
    st = s_of_t(T)
    counted = None
    if zeros is not None:
        counted = sum(1 for z in zeros if 0.0 < z.gamma <= T)
    return CountWindow(T=T, n_counted=counted, n_formula=sm + st, s_of_t=st,
                       smooth=sm, o_envelope=o_const / T)


# --------------------------------------------------------------------------
# scanning
# --------------------------------------------------------------------------

def _bisect_brackets(lo: np.ndarray, hi: np.ndarray, zlo: np.ndarray,
                     tol: float = BISECTION_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised bisection of sign-change brackets to width <= tol."""
    lo, hi, zlo = lo.copy(), hi.copy(), zlo.copy()
    while (hi - lo).max(initial=0.0) > tol:
        mid = 0.5 * (lo + hi)
        zm = hardy_z_array(mid)
        left = np.sign(zm) == np.sign(zlo)
        lo = np.where(left, mid, lo)
        zlo = np.where(left, zm, zlo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi), hi - lo


def _scan_grid(t0: float, h: float, k0: int, k1: int) -> list[tuple[float, float]]:
    """Roots from sign changes between grid points t0 + k h, k0 <= k <= k1."""
    k = np.arange(k0, k1 + 1)
    t = t0 + k * h
    z = hardy_z_array(t)
    s = np.sign(z)
    exact = s == 0
    roots = [(float(v), 0.0) for v in t[exact]]
    change = (s[:-1] * s[1:]) < 0
    if change.any():
        g, w = _bisect_brackets(t[:-1][change], t[1:][change], z[:-1][change])
        roots.extend((float(a), float(b)) for a, b in zip(g, w))
    return roots


def _scan_interval(a: float, b: float, h: float, workers: int = 1) -> list[tuple[float, float]]:
    n = max(1, int(math.ceil((b - a) / h)))
    h = (b - a) / n
    if workers <= 1 or n < 64:
        roots = _scan_grid(a, h, 0, n)
    else:
        # disjoint k-ranges sharing their end node: every bracket [k, k+1]
        # belongs to exactly one chunk
        cuts = np.linspace(0, n, workers + 1).astype(int)
        jobs = [(a, h, int(cuts[i]), int(cuts[i + 1])) for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_grid_star, jobs))
        roots = [r for part in parts for r in part]
    roots = sorted(set(roots))
    return roots


def _scan_grid_star(args):
    return _scan_grid(*args)


def _formula_count(T: float) -> int:
    return int(round(count_formula(T).n_formula))


def _safe_boundary(b: float, gammas: np.ndarray, lo: float, hi: float) -> float:
    """Nudge a check point away from located ordinates."""
    if gammas.size == 0:
        return b
    for delta in (0.0, 0.15, -0.15, 0.3, -0.3, 0.45, -0.45):
        c = min(max(b + delta, lo), hi)
        if np.abs(gammas - c).min() >= 0.1:
            return c
    return b


def scan_zeros(t_min: float, t_max: float, coarse_step: float = 0.2,
               workers: int = 1) -> "ZeroCache":
    """Locate the zeros of zeta on the critical line with t_min < gamma <= t_max."""
    if t_min < 2.0:
        raise ValueError("t_min must be >= 2")
    if t_max > 1000.0:
        raise ValueError("t_max must not exceed 1000")
    if not 0.0 < coarse_step <= 0.5:
        raise ValueError("coarse_step must lie in (0, 0.5]")
    if t_max <= t_min:
        return ZeroCache([], t_min=t_min, t_max=t_max)
    roots = _scan_interval(t_min, t_max, coarse_step, workers)
    gammas = np.array([g for g, _ in roots])

    n_chunks = max(1, int(math.ceil((t_max - t_min) / CHECK_CHUNK)))
    edges = [t_min + (t_max - t_min) * j / n_chunks for j in range(n_chunks + 1)]
    edges = [edges[0]] + [_safe_boundary(e, gammas, t_min, t_max) for e in edges[1:-1]] + [edges[-1]]
    final: list[tuple[float, float]] = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        inside = [r for r in roots if lo < r[0] <= hi]
        expected = _count_between(lo, hi, gammas)
        h = coarse_step
        halvings = 0
        while len(inside) != expected:
            if halvings == MAX_STEP_HALVINGS:
                raise ZeroCountMismatch(
                    f"found {len(inside)} zeros in ({lo:.6f}, {hi:.6f}] but the "
                    f"counting formula gives {expected}", interval=(lo, hi))
            h *= 0.5
            halvings += 1
            inside = [r for r in _scan_interval(lo, hi, h) if lo < r[0] <= hi]
        final.extend(inside)
    final.sort()
    # index is the ordinate rank, so offset by the zeros below t_min
    first = 1 if t_min < FIRST_ORDINATE_FLOOR else _formula_count(_nudge(t_min, gammas)) + 1
    records = [ZeroRecord(index=i, gamma=g, loc_error=max(w, 1e-15))
               for i, (g, w) in enumerate(final, start=first)]
    return ZeroCache(records, t_min=t_min, t_max=t_max)


def _count_between(lo: float, hi: float, gammas: np.ndarray) -> int:
    return _formula_count(_nudge(hi, gammas)) - _formula_count(_nudge(lo, gammas))


def _nudge(T: float, gammas: np.ndarray) -> float:
    """Move T off an ordinate (S(T) = S(T + 0) convention for the count)."""
    if gammas.size and np.abs(gammas - T).min() < ORDINATE_GUARD:
        return T + 2 * ORDINATE_GUARD
    return T


# --------------------------------------------------------------------------
# window bound, zero-free scale, cache
# --------------------------------------------------------------------------

def window_mult_bound(gamma: float, H: float, zeros: Sequence[ZeroRecord]) -> int:
    """Number of cached ordinates in (gamma - H, gamma + H], multiplicity weighted.

    The trivial bound m <= N(gamma + H) - N(gamma - H) is stated for
    0 < H <= 1; larger H is accepted and simply counts the window.
    """
    if H <= 0:
        raise ValueError("H must be positive")
    _require_coverage(zeros, gamma - H, gamma + H)
    return sum((z.multiplicity or 1) for z in zeros if gamma - H < z.gamma <= gamma + H)


def _require_coverage(zeros: Sequence[ZeroRecord], lo: float, hi: float) -> None:
    t_max = getattr(zeros, "t_max", None)
    if t_max is None:
        t_max = max((z.gamma for z in zeros), default=-math.inf)
    if hi > t_max + 1e-12:
        raise CoverageError(f"zero cache does not cover up to t = {hi:g} (covers {t_max:g})")
    t_min = getattr(zeros, "t_min", None)
    # nothing below the first ordinate can be missing
    if t_min is not None and lo < t_min and t_min > FIRST_ORDINATE_FLOOR:
        raise CoverageError(f"zero cache starts at t = {t_min:g}, above {lo:g}")


class ZeroCache(list):
    """A list of ZeroRecord that also remembers the scanned range."""

    def __init__(self, records: Iterable[ZeroRecord] = (), t_min: float = 2.0,
                 t_max: float | None = None):
        super().__init__(records)
        self.t_min = t_min
        self.t_max = t_max


def zero_free_delta(gamma: float, C: float) -> float:
    """C (log gamma)^(-2/3) (log log gamma)^(-1/3)."""
    if gamma < 10.0:
        raise ValueError("gamma must be >= 10")
    if C <= 0:
        raise ValueError("C must be positive")
    lg = math.log(gamma)
    return C * lg ** (-2.0 / 3.0) * math.log(lg) ** (-1.0 / 3.0)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def write_cache(path: str | Path, zeros: Sequence[ZeroRecord]) -> None:
    """Write the CSV cache; the scanned range goes to a ``.meta.json`` sidecar."""
    path = Path(path)
    t_max = getattr(zeros, "t_max", None)
    if t_max is not None:
        meta = {"t_min": getattr(zeros, "t_min", 2.0), "t_max": t_max}
        _meta_path(path).write_text(json.dumps(meta), encoding="utf-8")
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CACHE_HEADER)
        for z in zeros:
            w.writerow([z.index, _fmt(z.gamma), _fmt(z.beta), _fmt(z.multiplicity),
                        _fmt(z.cert_radius), _fmt(z.cert_residual), _fmt(z.loc_error)])


def read_cache(path: str | Path) -> ZeroCache:
    path = Path(path)
    out = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CACHE_HEADER:
            raise ValueError(f"unexpected zero cache header {reader.fieldnames}")
        for row in reader:
            opt = lambda k, f: f(row[k]) if row[k] != "" else None  # noqa: E731
            out.append(ZeroRecord(
                index=int(row["index"]), gamma=float(row["gamma"]),
                beta=float(row["beta"]) if row["beta"] else 0.5,
                multiplicity=opt("multiplicity", int),
                cert_radius=opt("cert_radius", float),
                cert_residual=opt("cert_residual", float),
                loc_error=float(row["loc_error"])))
    gammas = [z.gamma for z in out]
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise ValueError("zero cache ordinates must be strictly increasing")
    t_min, t_max = 2.0, max(gammas, default=None)
    meta = _meta_path(path)
    if meta.exists():
        info = json.loads(meta.read_text(encoding="utf-8"))
        t_min, t_max = float(info["t_min"]), float(info["t_max"])
    return ZeroCache(out, t_min=t_min, t_max=t_max)
