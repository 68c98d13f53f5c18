"""Acceptance suite: eight criteria at their stated tolerances.

Each criterion prints one ``PASS``/``FAIL`` line. Run with
``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time

import mpmath
import numpy as np
import pytest

from zmlab.bounds import (crossover_beta, fm_series, thm2_bound, thm2_bound_reduced,
                          thm2_optimize_c, thm4_beta_ceiling, thm4_mult_ceiling,
                          trig_polynomial)
from zmlab.density import count_density
from zmlab.kernel import (fr_closed_form, fr_mellin, fr_ode, kernel, lower_envelope,
                          upper_envelope)
from zmlab.mollifier import mellin_identity_check, mobius_and_divisors, mollifier_build
from zmlab.multiplicity import (certify_multiplicity, certify_zeros, jensen_probe,
                                jensen_sides, polynomial_logderiv)
from zmlab.zeros import count_formula, scan_zeros

FIRST_ORDINATE = 14.1347251417
COUNT_POINTS = (20.0, 40.0, 60.0, 80.0, 100.0)

_zeros_cache: dict = {}


def certified_zeros_100():
    if "z" not in _zeros_cache:
        _zeros_cache["z"] = certify_zeros(scan_zeros(2.0, 100.0))
    return _zeros_cache["z"]


# ---------------------------------------------------------------- criteria

def criterion_1():
    start = time.perf_counter()
    zs = scan_zeros(2.0, 100.0)
    count = sum(1 for z in zs if 0 < z.gamma <= 100.0)
    first_err = abs(zs[0].gamma - FIRST_ORDINATE)
    gaps = [abs(count_formula(T, zs).n_counted - count_formula(T, zs).n_formula)
            for T in COUNT_POINTS]
    separated = all(min(abs(z.gamma - T) for z in zs) >= 0.1 for T in COUNT_POINTS)
    elapsed = time.perf_counter() - start
    ok = count == 29 and first_err <= 1e-6 and max(gaps) < 0.1 and separated and elapsed < 60
    return ok, (f"zeros={count}, |gamma_1 - ref|={first_err:.2e}, "
                f"max count gap={max(gaps):.3f}, runtime={elapsed:.2f}s")


def criterion_2():
    zs = certified_zeros_100()
    simple = all(z.multiplicity == 1 and z.cert_residual < 0.01 for z in zs)
    worst = max(z.cert_residual for z in zs)
    s0 = complex(0.7, 30.0)
    synth = [certify_multiplicity(s0, 0.1, logderiv=polynomial_logderiv([s0], [m])).multiplicity
             for m in range(1, 6)]
    ok = len(zs) == 29 and simple and synth == [1, 2, 3, 4, 5]
    return ok, f"{len(zs)} simple, max residual={worst:.2e}, synthetic m={synth}"


def criterion_3():
    zs = certified_zeros_100()
    gaps = [abs(s.lhs - s.rhs) for s in (jensen_probe(g, 0.5, zs) for g in (30.0, 40.0, 50.0, 60.0))]
    a = 0.2 + 0.1j
    one = jensen_sides(lambda w: w - a, 0.0, 0.5, [a])
    synth_gap = abs(one.lhs - one.rhs)
    ok = max(gaps) <= 1e-6 and synth_gap <= 1e-12 and one.interior == 1
    return ok, f"max zeta gap={max(gaps):.2e}, one-zero synthetic gap={synth_gap:.2e}"


def criterion_4():
    start = time.perf_counter()
    worst, envelopes = 0.0, True
    for r in range(1, 6):
        for x in (0.1, 0.5, 1.0, 2.0, 5.0):
            vals = [fr_mellin(r, x).value, fr_closed_form(r, x).value, fr_ode(r, x).value]
            worst = max(worst, max(vals) - min(vals))
            for v in vals:
                envelopes &= 0 < v <= upper_envelope(r, x)
                if x <= 1:
                    envelopes &= v >= lower_envelope(r, x)
    f0 = max(abs(kernel(0, 1.0, m).value - math.exp(-1)) for m in ("MELLIN", "CLOSED_FORM", "ODE"))
    fd_worst = 0.0
    for r in range(1, 6):
        for x in (0.5, 1.0, 2.0):
            h = 1e-5 * x
            fd = (fr_closed_form(r, x + h).value - fr_closed_form(r, x - h).value) / (2 * h)
            fd_worst = max(fd_worst, abs(x * fd + fr_closed_form(r - 1, x).value))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-7 and envelopes and f0 <= 1e-12 and fd_worst <= 1e-6 and elapsed < 30
    return ok, (f"max 3-way spread={worst:.2e}, envelopes={'hold' if envelopes else 'violated'}, "
                f"|f_0(1) - 1/e|={f0:.1e}, derivative residual={fd_worst:.1e}, "
                f"runtime={elapsed:.2f}s")


def _brute_mu_d(n_max):
    d = [0] * (n_max + 1)
    mu = [0] * (n_max + 1)
    mu[1] = 1
    for k in range(1, n_max + 1):
        for m in range(k, n_max + 1, k):
            d[m] += 1
    # mu via sum_{k | n} mu(k) = [n = 1]
    for n in range(2, n_max + 1):
        mu[n] = -sum(mu[k] for k in range(1, n // 2 + 1) if n % k == 0)
    return mu, d


def criterion_5():
    n_max = 10 ** 4
    mu, d = _brute_mu_d(n_max)
    mu_s, d_s = mobius_and_divisors(n_max)
    sieve_ok = list(mu_s) == mu and list(d_s[1:]) == d[1:]
    a_ok = True
    for X in (10, 100):
        t = mollifier_build(X, n_max)
        a_ok &= t.a[1] == 1 and not np.any(t.a[2:X + 1])
    tuples = [(complex(0.75, 30), 20, 50, 1), (complex(0.8, 40), 10, 30, 2),
              (complex(0.9, 14), 1, 20, 1), (complex(0.7, 25), 5, 40, 0),
              (complex(0.6, 50), 10, 20, 3)]
    gaps = [mellin_identity_check(rho, X, Y, R).gap for rho, X, Y, R in tuples]
    ok = sieve_ok and a_ok and max(gaps) < 1e-6
    return ok, (f"sieve={'match' if sieve_ok else 'MISMATCH'}, a(n) window={'ok' if a_ok else 'bad'}, "
                f"max identity gap={max(gaps):.2e} over {len(gaps)} tuples")


def criterion_6():
    path_gap = 0.0
    for beta in (0.7, 0.75, 0.8, 0.9, 0.95):
        for gamma in (50.0, 100.0, 1e6):
            a = thm2_bound(beta, gamma, 1.5 - beta, 3.0).value
            b = thm2_bound_reduced(beta, gamma, 3.0).value
            path_gap = max(path_gap, abs(a - b) / max(1.0, abs(a)))
    cross = abs(crossover_beta() - (5 - math.sqrt(5)) / 4)
    trip = 0.0
    for beta in (0.8, 0.9, 0.95):
        for gamma in (100.0, 1e6, 1e12):
            m = thm4_mult_ceiling(beta, gamma).value
            trip = max(trip, abs(thm4_beta_ceiling(m, gamma).value - beta) / beta)
    dominated = True
    for beta in (0.7, 0.75, 0.8, 0.9, 0.95):
        for gamma in (50.0, 100.0, 1e6):
            opt = thm2_optimize_c(beta, gamma, 3.0)
            for c in np.geomspace(1 - beta + 1e-4, 10, 40):
                rep = thm2_bound(beta, gamma, c, 3.0)
                if rep.valid:
                    dominated &= opt.valid and opt.value <= rep.value + 1e-12
    ok = path_gap <= 1e-12 and cross <= 1e-12 and trip <= 1e-9 and dominated
    return ok, (f"thm2 path gap={path_gap:.1e}, crossover error={cross:.1e}, "
                f"round trip={trip:.1e}, optimizer dominance={'yes' if dominated else 'NO'}")


def criterion_7():
    r1 = fm_series(2.0, 0.0, 1)
    exact = -float(mpmath.zeta(2, derivative=1) / mpmath.zeta(2))
    err1 = abs(r1.value - exact)
    r2 = fm_series(1.5, 0.0, 2)
    dev2 = abs(r2.value - 1 / 0.5 ** 2)
    theta = np.linspace(-math.pi, math.pi, 10_000)
    lhs, _ = trig_polynomial(theta)
    nonneg = lhs.min() >= -1e-13
    tiny = lhs < 1e-12
    equality_ok = bool(np.all(np.abs(np.cos(theta[tiny]) + 1) < 1e-5))
    ok = err1 <= r1.tail and dev2 <= 4.0 + r2.tail and nonneg and equality_ok
    return ok, (f"F_1(2) error={err1:.1e} (tail {r1.tail:.1e}), |F_2(1.5) - 4|={dev2:.3f} <= 4, "
                f"trig min={lhs.min():.1e}, equality only at cos=-1: {equality_ok}")


def criterion_8():
    zs = certified_zeros_100()
    c = (count_density(zs, 0.5, 100.0, 1).count, count_density(zs, 0.5, 100.0, 2).count,
         count_density(zs, 0.9, 100.0, 1).count)
    sigmas, Ts, rs = (0.5, 0.6, 0.9), (25.0, 50.0, 100.0), (1, 2, 3)
    grid = {(s, T, r): count_density(zs, s, T, r).count for s in sigmas for T in Ts for r in rs}
    mono = all(
        grid[(s2, T, r)] <= grid[(s1, T, r)] for s1, s2 in zip(sigmas, sigmas[1:]) for T in Ts
        for r in rs
    ) and all(
        grid[(s, T1, r)] <= grid[(s, T2, r)] for T1, T2 in zip(Ts, Ts[1:]) for s in sigmas
        for r in rs
    ) and all(
        grid[(s, T, r2)] <= grid[(s, T, r1)] for r1, r2 in zip(rs, rs[1:]) for s in sigmas
        for T in Ts
    )
    ok = c == (29, 0, 0) and mono
    return ok, f"N1(1/2,100)={c[0]}, N2(1/2,100)={c[1]}, N1(0.9,100)={c[2]}, monotone={mono}"


CRITERIA = [
    (1, "zero location", criterion_1),
    (2, "multiplicity certification", criterion_2),
    (3, "Jensen probe", criterion_3),
    (4, "kernel suite", criterion_4),
    (5, "mollifier and identity", criterion_5),
    (6, "bound formula algebra", criterion_6),
    (7, "F_m checks", criterion_7),
    (8, "density counters", criterion_8),
]


def _line(num: int, name: str, ok: bool, detail: str) -> str:
    return f"{'PASS' if ok else 'FAIL'} criterion {num} ({name}): {detail}"


@pytest.mark.parametrize("num,name,func", CRITERIA, ids=[f"criterion_{n}" for n, *_ in CRITERIA])
def test_criterion(num, name, func, capsys):
    ok, detail = func()
    with capsys.disabled():
        print("\n" + _line(num, name, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for num, name, func in CRITERIA:
        ok, detail = func()
        print(_line(num, name, ok, detail))
        results.append(ok)
    sys.exit(0 if all(results) else 1)
