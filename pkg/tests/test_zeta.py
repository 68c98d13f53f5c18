from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from zmlab.errors import PoleError
from zmlab.zeros import zero_free_delta
from zmlab.zeta import (SPoint, chi, hardy_z, log_gamma, log_gamma_array, theta, zeta,
                        zeta_array, zeta_deriv, zeta_em_direct)


def mp_zeta(s: complex) -> complex:
    return complex(mpmath.zeta(s))


# ---------------------------------------------------------------- types

def test_spoint_rejects_non_finite():
    with pytest.raises(ValueError):
        SPoint(float("nan"), 0.0)
    with pytest.raises(ValueError):
        SPoint(0.5, float("inf"))
    assert SPoint(0.5, 14.0).s == complex(0.5, 14.0)


# ---------------------------------------------------------------- zeta

def test_basel_value():
    r = zeta(SPoint(2.0, 0.0))
    assert abs(r.value - math.pi ** 2 / 6) <= 1e-12
    assert r.abs_error <= 1e-12


def test_zeta_at_zero():
    assert abs(zeta(0).value + 0.5) < 1e-13


def test_first_zero_is_small():
    assert abs(zeta(SPoint(0.5, 14.1347251417)).value) < 1e-6


def test_pole_rejected():
    with pytest.raises(PoleError):
        zeta(1.0)
    with pytest.raises(PoleError):
        zeta(1.0 + 1e-13)


def test_window_and_target_checks():
    with pytest.raises(ValueError):
        zeta(complex(0.5, 2e4))
    with pytest.raises(ValueError):
        zeta(2.0, target_abs_error=1e-14)


@pytest.mark.parametrize("s", [complex(0.5, 100), complex(-1.5, 250), complex(2.5, -700),
                               complex(0.1, 999), complex(-2, 3), complex(0.75, 0.1)])
def test_matches_mpmath(s):
    r = zeta(s)
    assert abs(r.value - mp_zeta(s)) <= r.abs_error


def test_error_estimate_covers_actual_error():
    rng = np.random.default_rng(7)
    s = rng.uniform(-2, 3, 150) + 1j * rng.uniform(-1000, 1000, 150)
    vals, errs = zeta_array(s)
    actual = np.array([abs(v - mp_zeta(p)) for v, p in zip(vals, s)])
    assert np.all(actual <= errs)


@settings(max_examples=100, deadline=None)
@given(st.floats(-2, 3), st.floats(-100, 100))
def test_conjugate_symmetry(sigma, t):
    s = complex(sigma, t)
    if abs(s - 1) < 1e-3:
        return
    a = zeta(s).value
    b = zeta(s.conjugate()).value
    assert abs(a - b.conjugate()) <= 1e-12 * max(1.0, abs(a))


def test_functional_equation_grid():
    sig, t = np.meshgrid(np.linspace(-1, 2, 20), np.linspace(5, 100, 20))
    s = (sig + 1j * t).ravel()
    z, _ = zeta_array(s)
    z1, _ = zeta_array(1 - s)
    c = np.array([chi(p).value for p in s])
    assert np.max(np.abs(z - c * z1)) <= 1e-8


def test_reflection_matches_direct_sum():
    s = complex(0.3, 20)
    assert abs(zeta(s).value - zeta_em_direct(s).value) < 1e-9


@pytest.mark.parametrize("gamma", [50.0, 100.0, 500.0])
def test_no_small_values_near_one_line(gamma):
    delta = zero_free_delta(gamma, 0.05)
    sig = np.linspace(1 - delta, 3, 50)
    z, _ = zeta_array(sig + 1j * gamma)
    assert np.abs(z).min() > 0.01


# ---------------------------------------------------------------- derivatives

def test_deriv_order_zero():
    assert abs(zeta_deriv(2.0, 0).value - zeta(2.0).value) <= 1e-10


def test_deriv_vs_finite_difference():
    s, h = complex(2, 5), 1e-4
    fd = (zeta(s + h).value - zeta(s - h).value) / (2 * h)
    assert abs(zeta_deriv(s, 1).value - fd) <= 1e-6


def test_deriv_radius_independent():
    a = zeta_deriv(3.0, 2, radius=0.25).value
    b = zeta_deriv(3.0, 2, radius=0.5).value
    assert abs(a - b) <= 1e-9


def test_deriv_vs_mpmath():
    s = complex(0.5, 14.134725141734693)
    for k in (1, 2, 3):
        r = zeta_deriv(s, k)
        assert abs(r.value - complex(mpmath.zeta(s, derivative=k))) <= max(r.abs_error, 1e-9)


def test_deriv_circle_hitting_pole():
    with pytest.raises(PoleError):
        zeta_deriv(1.2, 1, radius=0.25)


def test_deriv_order_zero_agrees_everywhere():
    rng = np.random.default_rng(3)
    for s in rng.uniform(-1, 3, 10) + 1j * rng.uniform(5, 200, 10):
        d0 = zeta_deriv(s, 0)
        z = zeta(s)
        assert abs(d0.value - z.value) <= d0.abs_error + z.abs_error + 1e-12


# ---------------------------------------------------------------- chi

def test_chi_fixed_point():
    assert abs(chi(0.5).value - 1) < 1e-14


def test_chi_unimodular_on_critical_line():
    for t in (50.0, 300.0, 999.0):
        assert abs(abs(chi(complex(0.5, t)).value) - 1) <= 1e-10


def test_chi_pole():
    with pytest.raises(PoleError):
        chi(3)


def test_chi_size():
    # |chi(sigma + it)| behaves like (t / 2 pi)^(1/2 - sigma)
    s = complex(-1.0, 500.0)
    ratio = abs(chi(s).value) / (500 / (2 * math.pi)) ** 1.5
    assert abs(ratio - 1) < 0.01


# ---------------------------------------------------------------- Hardy Z

def test_hardy_z_sign_change_brackets_first_zero():
    assert hardy_z(14.0) * hardy_z(15.0) < 0


def test_hardy_z_modulus():
    assert abs(abs(hardy_z(30.0)) - abs(zeta(complex(0.5, 30)).value)) <= 1e-10


def test_hardy_z_at_zero():
    assert abs(hardy_z(14.1347251417)) < 1e-6


def test_hardy_z_vs_mpmath():
    for t in (20.0, 77.7, 500.0):
        assert abs(hardy_z(t) - float(mpmath.siegelz(t))) <= 1e-10


def test_theta_vs_mpmath():
    for t in (10.0, 100.0, 1000.0):
        assert abs(theta(t) - float(mpmath.siegeltheta(t))) <= 1e-10


# ---------------------------------------------------------------- log gamma

def test_log_gamma_classical_values():
    assert abs(log_gamma(1.0)) < 1e-14
    assert abs(log_gamma(0.5) - math.log(math.sqrt(math.pi))) < 1e-14


def test_log_gamma_recurrence_oracle():
    # Gamma(3 + 4i) = Gamma(23 + 4i) / prod_{k=3}^{22} (k + 4i)
    z = complex(3, 4)
    seed = complex(23, 4)
    prod = complex(1, 0)
    for k in range(3, 23):
        prod *= complex(k, 4)
    expected = cmath.exp(log_gamma(seed)) / prod
    assert abs(cmath.exp(log_gamma(z)) - expected) <= 1e-10 * abs(expected)


def test_log_gamma_vs_scipy():
    rng = np.random.default_rng(5)
    z = rng.uniform(0.5, 30, 200) + 1j * rng.uniform(-500, 500, 200)
    ours = log_gamma_array(z)
    ref = special.loggamma(z)
    assert np.max(np.abs(ours - ref) / np.maximum(1, np.abs(ref))) <= 1e-12


def test_log_gamma_pole():
    with pytest.raises(PoleError):
        log_gamma(-2)
