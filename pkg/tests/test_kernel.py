from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from zmlab.errors import QuadratureError
from zmlab.kernel import (MAX_ODE_DEPTH, Method, fr_closed_form, fr_closed_form_values, fr_mellin,
                          fr_ode, kernel, lower_envelope, upper_envelope)

RS = [1, 2, 3, 4, 5]
XS = [0.1, 0.5, 1.0, 2.0, 5.0]


@pytest.mark.parametrize("r", RS)
@pytest.mark.parametrize("x", XS)
def test_three_methods_agree(r, x):
    a, b, c = fr_mellin(r, x), fr_closed_form(r, x), fr_ode(r, x)
    assert max(abs(a.value - b.value), abs(a.value - c.value), abs(b.value - c.value)) <= 1e-7
    assert a.err_est <= 1e-7 and b.err_est <= 1e-7 and c.err_est <= 1e-7


@pytest.mark.parametrize("r", RS)
@pytest.mark.parametrize("x", XS)
def test_envelopes(r, x):
    v = fr_closed_form(r, x).value
    assert 0 < v <= upper_envelope(r, x)
    if x <= 1:
        assert v >= lower_envelope(r, x)


def test_f0_is_exponential():
    for m in Method:
        assert abs(kernel(0, 1.0, m).value - math.exp(-1)) <= 1e-12


def test_f1_is_exponential_integral():
    # f_1(x) = E_1(x); independent oracle from scipy
    for x in XS:
        assert fr_closed_form(1, x).value == pytest.approx(special.exp1(x), rel=1e-12)
    assert fr_closed_form(1, 2.0).value == pytest.approx(0.0489005, abs=1e-7)


def test_vs_mpmath_line_integral():
    r, x = 3, 0.7
    f = lambda t: mpmath.gamma(mpmath.mpc(1, t)) * x ** (-mpmath.mpc(1, t)) / mpmath.mpc(1, t) ** r  # noqa: E731
    ref = float(mpmath.re(mpmath.quad(f, [-80, -20, 0, 20, 80]))) / (2 * math.pi)
    assert abs(fr_closed_form(r, x).value - ref) <= 1e-9


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("x", [0.3, 1.0, 3.0])
def test_derivative_recursion(r, x):
    # x f_r'(x) = -f_{r-1}(x)
    h = 1e-5 * x
    fd = (fr_closed_form(r, x + h).value - fr_closed_form(r, x - h).value) / (2 * h)
    assert abs(x * fd + fr_closed_form(r - 1, x).value) <= 1e-6


def test_monotone_decreasing_in_x():
    for r in RS:
        vals = fr_closed_form_values(r, XS)
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_values_helper_matches_scalar():
    vals = fr_closed_form_values(2, [0.5, 1.5])
    assert vals[1] == fr_closed_form(2, 1.5).value
    assert fr_closed_form_values(0, [1.0])[0] == math.exp(-1)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(0.05, 8))
def test_closed_form_vs_ode_random(r, x):
    assert abs(fr_closed_form(r, x).value - fr_ode(r, x).value) <= 1e-9


def test_to_dict():
    d = fr_ode(2, 1.0).to_dict()
    assert d["method"] == "ODE" and d["r"] == 2


def test_error_paths():
    with pytest.raises(ValueError):
        fr_closed_form(-1, 1.0)
    with pytest.raises(ValueError):
        fr_closed_form(1, 0.0)
    with pytest.raises(ValueError):
        fr_ode(MAX_ODE_DEPTH + 1, 1.0)
    with pytest.raises(ValueError):
        fr_mellin(1, 1.0, c=0.5)
    with pytest.raises(ValueError):
        fr_mellin(1, 1.0, t_cut=10)
    with pytest.raises(QuadratureError):
        fr_mellin(0, 1e-30, c=3.0)
    with pytest.raises(ValueError):
        kernel(1, 1.0, "bogus")
