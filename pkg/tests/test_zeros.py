from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from zmlab.errors import ArgumentTrackingError, CoverageError
from zmlab.zeros import (ZeroCache, ZeroRecord, count_formula, read_cache, s_of_t, scan_zeros,
                         smooth_part, window_mult_bound, write_cache, zero_free_delta)
from zmlab.zeta import theta


def test_scan_to_100_matches_mpmath(zeros100, mp_ordinates):
    assert len(zeros100) == 29
    got = np.array([z.gamma for z in zeros100])
    assert np.max(np.abs(got - mp_ordinates)) <= 1e-6
    assert abs(zeros100[0].gamma - 14.1347251417) <= 1e-6
    assert all(z.loc_error <= 1e-6 for z in zeros100)
    assert [z.index for z in zeros100] == list(range(1, 30))


def test_scan_small_windows():
    z = scan_zeros(2, 25, 0.2)
    assert len(z) == 2
    assert abs(z[0].gamma - 14.1347) < 1e-3 and abs(z[1].gamma - 21.0220) < 1e-3
    assert scan_zeros(2, 10, 0.2) == []


def test_scan_is_deterministic_and_parallel_safe():
    a = scan_zeros(2, 100)
    b = scan_zeros(2, 100)
    c = scan_zeros(2, 100, workers=3)
    assert [z.gamma for z in a] == [z.gamma for z in b] == [z.gamma for z in c]


def test_scan_offset_window_uses_ordinate_rank():
    z = scan_zeros(50, 60)
    assert [r.index for r in z] == [11, 12, 13]


def test_scan_preconditions():
    with pytest.raises(ValueError):
        scan_zeros(1, 20)
    with pytest.raises(ValueError):
        scan_zeros(2, 2000)
    with pytest.raises(ValueError):
        scan_zeros(2, 20, coarse_step=0.6)


def test_ordinates_strictly_increasing(zeros100):
    g = [z.gamma for z in zeros100]
    assert all(b > a for a, b in zip(g, g[1:]))


# ---------------------------------------------------------------- S(T), N(T)

def test_s_at_two_matches_argument_identity():
    # N(2) = 0, so S(2) = -theta(2)/pi - 1 exactly
    expected = -theta(2.0) / math.pi - 1.0
    assert abs(s_of_t(2.0) - expected) <= 1e-10


def test_s_at_two_vs_mpmath():
    ref = float(mpmath.arg(mpmath.zeta(mpmath.mpc(0.5, 2)))) / math.pi
    assert abs(s_of_t(2.0) - ref) <= 1e-10


def test_s_at_100_consistent_with_count():
    assert abs(s_of_t(100.0) - (29 - smooth_part(100.0))) < 0.05


def test_s_jumps_by_one_across_a_zero(zeros100):
    g1, g2 = zeros100[0].gamma, zeros100[1].gamma
    left, right = g1 - 0.01, g1 + 0.01
    # N(T) = smooth part + S(T) steps by exactly one across the simple zero
    jump = (s_of_t(right) + smooth_part(right)) - (s_of_t(left) + smooth_part(left))
    assert abs(jump - 1.0) < 1e-6
    mid = 0.5 * (g1 + g2)
    assert abs(s_of_t(mid) + smooth_part(mid) - 1.0) < 0.1


def test_tracking_refuses_path_through_zero(zeros100):
    with pytest.raises(ArgumentTrackingError):
        s_of_t(zeros100[0].gamma, zero_tol=1e-3)


@pytest.mark.parametrize("T,count", [(100.0, 29), (50.0, 10), (14.0, 0)])
def test_count_formula_examples(T, count):
    w = count_formula(T)
    assert abs(w.n_formula - count) < 0.05
    assert w.o_envelope == pytest.approx(1.0 / T)


@pytest.mark.parametrize("T", [20.0, 40.0, 60.0, 80.0, 100.0])
def test_count_consistency(zeros100, T):
    assert min(abs(z.gamma - T) for z in zeros100) >= 0.1
    w = count_formula(T, zeros100)
    assert abs(w.n_counted - w.n_formula) < 0.1


def test_s_of_t_stays_small():
    ts = np.linspace(2.0, 100.0, 60)
    assert max(abs(s_of_t(t)) for t in ts) < 2.0


# ---------------------------------------------------------------- window bound

def test_window_examples(zeros100):
    assert window_mult_bound(14.1347, 1.0, zeros100) == 1
    assert window_mult_bound(17.5, 0.5, zeros100) == 0
    # (4.13, 24.13] holds the ordinates near 14.13 and 21.02
    assert window_mult_bound(14.1347, 10.0, zeros100) == 2


def test_window_coverage(zeros100):
    with pytest.raises(CoverageError):
        window_mult_bound(99.5, 1.0, zeros100)
    part = scan_zeros(50, 70)
    with pytest.raises(CoverageError):
        window_mult_bound(50.5, 1.0, part)
    with pytest.raises(ValueError):
        window_mult_bound(20.0, 0.0, zeros100)


def test_window_is_multiplicity_weighted():
    zs = ZeroCache([ZeroRecord(1, 10.0, multiplicity=3)], t_max=20.0)
    assert window_mult_bound(10.0, 0.5, zs) == 3


# ---------------------------------------------------------------- zero-free scale

def test_zero_free_delta_examples():
    assert zero_free_delta(math.exp(math.e), 1.0) == pytest.approx(math.exp(-2 / 3), rel=1e-12)
    lg = math.log(100.0)
    assert zero_free_delta(100.0, 1.0) == pytest.approx(lg ** (-2 / 3) * math.log(lg) ** (-1 / 3),
                                                       rel=1e-12)
    assert zero_free_delta(100.0, 1.0) == pytest.approx(0.313718, abs=1e-6)
    assert zero_free_delta(1000.0, 1.0) < zero_free_delta(100.0, 1.0)


# ---------------------------------------------------------------- cache

def test_cache_round_trip(tmp_path, zeros100):
    path = tmp_path / "zeros.csv"
    write_cache(path, zeros100)
    header = path.read_text().splitlines()[0]
    assert header == "index,gamma,beta,multiplicity,cert_radius,cert_residual,loc_error"
    back = read_cache(path)
    assert [z.gamma for z in back] == [z.gamma for z in zeros100]
    assert [z.multiplicity for z in back] == [1] * 29
    assert back.t_max == 100.0


def test_cache_unset_fields_empty(tmp_path):
    path = tmp_path / "z.csv"
    write_cache(path, scan_zeros(2, 25))
    row = path.read_text().splitlines()[1].split(",")
    assert row[3] == row[4] == row[5] == ""
    assert read_cache(path)[0].multiplicity is None


def test_cache_rejects_unsorted(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("index,gamma,beta,multiplicity,cert_radius,cert_residual,loc_error\n"
                    "1,21.0,0.5,,,,1e-9\n2,14.1,0.5,,,,1e-9\n")
    with pytest.raises(ValueError):
        read_cache(path)


def test_count_rejects_t_on_an_ordinate(zeros100):
    with pytest.raises(ValueError):
        count_formula(zeros100[0].gamma + 5e-5, zeros100)
