import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blister.core import (
    LENGTH_FACTOR,
    DomainError,
    PhysicalParams,
    ReducedParams,
    curve_L01,
    curve_L02,
    curve_L12,
    curve_Ld,
    f_prime,
    f_second,
    f_value,
    reduce,
    theta_star,
    unreduce,
)

pos = st.floats(1e-3, 1e3, allow_nan=False, allow_infinity=False)


def test_reduce_triple_point_lengths():
    r = reduce(PhysicalParams(1.0, 1.25, 4 * math.pi * math.sqrt(2 / 3)))
    assert r.theta == 1.25
    assert r.L == pytest.approx(2.0, rel=1e-15)


def test_reduce_theta_tilde_zero():
    r = reduce(PhysicalParams(1.0, 1.0, 2 * math.pi * math.sqrt(2 / 3)))
    assert r.L == pytest.approx(1.0, rel=1e-15)
    assert r.theta_tilde == pytest.approx(0.0, abs=1e-15)
    assert r.domain == (0.0, 0.0)


def test_reduce_theta_is_ratio():
    assert reduce(PhysicalParams(2.0, 2.0, 3.0)).theta == 1.0


def test_unreduce_values():
    p = unreduce(ReducedParams(1.0, 1.25, 2.0))
    assert p.L_bar == pytest.approx(4 * math.pi * math.sqrt(2 / 3), rel=1e-15)
    assert p.L_bar == pytest.approx(10.260399, abs=1e-6)
    assert unreduce(ReducedParams(1.0, 1.0, 1.0)).theta_bar == 1.0


@given(pos, pos, pos)
@settings(max_examples=100)
def test_round_trip(a, th, L):
    r = ReducedParams(a, th, L)
    back = reduce(unreduce(r))
    assert back.theta == pytest.approx(th, rel=1e-14)
    assert back.L == pytest.approx(L, rel=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_invalid_params_rejected(bad):
    with pytest.raises(DomainError):
        PhysicalParams(bad, 1.0, 1.0)
    with pytest.raises(DomainError):
        ReducedParams(1.0, bad, 1.0)


def test_f_values():
    assert f_value(0.0, ReducedParams(1.0, 3.0, 7.0)) == 0.0
    assert f_value(1.0, ReducedParams(1.0, 1.25, 2.0)) == pytest.approx(0.0, abs=1e-15)
    assert f_value(1.75, ReducedParams(1.0, 2.0, 2.0)) == pytest.approx(-4.125, abs=1e-14)


def test_f_discontinuous_at_zero():
    r = ReducedParams(1.0, 1.0, 1.0)
    assert f_value(0.0, r) == 0.0
    assert f_value(1e-14, r) == pytest.approx(1.0)


def test_f_outside_domain():
    r = ReducedParams(1.0, 1.0, 5.0)
    for X in (-0.1, 1.0, 2.0):
        with pytest.raises(DomainError):
            f_value(X, r)
    with pytest.raises(DomainError):
        f_prime(0.0, r)


def test_f_prime_values():
    r = ReducedParams(1.0, 1.0, 5**2.5 / 16)
    assert f_prime(0.8, r) == pytest.approx(0.0, abs=1e-13)
    assert f_prime(1e-12, ReducedParams(1.0, 1.0, 3.0)) == pytest.approx(0.5, abs=1e-10)


def test_f_derivatives_match_finite_differences():
    r = ReducedParams(1.0, 2.0, 3.0)
    for X in (0.3, 0.9, 1.6):
        e = 1e-6
        assert f_prime(X, r) == pytest.approx((f_value(X + e, r) - f_value(X - e, r)) / (2 * e), rel=1e-7)
        assert f_second(X, r) == pytest.approx((f_prime(X + e, r) - f_prime(X - e, r)) / (2 * e), rel=1e-6)


def test_curve_values():
    assert theta_star(1.0) == 1.25
    assert curve_L01(1.25) == pytest.approx(2.0, abs=1e-12)
    assert curve_L02(1.25, 1.0) == pytest.approx(2.0, abs=1e-12)
    assert curve_L12(1.25, 1.0) == pytest.approx(2.0, abs=1e-12)
    assert curve_Ld(1.0) == pytest.approx(25 / 24 * math.sqrt(5 / 3), rel=1e-15)
    assert curve_Ld(1.0) == pytest.approx(1.344786, abs=1e-6)
    assert curve_L01(1.0) == pytest.approx(3.493856, abs=1e-6)
    assert curve_L02(2.0, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert curve_L12(2.0, 1.0) == pytest.approx(math.sqrt(4 + 2 * math.sqrt(3)), rel=1e-14)


def test_right_branch_curves_reject_small_theta():
    with pytest.raises(DomainError):
        curve_L02(1.0, 1.0)
    with pytest.raises(DomainError):
        curve_L12(1.0, 1.0)


def test_overflow_is_infinite():
    assert curve_L01(1e-200) == math.inf
    assert curve_Ld(1e-200) == math.inf


@pytest.mark.parametrize("alpha", [0.25, 1.0, 4.0])
def test_curve_monotonicity_and_ordering(alpha):
    ts = theta_star(alpha)
    right = np.sort(ts * (1 + np.random.default_rng(1).uniform(1e-3, 3, 50)))
    L02 = np.array([curve_L02(t, alpha) for t in right])
    L12 = np.array([curve_L12(t, alpha) for t in right])
    L01 = np.array([curve_L01(t) for t in right])
    assert np.all(np.diff(L12) > 0)
    assert np.all(np.diff(L02) < 0)
    assert np.all(L01 < L02) and np.all(L02 < L12)
    left = np.sort(ts * np.random.default_rng(2).uniform(0.01, 1, 50))
    assert np.all(np.diff([curve_L01(t) for t in left]) < 0)
    assert np.all([curve_L01(t) > curve_Ld(t) for t in left])


@given(st.floats(0.05, 20))
def test_tangency_double_root(th):
    r = ReducedParams(1.0, th, curve_Ld(th))
    X = 0.4 * th
    scale = 2 * r.L * X
    assert abs(f_prime(X, r)) <= 1e-10 * scale
    assert abs(f_second(X, r)) <= 1e-10 * 2 * r.L


def test_f_increasing_below_Ld():
    th = 1.5
    r = ReducedParams(1.0, th, 0.9 * curve_Ld(th))
    X = np.linspace(1e-6, th * (1 - 1e-6), 2000)
    assert all(f_prime(float(x), r) > 0 for x in X)


def test_theta_tilde_on_L02():
    for th in np.linspace(1.3, 4.0, 20):
        r = ReducedParams(1.0, float(th), curve_L02(float(th), 1.0))
        assert r.theta_tilde == pytest.approx(1.0, abs=1e-12)


def test_length_factor():
    assert LENGTH_FACTOR == pytest.approx(2 * math.pi * math.sqrt(2 / 3), rel=1e-16)
