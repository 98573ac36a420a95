import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blister import io
from blister.classifier import Region, classify, minimize_aux
from blister.core import LENGTH_FACTOR, DomainError, PhysicalParams, ReducedParams, curve_Ld, reduce, unreduce
from blister.profile import (
    blister_size,
    build_profile,
    closed_form_energy,
    eval_profile,
    global_profiles,
    ode_residual,
    optimize_p_branch,
    p_branch_energy,
    profile_energy_quadrature,
    sample,
    smallest_blister,
    strain_budget,
    write_profile_csv,
)

D2_POINT = unreduce(ReducedParams(1.0, 2.0, 2.0))
D1_POINT = unreduce(ReducedParams(1.0, 1.0, 10.0))


def _random_profiles(seed, count):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        r = ReducedParams(1.0, rng.uniform(0.2, 4), rng.uniform(0.1, 20))
        if r.theta_tilde <= 0:
            continue
        K = rng.uniform(0.01, 1.0) * r.theta_tilde
        out.append(build_profile(K, unreduce(r)))
    return out


def test_trivial_profile():
    bp = build_profile(0.0, D1_POINT)
    assert bp.trivial and bp.T == 0 and bp.A == 0
    z1, z2, dz1, dz2, d2 = eval_profile(bp, np.linspace(-5, 5, 11))
    assert not np.any(z1) and not np.any(z2)
    assert profile_energy_quadrature(bp, 256) == 0.0
    assert closed_form_energy(0.0, reduce(D1_POINT)) == 0.0


def test_full_delamination_in_D2():
    bp = build_profile(1.75, D2_POINT)
    assert bp.T == pytest.approx(D2_POINT.L_bar, rel=1e-12)
    assert bp.fully_delaminated
    assert 2 * math.pi / bp.beta == pytest.approx(D2_POINT.L_bar, rel=1e-12)


def test_T_dichotomy():
    r = reduce(D1_POINT)
    bp = build_profile(r.theta_tilde, D1_POINT)
    assert abs(bp.T - D1_POINT.L_bar) <= 1e-10 * D1_POINT.L_bar
    bp = build_profile(0.5 * r.theta_tilde, D1_POINT)
    assert bp.T < D1_POINT.L_bar


def test_K_outside_domain_rejected():
    with pytest.raises(DomainError):
        build_profile(1.8, D2_POINT)
    with pytest.raises(DomainError):
        build_profile(-0.1, D2_POINT)


def test_peak_and_non_interpenetration():
    for bp in _random_profiles(1, 20):
        assert eval_profile(bp, 0.0)[1] == pytest.approx(2 * bp.A, rel=1e-15)
        x = np.linspace(-0.5, 0.5, 10_000) * bp.params.L_bar
        assert np.all(eval_profile(bp, x)[1] >= 0)


def test_normalization():
    bp = build_profile(0.9, D1_POINT)
    Lb = D1_POINT.L_bar
    assert eval_profile(bp, -0.5 * Lb)[0] == pytest.approx(0.0, abs=1e-13)
    x = np.linspace(-0.5, 0.5, 1001) * Lb
    assert eval_profile(bp, x)[1].min() == 0.0


def test_periodic_wrap():
    bp = build_profile(0.9, D1_POINT)
    x = np.array([0.3, 2.0, -4.0])
    a = eval_profile(bp, x)
    b = eval_profile(bp, x + 3 * D1_POINT.L_bar)
    for u, v in zip(a, b):
        np.testing.assert_allclose(u, v, rtol=1e-10, atol=1e-10)


def test_membrane_identity():
    for bp in _random_profiles(2, 20):
        x = np.random.default_rng(0).uniform(-0.5, 0.5, 10_000) * bp.params.L_bar
        _, _, dz1, dz2, _ = eval_profile(bp, x)
        assert np.max(np.abs(dz1 + 0.5 * dz2**2 - 0.5 * bp.K)) <= 1e-10 * (1 + bp.K)


def test_ode_residual():
    for bp in _random_profiles(3, 10):
        x = np.random.default_rng(1).uniform(-0.5, 0.5, 100) * bp.T
        assert np.max(np.abs(ode_residual(bp, x))) <= 1e-10 * bp.A * bp.beta**4
        assert abs(ode_residual(bp, 0.0)) <= 1e-10 * bp.A * bp.beta**4


def test_ode_residual_outside_support():
    bp = build_profile(0.5, D1_POINT)
    with pytest.raises(DomainError):
        ode_residual(bp, bp.T)


def test_strain_budget():
    for bp in _random_profiles(4, 20):
        assert strain_budget(bp) == pytest.approx(bp.K, rel=1e-8)


def test_energy_equivalence_random_K():
    for bp in _random_profiles(5, 20):
        ec = closed_form_energy(bp.K, reduce(bp.params))
        assert profile_energy_quadrature(bp, 1 << 16) == pytest.approx(ec, rel=1e-6)


def test_closed_form_energy_D2():
    assert closed_form_energy(1.75, reduce(D2_POINT)) == pytest.approx(LENGTH_FACTOR * -4.125, rel=1e-14)
    assert closed_form_energy(1.75, reduce(D2_POINT)) == pytest.approx(-21.16207, abs=1e-5)


def test_quadrature_convergence():
    # aligned nodes make the trapezoid rule exact up to roundoff for these
    # trigonometric integrands, so the error must not grow under refinement
    bp = build_profile(0.6, D1_POINT)
    ec = closed_form_energy(0.6, reduce(D1_POINT))
    errs = [abs(profile_energy_quadrature(bp, n) - ec) for n in (256, 512, 1024, 2048)]
    for e1, e2 in zip(errs, errs[1:]):
        assert e2 <= e1 / 4 + 1e-13 * abs(ec)


def test_quadrature_small_n_rejected():
    with pytest.raises(ValueError):
        profile_energy_quadrature(build_profile(0.6, D1_POINT), 32)


def test_smallest_blister():
    T1, A1 = smallest_blister(1.0)
    assert T1 == pytest.approx(4 * math.pi * math.sqrt(2 / 3), abs=1e-12)
    assert A1 == pytest.approx(4 / math.sqrt(3), abs=1e-12)
    T16, A16 = smallest_blister(16.0)
    assert T16 == pytest.approx(2 * T1, rel=1e-15)
    assert A16 == A1
    with pytest.raises(DomainError):
        smallest_blister(0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_lower_bounds_in_D1(alpha):
    T_star, A_star = smallest_blister(alpha)
    rng = np.random.default_rng(6)
    n = 0
    while n < 100:
        r = ReducedParams(alpha, rng.uniform(0.1, 5), rng.uniform(0.1, 50))
        if classify(r, 0.0) is not Region.D1:
            continue
        T, A = blister_size(r)
        assert T >= T_star - 1e-9 and A >= A_star - 1e-9
        n += 1


def test_global_profiles_tie_lists_both():
    res, profiles = global_profiles(unreduce(ReducedParams(1.0, 1.25, 2.0)))
    assert [bp.K == 0 for bp in profiles] == [True, False]
    assert profiles[1].fully_delaminated


def test_p_branch_p1_matches_closed_form():
    rng = np.random.default_rng(12)
    r = reduce(D1_POINT)
    for K in rng.uniform(0.01, r.theta_tilde, 20):
        assert p_branch_energy(float(K), 1, D1_POINT) == pytest.approx(closed_form_energy(float(K), r), rel=1e-12)


def test_p_branch_increment():
    pp = unreduce(ReducedParams(1.0, 1.0, 40.0))
    K = 0.5
    step = 2 * math.pi * math.sqrt(2 * pp.alpha / (3 * (pp.theta_bar - pp.alpha * K)))
    assert p_branch_energy(K, 2, pp) - p_branch_energy(K, 1, pp) == pytest.approx(step, rel=1e-12)


def test_p_branch_does_not_fit():
    with pytest.raises(DomainError):
        p_branch_energy(0.5, 100, D1_POINT)


def test_optimize_p_branch():
    K2, E2 = optimize_p_branch(2, D1_POINT)
    half = minimize_aux(ReducedParams(1.0, 1.0, 5.0))
    assert K2 == pytest.approx(half.K, rel=1e-14)
    # two bumps in L_bar cost the same as one bump in each half
    E_half = closed_form_energy(half.K, ReducedParams(1.0, 1.0, 5.0))
    assert E2 == pytest.approx(2 * E_half, rel=1e-12)


def test_optimize_p_branch_none_when_too_short():
    p = int(math.ceil(10.0 / curve_Ld(1.0))) + 1
    assert optimize_p_branch(p, D1_POINT) is None


def test_csv_output(tmp_path):
    bp = build_profile(0.9, D1_POINT)
    path = write_profile_csv(tmp_path / "p.csv", bp, 512)
    raw = path.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    header, rows = io.read_csv(path)
    assert header == ["x", "zeta1", "zeta2"]
    assert len(rows) == 512
    zmax = max(float(r[2]) for r in rows)
    assert zmax == pytest.approx(2 * bp.A, rel=1e-12)
    again = write_profile_csv(tmp_path / "q.csv", bp, 512).read_bytes()
    assert raw == again


def test_to_dict_schema():
    d = build_profile(0.9, D1_POINT).to_dict()
    assert list(d) == ["alpha", "theta_bar", "L_bar", "K", "beta", "A", "T", "branch"]


@given(st.floats(0.3, 3.0), st.floats(1.0, 30.0), st.floats(0.05, 0.95))
@settings(max_examples=40, deadline=None)
def test_energy_equivalence_property(th, L, frac):
    r = ReducedParams(1.0, th, L)
    if r.theta_tilde <= 0:
        return
    K = frac * r.theta_tilde
    bp = build_profile(K, unreduce(r))
    assert profile_energy_quadrature(bp, 4096) == pytest.approx(closed_form_energy(K, r), rel=1e-6)


def test_sample_grid():
    x, z1, z2 = sample(build_profile(0.9, D1_POINT), 8)
    assert x[0] == pytest.approx(-0.5 * D1_POINT.L_bar)
    assert np.allclose(np.diff(x), D1_POINT.L_bar / 8)


def test_physical_params_accepts_D0():
    res, profiles = global_profiles(PhysicalParams(1.0, 1.0, 1.0))
    assert res.trivial_only and profiles[0].trivial
