import math

import numpy as np
import pytest
from scipy.optimize import brentq

from gcl.degree_model import DegreeDistribution, from_counts, near_critical_sequence
from gcl.errors import BetaZero, DomainError, NotCritical, NotSupercritical
from gcl.theory import (
    GeneratingFunctions,
    Regime,
    classify,
    empirical_gf,
    eval_g,
    eval_H,
    near_critical_from_sequence,
    predict_near_critical,
    predict_supercritical,
    solve_xi,
    theory_report,
)

from conftest import HALF_ONE_THREE, NEAR_BASE

DISTS = {
    "half13": HALF_ONE_THREE,
    "poisson2": DegreeDistribution.poisson(2.0),
    "poisson05": DegreeDistribution.poisson(0.5),
    "poisson1": DegreeDistribution.poisson(1.0),
    "near_base": NEAR_BASE,
    "power_law": DegreeDistribution.power_law(2.5, 200),
    "mixed": DegreeDistribution.finite({0: 0.1, 1: 0.3, 2: 0.2, 4: 0.4}),
}


def poisson_fixed_point(lam):
    x = 0.0
    for _ in range(100_000):
        y = math.exp(lam * (x - 1))
        if abs(y - x) < 1e-15:
            break
        x = y
    return x


@pytest.mark.parametrize("name", sorted(DISTS))
def test_endpoints_and_normalisation(name):
    gf = GeneratingFunctions.from_distribution(DISTS[name])
    assert abs(gf.H(0.0)) < 1e-12 and abs(gf.H(1.0)) < 1e-12
    assert abs(gf.g(1.0) - 1) < 1e-12
    assert abs(gf.h(1.0) - gf.lam) < 1e-12


def test_poisson_closed_forms():
    lam = 2.0
    gf = GeneratingFunctions.from_distribution(DegreeDistribution.poisson(lam))
    x = np.linspace(0, 1, 101)
    assert np.allclose(gf.g(x), np.exp(lam * (x - 1)), atol=1e-12)
    assert np.allclose(gf.H(x), lam * x * (x - np.exp(lam * (x - 1))), atol=1e-11)


def test_half13_H_value():
    assert abs(eval_H(HALF_ONE_THREE, 0.5) - 1 / 16) < 1e-15
    x = np.linspace(0, 1, 11)
    assert np.allclose(eval_H(HALF_ONE_THREE, x), 2 * x**2 - 0.5 * x - 1.5 * x**3, atol=1e-15)


def test_derivatives_against_finite_differences():
    gf = GeneratingFunctions.from_distribution(DISTS["mixed"])
    x, h = 0.4, 1e-5
    assert abs(gf.dg(x) - (gf.g(x + h) - gf.g(x - h)) / (2 * h)) < 1e-8
    assert abs(gf.dh(x) - (gf.h(x + h) - gf.h(x - h)) / (2 * h)) < 1e-8
    assert abs(gf.d2H(x) - (gf.dH(x + h) - gf.dH(x - h)) / (2 * h)) < 1e-7
    assert abs(gf.dH(1.0) + gf.edd2) < 1e-12


def test_domain_error():
    with pytest.raises(DomainError):
        eval_g(HALF_ONE_THREE, 1.5)
    with pytest.raises(DomainError):
        eval_H(HALF_ONE_THREE, np.array([0.2, -0.1]))


def test_classify_examples():
    assert classify(DegreeDistribution.poisson(2.0)) is Regime.SUPERCRITICAL
    assert classify(DegreeDistribution.poisson(1.0)) is Regime.CRITICAL
    assert classify(DegreeDistribution.poisson(0.5)) is Regime.SUBCRITICAL
    assert classify(DegreeDistribution.point_mass(2)) is Regime.DEGENERATE_ALL_DEG2
    assert classify(DegreeDistribution.finite({0: 0.5, 2: 0.5})) is Regime.DEGENERATE_ALL_DEG2
    assert classify(DegreeDistribution.point_mass(3)) is Regime.DEGENERATE_P1_ZERO


def test_xi_half13_matches_quadratic():
    xi = solve_xi(HALF_ONE_THREE)
    root = (4 - math.sqrt(16 - 12)) / 6
    assert abs(xi - root) < 1e-12 and abs(xi - 1 / 3) < 1e-12


@pytest.mark.parametrize("lam", [1.1, 1.5, 2.0, 3.0, 5.0])
def test_poisson_xi_fixed_point(lam):
    xi = solve_xi(DegreeDistribution.poisson(lam))
    assert abs(xi - math.exp(lam * (xi - 1))) <= 1e-9
    if lam == 2.0:
        assert abs(xi - poisson_fixed_point(lam)) < 1e-10
        assert abs(xi - 0.2031878) < 1e-7


def test_xi_agrees_with_brentq():
    gf = GeneratingFunctions.from_distribution(DISTS["power_law"])
    xi = solve_xi(gf)
    ref = brentq(gf.H, 1e-9, 1 - 1e-9, xtol=1e-15) if gf.H(1e-9) < 0 else None
    assert ref is not None and abs(xi - ref) < 1e-10


def test_xi_degenerate_and_errors():
    assert solve_xi(DegreeDistribution.point_mass(3)) == 0.0
    for d in (DegreeDistribution.poisson(0.5), DegreeDistribution.point_mass(2), NEAR_BASE):
        with pytest.raises(NotSupercritical):
            solve_xi(d)


@pytest.mark.parametrize("name", ["half13", "poisson2", "power_law", "mixed"])
def test_sign_structure_supercritical(name):
    gf = GeneratingFunctions.from_distribution(DISTS[name])
    assert classify(gf) is Regime.SUPERCRITICAL
    xi = solve_xi(gf)
    x = np.linspace(0, 1, 202)[1:-1]
    vals = gf.H(x)
    assert np.all(vals[x < xi - 1e-9] < 0)
    assert np.all(vals[x > xi + 1e-9] > 0)


@pytest.mark.parametrize("name", ["poisson05", "poisson1", "near_base"])
def test_sign_structure_not_supercritical(name):
    gf = GeneratingFunctions.from_distribution(DISTS[name])
    x = np.linspace(0, 1, 202)[1:-1]
    assert np.all(gf.H(x) < 0)


def test_predict_half13():
    r = predict_supercritical(HALF_ONE_THREE)
    assert abs(r.v_frac - 22 / 27) < 1e-12
    assert abs(r.e_frac - 8 / 9) < 1e-12
    assert set(r.vk_frac) == {1, 3}
    assert abs(r.vk_frac[1] - 1 / 3) < 1e-12 and abs(r.vk_frac[3] - 13 / 27) < 1e-12
    assert abs(r.tau - math.log(3)) < 1e-11


def test_predict_poisson_and_p1_zero():
    r = predict_supercritical(DegreeDistribution.poisson(2.0))
    assert abs(r.v_frac - (1 - r.xi)) < 1e-10
    r3 = predict_supercritical(DegreeDistribution.point_mass(3))
    assert r3.v_frac == 1.0 and r3.e_frac == 1.5 and r3.tau_infinite
    d = r3.to_dict()
    assert d["tau"] is None and d["tau_infinite"] is True


def test_report_subcritical_and_all_deg2():
    r = theory_report(DegreeDistribution.poisson(0.5))
    assert r.v_frac == 0.0 and r.e_frac == 0.0 and r.xi is None
    r2 = theory_report(DegreeDistribution.point_mass(2))
    assert r2.regime is Regime.DEGENERATE_ALL_DEG2 and r2.v_frac is None and r2.note


def test_vk_truncation():
    gf = GeneratingFunctions.from_distribution(DegreeDistribution.power_law(2.5, 200))
    assert max(predict_supercritical(gf).vk_frac) == 64
    assert max(predict_supercritical(gf, full_vk=True).vk_frac) == 200


def test_near_critical_example():
    p = predict_near_critical(NEAR_BASE, 10**6, 0.02)
    assert abs(p.beta - 0.6) < 1e-12 and abs(p.coefficient - 6) < 1e-12
    assert abs(p.v_c1 - 120000) < 1e-6 and abs(p.e_c1 - 120000) < 1e-6
    for k, v in {1: 20000, 2: 80000, 3: 20000}.items():
        assert abs(p.vk_c1[k] - v) < 1e-6
    assert abs(p.tau_scaled - 2 / 0.6) < 1e-12
    assert abs(p.n_third_alpha - 100 * 0.02) < 1e-12


def test_near_critical_linear_in_alpha():
    a = predict_near_critical(NEAR_BASE, 10**6, 0.02).v_c1
    b = predict_near_critical(NEAR_BASE, 10**6, 0.01).v_c1
    assert abs(a - 2 * b) < 1e-6


def test_near_critical_errors():
    with pytest.raises(NotCritical):
        predict_near_critical(DegreeDistribution.poisson(2.0), 1000, 0.1)
    with pytest.raises((NotCritical, BetaZero)):
        predict_near_critical(DegreeDistribution.point_mass(2), 1000, 0.1)
    # a critical law with p1 > 0 always has beta > 0, so reach BetaZero via the threshold
    with pytest.raises(BetaZero):
        predict_near_critical(NEAR_BASE, 1000, 0.1, beta_tol=1.0)


def test_empirical_gf():
    gf = empirical_gf(from_counts({1: 500, 3: 500}))
    x = np.linspace(0, 1, 7)
    assert np.allclose(gf.g(x), (x + x**3) / 2, atol=1e-15)
    assert gf.g(1.0) == 1.0
    gf2 = empirical_gf(from_counts({2: 10}))
    assert np.all(gf2.H(x) == 0.0)
    for counts in ({1: 7, 2: 3, 5: 1}, {0: 4, 1: 2, 4: 6}):
        assert empirical_gf(from_counts(counts)).H(1.0) == 0.0


@pytest.mark.parametrize("alpha", [0.01, 0.02, 0.05])
@pytest.mark.parametrize("base", [NEAR_BASE, DegreeDistribution.finite({1: 0.4, 2: 0.55, 4: 0.05})])
def test_near_critical_taylor_bound(alpha, base):
    seq = near_critical_sequence(base, 10**6, alpha)
    gf = empirical_gf(seq)
    a, b = seq.alpha, seq.beta
    c = max(1.5, max(8 * seq.lam, float(np.dot(np.arange(seq.nk.size) ** 4, seq.nk)) / seq.n) / 6)
    t = np.linspace(0, 4 / b, 400)
    lhs = np.abs(gf.H(np.exp(-a * t)) - a * a * (t - 0.5 * b * t * t))
    assert np.all(lhs <= c * a**3 * (t**2 + t**3) + 1e-15)


def test_near_critical_from_sequence():
    seq = near_critical_sequence(NEAR_BASE, 10**6, 0.02)
    p = near_critical_from_sequence(seq)
    assert abs(p.beta - seq.beta) < 1e-15 and abs(p.coefficient - 2 * 1.8 / 0.66) < 1e-12
