import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcl.degree_model import (
    DegreeDistribution,
    DegreeSequence,
    check_conditions,
    from_counts,
    near_critical_sequence,
    read_degfile,
    sample_iid,
    write_degfile,
)
from gcl.errors import InsufficientDegreeTwoMass, NotCritical, OddDegreeSum

from conftest import NEAR_BASE

counts_st = st.dictionaries(st.integers(0, 9), st.integers(0, 50), min_size=1).filter(
    lambda d: sum(d.values()) > 0 and sum(k * v for k, v in d.items()) % 2 == 0
)


def test_two_degree_one_vertices():
    s = from_counts({1: 2})
    assert (s.n, s.m, s.lam, s.alpha) == (2, 1, 1.0, -1.0)


def test_half_one_half_three_moments():
    s = from_counts({1: 500, 3: 500})
    assert (s.n, s.m, s.lam, s.alpha, s.beta) == (1000, 1000, 2.0, 1.0, 3.0)


def test_odd_sum_rejected():
    with pytest.raises(OddDegreeSum):
        from_counts({1: 3})


@given(counts_st)
def test_moments_match_integer_formulas(counts):
    s = from_counts(counts)
    s1 = sum(k * v for k, v in counts.items())
    s2 = sum(k * k * v for k, v in counts.items())
    s3 = sum(k**3 * v for k, v in counts.items())
    n = sum(counts.values())
    assert s.n == n and 2 * s.m == s1
    assert s.alpha == (s2 - 2 * s1) / n
    assert s.beta == (s3 - 3 * s2 + 2 * s1) / n


@given(counts_st)
def test_degrees_round_trip(counts):
    s = from_counts(counts)
    assert DegreeSequence.from_degrees(s.degrees()) == s


def test_point_mass_sample(rng):
    assert sample_iid(DegreeDistribution.point_mass(2), 5, rng).counts == {2: 5}


def test_odd_fixup_bumps_one_vertex(rng):
    s = sample_iid(DegreeDistribution.point_mass(1), 3, rng)
    assert s.counts == {1: 2, 2: 1}


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 200), st.integers(0, 2**32))
def test_sample_iid_even_and_close(n, seed):
    dist = DegreeDistribution.poisson(1.7)
    raw = np.random.default_rng(seed).poisson(1.7, n).sum()
    s = sample_iid(dist, n, np.random.default_rng(seed))
    assert s.total_degree % 2 == 0
    assert s.total_degree - raw in (0, 1)


def test_poisson_sample_mean():
    s = sample_iid(DegreeDistribution.poisson(2.0), 10**6, np.random.default_rng(7))
    assert abs(s.lam - 2.0) < 0.01


def test_distribution_normalised_and_truncated():
    for lam in (0.5, 1.0, 2.0, 3.0, 5.0, 10.0):
        d = DegreeDistribution.poisson(lam)
        assert abs(d.pk.sum() + d.tail_mass - 1) < 1e-12
        assert d.tail_mass < 1e-12
        # the dropped tail carries k(k-2) weight, so allow it at large lambda
        assert abs(d.edd2 - (lam * lam - lam)) < (1e-9 if lam <= 5 else 1e-8)
    pl = DegreeDistribution.power_law(3.5, 1000)
    assert abs(pl.pk.sum() - 1) < 1e-12 and pl.p(0) == 0.0


def test_json_round_trip():
    for obj in ({"kind": "poisson", "lambda": 2.0}, {"kind": "finite", "pk": {"1": 0.5, "3": 0.5}},
                 {"kind": "power_law", "exponent": 3.5, "cutoff": 1000}):
        d = DegreeDistribution.from_json(obj)
        assert DegreeDistribution.from_json(d.to_json()).to_json() == d.to_json()


def test_invalid_distributions():
    with pytest.raises(ValueError):
        DegreeDistribution.finite({1: 0.5, 3: 0.4})
    with pytest.raises(ValueError):
        DegreeDistribution.finite({1: -0.5, 3: 1.5})
    with pytest.raises(ValueError):
        DegreeDistribution.from_json({"kind": "geometric"})


def test_condition_flags():
    assert "all_mass_on_0_and_2" in check_conditions(from_counts({2: 100})).degenerate_flags
    assert "p1_zero_supercritical" in check_conditions(from_counts({3: 100})).degenerate_flags
    r = check_conditions(from_counts({1: 50, 3: 50}))
    assert not r.degenerate_flags and r.has_degree_one and r.even_sum
    assert r.second_moment == 5.0
    assert math.isclose(r.fourth_moment_4plus_eta, (1 + 3**4.1) / 2)


def test_near_critical_example():
    s = near_critical_sequence(NEAR_BASE, 10**6, 0.02)
    assert 0.0199 <= s.alpha <= 0.0201
    assert s.lam == 1.8
    base_total = sum(round(10**6 * p) * k for k, p in NEAR_BASE.items())
    assert s.total_degree == base_total


def test_near_critical_zero_alpha():
    s = near_critical_sequence(NEAR_BASE, 10**5, 0.0)
    assert abs(s.alpha) <= 1e-4


def test_near_critical_errors():
    with pytest.raises(NotCritical):
        near_critical_sequence(DegreeDistribution.poisson(2.0), 1000, 0.02)
    with pytest.raises(InsufficientDegreeTwoMass):
        near_critical_sequence(NEAR_BASE, 1000, 0.9)


def test_degfile_round_trip(tmp_path):
    s = from_counts({0: 3, 1: 500, 3: 500})
    p = tmp_path / "seq.deg"
    write_degfile(s, p)
    assert read_degfile(p) == s
    p.write_text("# comment\n1\t4\n3\t2\n")
    assert read_degfile(p).counts == {1: 4, 3: 2}
    p.write_text("3\t2\n1\t4\n")
    with pytest.raises(ValueError):
        read_degfile(p)
