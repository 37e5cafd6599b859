import math
import warnings
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from limitlab import steinlab as sl
from limitlab.combinatorics import conditional_mean, conditional_variance
from limitlab.errors import DomainError, PrimalityError, ResourceError
from limitlab.rng import RngStream

from .oracles import all_progressions, aps_bruteforce, conditional_pmf


def brute_max_degree(n):
    progs = list(all_progressions(n))
    return max(sum(1 for q in progs if q is not p and p & q) for p in progs)


def brute_drift(n, members, swap):
    """E[A(S') - A(S) | S] by listing every swap."""
    s = set(members)
    a = aps_bruteforce(n, s)
    if swap == "member_nonmember":
        moves = [(i, j) for i in s for j in range(n) if j not in s]
    else:
        moves = list(combinations(range(n), 2))
    total = 0
    for i, j in moves:
        t = set(s)
        if (i in s) != (j in s):
            t ^= {i, j}
        total += aps_bruteforce(n, t) - a
    return Fraction(total, len(moves))


# -- dependency graph ----------------------------------------------------


@pytest.mark.parametrize("n", [7, 11, 13])
def test_dependency_graph_matches_bruteforce(n):
    g = sl.dependency_graph(n)
    assert g.vertex_count == math.comb(n, 2)
    assert g.max_degree == brute_max_degree(n)
    assert g.max_degree <= g.degree_bound


def test_dependency_graph_n7_frozen():
    g = sl.dependency_graph(7)
    assert (g.vertex_count, g.max_degree, g.degree_bound) == (21, 18, 27)
    assert g.D == 19


def test_dependency_graph_limits():
    assert sl.dependency_graph(101).max_degree == 441
    with pytest.raises(ResourceError) as exc:
        sl.dependency_graph(211)
    assert exc.value.bound == sl.degree_bound(211)
    with pytest.raises(DomainError):
        sl.dependency_graph(5)
    with pytest.raises(PrimalityError):
        sl.dependency_graph(15)


# -- Chatterjee bound ----------------------------------------------------


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100)))
def test_centered_moments(p):
    # the indicator of a progression is Bernoulli(p^3)
    r = p**3
    for m in (3, 4):
        assert sl.centered_indicator_moment(p, m) == r * (1 - r) ** m + (1 - r) * r**m
    assert sl.centered_indicator_moment(p, 4) <= 1


def test_centered_moments_fair_coin():
    assert sl.centered_indicator_moment(Fraction(1, 2), 3) == Fraction(175, 2048)
    assert sl.centered_indicator_moment(Fraction(1, 2), 4) == Fraction(301, 4096)


@pytest.mark.parametrize("n", [11, 13, 31, 101])
def test_chatterjee_exact_tighter_than_relaxed(n):
    exact = sl.chatterjee_bound(n)
    relaxed = sl.chatterjee_bound(n, relaxed=True)
    assert exact.wasserstein < relaxed.wasserstein
    assert exact.kolmogorov == pytest.approx(math.sqrt(2 / math.pi * exact.wasserstein))


def test_chatterjee_degree_options():
    b = sl.chatterjee_bound(31)
    e = sl.chatterjee_bound(31, degree="exact")
    assert b.D == 136 and e.D == 127
    assert e.wasserstein < b.wasserstein
    with pytest.raises(DomainError):
        sl.chatterjee_bound(31, degree="loose")
    assert set(b.as_dict()) >= {"n", "D", "wasserstein", "kolmogorov"}


def test_chatterjee_bound_decays():
    ks = [sl.chatterjee_bound(n).kolmogorov for n in (101, 211, 401)]
    assert ks[0] > ks[1] > ks[2]


# -- exchangeable pair ---------------------------------------------------


@pytest.mark.parametrize("swap", ["member_nonmember", "all_pairs"])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_swap_drift_matches_bruteforce(k, swap):
    n = 7
    mu = conditional_mean(n, k)
    lam = sl.lambda_exact(n, k, swap)
    for s in combinations(range(n), k):
        a = aps_bruteforce(n, s)
        assert brute_drift(n, s, swap) == -lam * (a - mu)


def test_lambda_values():
    assert sl.lambda_exact(5, 3) == Fraction(3, 2)
    assert sl.lambda_exact(7, 4, "all_pairs") == Fraction(15, 21)
    assert sl.lambda_stated(7, 4) == Fraction(9, 21)
    assert sl.lambda_exact(7, 0) == 0
    with pytest.raises(DomainError):
        sl.lambda_exact(7, 3, "triples")


def test_exchangeable_n5_vanishing_variance():
    r = sl.exchangeable_verify(5, 3)
    assert conditional_variance(5, 3) == 0
    assert r.max_residual_exact == 0 and r.max_residual_stated == 0


@pytest.mark.parametrize("n", [7, 11, 13])
def test_exchangeable_exact_lambda_all_k(n):
    for k in range(n + 1):
        r = sl.exchangeable_verify(n, k)
        assert r.identity_holds
        if r.lambda_fitted is not None:
            assert r.lambda_fitted == r.lambda_exact


def test_stated_lambda_residuals_frozen():
    worst = {n: max(sl.exchangeable_verify(n, k).max_residual_stated for k in range(n + 1))
             for n in (7, 11, 13)}
    assert worst == {7: Fraction(69, 140), 11: Fraction(23, 22), 13: Fraction(6251, 5720)}
    assert sl.exchangeable_verify(11, 5).max_residual_stated == Fraction(21, 22)
    r = sl.exchangeable_verify(7, 4, swap="all_pairs")
    assert r.max_residual_stated == Fraction(6, 35)
    assert r.max_residual_exact == 0


def test_exchangeable_sampled_mode():
    r = sl.exchangeable_verify(31, 15, samples=300, rng=RngStream(3))
    assert r.mode == "sampled" and r.subsets == 300
    assert r.identity_holds
    with pytest.raises(ResourceError):
        sl.exchangeable_verify(17, 8)
    with pytest.raises(DomainError):
        sl.exchangeable_verify(7, 9)


def test_exchangeable_backends_agree(each_backend):
    r = sl.exchangeable_verify(11, 4)
    assert r.max_residual_exact == 0 and r.subsets == math.comb(11, 4)


# -- spacing -------------------------------------------------------------


@pytest.mark.parametrize("n", [7, 11, 13])
def test_mean_gap_against_enumeration(n):
    means = [sum(a * p for a, p in conditional_pmf(n, k).items()) for k in range(n + 1)]
    for k in range(n):
        assert sl.mean_gap(n, k) == means[k + 1] - means[k]


def test_spacing_profile_n101():
    prof = sl.spacing_profile(101)
    assert prof.k_values[0] == 3 and prof.k_values[-1] == 98
    assert prof.coefficient_of_variation() < 0.5
    assert prof.ratios[prof.k_values.index(50)] > 1
    with pytest.raises(DomainError):
        sl.spacing_profile(101, range(2, 10))


# -- gap diagnostic and peak height -------------------------------------


def test_midpoint():
    assert sl.midpoint(19, 9) == round((conditional_mean(19, 9) + conditional_mean(19, 10)) / 2)


@pytest.mark.parametrize("k", range(3, 16))
def test_gap_bounds_exact_at_midpoints(k):
    r = sl.gap_diagnostic(19, sl.midpoint(19, k))
    assert 0 <= r.exact_probability <= r.chebyshev <= 1


def test_gap_far_tail_is_small():
    r = sl.gap_diagnostic(19, 400)
    assert r.chebyshev < 1e-3 and r.gaussian_tail < 1e-3
    assert r.exact_probability == 0


def test_gap_monotone_beyond_cluster():
    vals = [sl.gap_diagnostic(19, x, exact=False).chebyshev for x in range(172, 401, 12)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_gap_gaussian_height():
    r = sl.gap_diagnostic(11, 20, exact=False)
    assert r.exact_probability is None
    assert r.gaussian_density <= r.gaussian_height


def test_peak_constants():
    assert sl.PEAK_CONSTANT == pytest.approx(3.6013, abs=1e-4)
    assert sl.GAUSS_CEILING == pytest.approx(0.26596, abs=1e-5)


def test_peak_exact_n19():
    r = sl.peak_height_check(19)
    assert (r.k, r.x, r.mode) == (10, 21, "exact")
    assert r.scaled == pytest.approx(2.70, abs=0.01)
    assert r.closer_to_peak


def test_peak_monte_carlo_interval():
    exact = sl.peak_height_check(19)
    m = 50000
    r = sl.peak_height_check(19, samples=m, rng=RngStream(5))
    assert r.ci[0] <= r.scaled <= r.ci[1]
    se = math.sqrt(exact.probability * (1 - exact.probability) / m) * 19**1.5
    assert abs(r.scaled - exact.scaled) < 4 * se
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        sl.peak_height_check(19, samples=500, rng=RngStream(5))
    assert any(issubclass(x.category, ResourceWarning) for x in w)
