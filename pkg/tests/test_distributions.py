from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from limitlab import distributions as dist
from limitlab.combinatorics import ap_total, binomial_weights
from limitlab.errors import DomainError, PrimalityError, ResourceError
from limitlab.rng import RngStream

from .oracles import ap_pmf, conditional_pmf, descent_pmf


def test_eulerian_small_rows():
    assert dist.eulerian_row(4) == (1, 11, 11, 1)
    assert dist.eulerian_pmf(4).probabilities == tuple(Fraction(c, 24) for c in (1, 11, 11, 1))
    assert dist.eulerian_pmf(1).probabilities == (Fraction(1),)


@pytest.mark.parametrize("n", range(1, 8))
def test_eulerian_matches_permutation_enumeration(n):
    assert list(dist.eulerian_pmf(n).probabilities) == descent_pmf(n)


@given(st.integers(2, 150))
def test_eulerian_moments_and_symmetry(n):
    pmf = dist.eulerian_pmf(n)
    assert pmf.mean() == Fraction(n - 1, 2)
    assert pmf.variance() == Fraction(n + 1, 12)
    assert pmf.probabilities == pmf.probabilities[::-1]


def test_eulerian_limits():
    with pytest.raises(DomainError):
        dist.eulerian_pmf(0)
    with pytest.raises(ResourceError):
        dist.eulerian_pmf(1001)


@pytest.mark.parametrize("n", [5, 7])
def test_exhaustive_ap_pmf_matches_bruteforce(n):
    for p in (Fraction(1, 2), Fraction(1, 3)):
        want = ap_pmf(n, p)
        pmf = dist.exhaustive_ap_pmf(n, p)
        assert {a: pmf.prob(a) for a in want} == want
        assert pmf.total_mass == 1


def test_exhaustive_ap_pmf_frozen_moments():
    pmf = dist.exhaustive_ap_pmf(5, Fraction(1, 2))
    assert (pmf.mean(), pmf.variance()) == (Fraction(5, 4), Fraction(35, 8))


def test_joint_histogram_marginals(each_backend):
    dist._joint_hist.cache_clear()
    n = 11
    h = dist.joint_size_ap_histogram(n)
    assert h.shape == (n + 1, ap_total(n) + 1)
    assert h.sum(axis=1).tolist() == [comb(n, k) for k in range(n + 1)]
    dist._joint_hist.cache_clear()


def test_joint_histogram_guards():
    with pytest.raises(PrimalityError):
        dist.joint_size_ap_histogram(9)
    with pytest.raises(ResourceError):
        dist.joint_size_ap_histogram(29)
    with pytest.raises(DomainError):
        dist.joint_size_ap_histogram(10)


@pytest.mark.parametrize("n,k", [(7, 3), (7, 4), (11, 5)])
def test_conditional_pmf_matches_bruteforce(n, k, each_backend):
    want = conditional_pmf(n, k)
    pmf = dist.exhaustive_conditional_pmf(n, k)
    assert {a: pmf.prob(a) for a in want} == want


def test_conditional_mixture_recovers_unconditional():
    n = 11
    w = binomial_weights(n)
    mix = [sum(w[k] * dist.exhaustive_conditional_pmf(n, k).prob(a) for k in range(n + 1))
           for a in range(ap_total(n) + 1)]
    assert tuple(mix) == dist.exhaustive_ap_pmf(n).probabilities


def test_conditional_resource_guard():
    with pytest.raises(ResourceError):
        dist.conditional_ap_histogram(101, 50)


def test_integer_pmf_validation_and_helpers():
    with pytest.raises(ValueError):
        dist.IntegerPmf(0, (Fraction(1, 2),))
    pmf = dist.IntegerPmf(3, (0, Fraction(1, 4), Fraction(3, 4), 0))
    t = pmf.trimmed()
    assert (t.support_min, t.support_max) == (4, 5)
    assert pmf.prob(100) == 0
    f = pmf.to_float()
    assert not f.exact and f.mean() == pytest.approx(float(pmf.mean()))


def test_mc_histogram_reproducible_and_backend_free():
    st_ = dist.Statistic.aps(13, 0.5)
    h1 = dist.mc_histogram(st_, 3000, RngStream(42))
    h2 = dist.mc_histogram(st_, 3000, RngStream(42))
    assert np.array_equal(h1.counts, h2.counts) and h1.provenance == h2.provenance
    from limitlab import backend

    with backend("numpy"):
        h3 = dist.mc_histogram(st_, 3000, RngStream(42))
    assert np.array_equal(h1.counts, h3.counts)
    assert h1.provenance["config_hash"] == h3.provenance["config_hash"]


def test_mc_chunks_are_seekable():
    st_ = dist.Statistic.descents(30)
    r = RngStream(1)
    whole = dist.mc_sample(st_, 1000, RngStream(1))
    first = dist.mc_sample(st_, 400, r)
    second = dist.mc_sample(st_, 600, r)
    assert np.array_equal(whole, np.concatenate([first, second]))
    hb = dist.mc_histogram(st_, 600, RngStream(1, 0, 400))
    assert hb.provenance["first_block"] == 400


def test_mc_matches_exact_moments():
    h = dist.mc_histogram(dist.Statistic.aps_fixed_k(13, 6), 20000, RngStream(5))
    pmf = dist.exhaustive_conditional_pmf(13, 6)
    assert h.mean() == pytest.approx(float(pmf.mean()), abs=4 * (float(pmf.variance()) / 20000) ** 0.5)


def test_continuous_binning():
    st_ = dist.Statistic.aps_continuous_binned(11, bin_width=0.5)
    h = dist.mc_histogram(st_, 2000, RngStream(3))
    assert h.binned and h.bin_width == 0.5
    vals = dist.mc_sample(st_, 2000, RngStream(3))
    assert h.support_min == int(np.floor(vals.min() / 0.5))
    with pytest.raises(DomainError):
        dist.Statistic.aps_continuous_binned(11, bin_width=0)


def test_empirical_merge_and_noise_floor():
    a = dist.mc_histogram(dist.Statistic.descents(10), 100, RngStream(1))
    b = dist.mc_histogram(dist.Statistic.descents(10), 300, RngStream(2))
    m = a.merge(b)
    assert m.sample_size == 400 and m.counts.sum() == 400
    assert m.noise_floor() == pytest.approx(0.05)


def test_statistic_validation():
    with pytest.raises(DomainError):
        dist.Statistic.aps(10)
    with pytest.raises(DomainError):
        dist.Statistic.aps(11, 1.5)
    with pytest.raises(DomainError):
        dist.Statistic.aps_fixed_k(11, 12)
    with pytest.raises(DomainError):
        dist.mc_sample(dist.Statistic.descents(5), 0, RngStream(0))


def test_gaussian_reference():
    g = dist.GaussianRef(0.0, 2.0)
    assert dist.gaussian_height(g, 0.0) == pytest.approx(1 / (2 * (2 * np.pi) ** 0.5))
    with pytest.raises(DomainError):
        dist.GaussianRef(0.0, 0.0)
    pmf = dist.eulerian_pmf(10)
    m = dist.GaussianRef.matching(pmf)
    assert m.mean == 4.5 and m.sd == pytest.approx((11 / 12) ** 0.5)
