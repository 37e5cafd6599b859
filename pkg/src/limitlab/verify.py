"""Exhaustive-oracle check suites behind ``limitlab verify``.

A suite is a list of checks; each check returns a :class:`Check` with a
boolean verdict and a short detail string.  Informational rows (``gate=False``)
are reported but never fail the suite.
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import combinatorics as cb
from . import counters, distributions as dist, limitmetrics as lm, steinlab as sl


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    gate: bool = True
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.ok else ("FAIL" if self.gate else "INFO")
        return f"[{tag}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(name, fn, gate=True):
    t0 = time.perf_counter()
    ok, detail = fn()
    return Check(name, bool(ok), detail, gate, time.perf_counter() - t0)


# --------------------------------------------------------------------------
# identities


def complement_identity_exhaustive(n: int) -> tuple:
    """A(S) + A(S^c) against the closed form for every subset of Z/nZ."""
    from ._kernels import _combination_chunks

    bad = 0
    for k in range(n + 1):
        target = cb.complement_identity(n, k)
        for x in _combination_chunks(n, k):
            a = counters.count_aps_batch(x) + counters.count_aps_batch(1 - x)
            bad += int(np.count_nonzero(a != target))
    return bad == 0, f"n={n}: {2**n} subsets, {bad} mismatches"


def identities_suite() -> list:
    checks = []
    for n in (5, 7, 9, 11, 13):
        checks.append(_timed(f"complement identity n={n}", lambda n=n: complement_identity_exhaustive(n)))
    for n in (7, 11, 13):
        def table(n=n):
            brute = counters.intersection_table_bruteforce(n)
            closed = cb.intersection_table(n)
            return brute == closed, f"closed {closed.counts} brute {brute.counts}"
        checks.append(_timed(f"intersection table n={n}", table))

        def ie(n=n):
            per = cb.intersection_table(n).per_progression()
            got = cb.overlap_counts_inclusion_exclusion(n)
            return tuple(per) == got, f"inclusion-exclusion {got}"
        checks.append(_timed(f"overlap inclusion-exclusion n={n}", ie))
    return checks


# --------------------------------------------------------------------------
# moments


def eulerian_moments(n_max: int = 200) -> tuple:
    bad = [
        n for n in range(2, n_max + 1)
        if (lambda p, m: (p.mean(), p.variance()) != (m.mean, m.variance))(
            dist.eulerian_pmf(n), cb.descent_moments(n))
    ]
    return not bad, f"2 <= n <= {n_max}, mismatches at {bad}"


def parseval_exhaustive(n: int, p) -> tuple:
    pmf = dist.exhaustive_ap_pmf(n, p)
    mom = cb.ap_moments_unconditional(n, p)
    ok = pmf.mean() == mom.mean and pmf.variance() == mom.variance
    return ok, f"n={n} p={p}: exhaustive var {pmf.variance()} closed {mom.variance}"


def conditional_exhaustive(n: int) -> tuple:
    bad = []
    for k in range(n + 1):
        pmf = dist.exhaustive_conditional_pmf(n, k, allow_composite=True)
        if pmf.mean() != cb.conditional_mean(n, k) or pmf.variance() != cb.conditional_variance(n, k):
            bad.append(k)
    return not bad, f"n={n}, all k: mismatches at {bad}"


def moments_suite(max_parseval_n: int = 19) -> list:
    checks = [_timed("eulerian mean and variance", eulerian_moments)]
    for n in (5, 7, 11, 13, 17, 19):
        if n > max_parseval_n:
            continue
        checks.append(_timed(f"parseval variance n={n} p=1/2", lambda n=n: parseval_exhaustive(n, Fraction(1, 2))))
        if n <= 13:
            checks.append(_timed(f"parseval variance n={n} p=1/4", lambda n=n: parseval_exhaustive(n, Fraction(1, 4))))
    for n in (7, 11, 13):
        checks.append(_timed(f"conditional moments n={n}", lambda n=n: conditional_exhaustive(n)))

    def sigma53():
        pmf = dist.exhaustive_conditional_pmf(5, 3)
        return pmf.variance() == 0 == cb.conditional_variance(5, 3), f"enumerated {pmf.variance()}"
    checks.append(_timed("conditional variance n=5 k=3 vanishes", sigma53))

    def continuous():
        rep = cb.ap_moments_continuous(7).discrepancy()
        return True, (f"n=7 stated {rep['stated_variance']} oracle {rep['oracle_variance']} "
                      f"ratio {rep['oracle_over_stated']}")
    checks.append(_timed("continuous variance discrepancy", continuous, gate=False))
    return checks


# --------------------------------------------------------------------------
# stein


def exchangeable_all_k(n: int, which: str = "exact", swap: str = "member_nonmember") -> tuple:
    worst = Fraction(0)
    for k in range(n + 1):
        r = sl.exchangeable_verify(n, k, swap=swap)
        worst = max(worst, r.max_residual_exact if which == "exact" else r.max_residual_stated)
    return worst == 0, f"n={n}, all k, {swap}: max residual {worst}"


def stein_suite() -> list:
    checks = []
    for n in (5, 7, 11, 13):
        checks.append(_timed(f"exchangeable identity, exact lambda, n={n}",
                             lambda n=n: exchangeable_all_k(n, "exact")))
        checks.append(_timed(f"exchangeable identity, exact lambda, all pairs, n={n}",
                             lambda n=n: exchangeable_all_k(n, "exact", "all_pairs")))
        checks.append(_timed(f"exchangeable identity, stated lambda, n={n}",
                             lambda n=n: exchangeable_all_k(n, "stated"), gate=False))
    for n in (7, 11, 13, 31, 101):
        def graph(n=n):
            g = sl.dependency_graph(n)
            return g.max_degree <= g.degree_bound, f"max degree {g.max_degree} bound {g.degree_bound}"
        checks.append(_timed(f"dependency graph n={n}", graph))

    def tighter():
        ns = [n for n in range(11, 102, 2) if cb.is_prime(n)]
        ok = all(sl.chatterjee_bound(n).wasserstein < sl.chatterjee_bound(n, relaxed=True).wasserstein for n in ns)
        return ok, f"exact moments tighter than relaxed for {len(ns)} primes"
    checks.append(_timed("chatterjee exact vs relaxed", tighter))

    def gap():
        worst = 0.0
        for k in range(3, 16):
            r = sl.gap_diagnostic(19, sl.midpoint(19, k))
            if not (r.chebyshev <= 1 and r.chebyshev >= r.exact_probability):
                return False, f"midpoint k={k}: bound {r.chebyshev} exact {float(r.exact_probability)}"
            worst = max(worst, float(r.exact_probability) / r.chebyshev)
        return True, f"n=19 midpoints: max exact/bound {worst:.3f}"
    checks.append(_timed("gap diagnostic upper-bounds exact mass", gap))
    return checks


# --------------------------------------------------------------------------
# metrics


def fourier_round_trip(n: int = 20, tol: float = 1e-8) -> tuple:
    pmf = dist.eulerian_pmf(n)
    mu, sd = float(pmf.mean()), math.sqrt(pmf.variance())
    grid, step = lm.inversion_grid(sd, 1.0)
    prof = lm.char_fn(pmf, grid, standardize=True)
    got = lm.fourier_invert(prof, (mu, sd), (pmf.support - mu) / sd)
    err = float(np.max(np.abs(got - pmf.as_float())))
    return err < tol, f"n={n}: max error {err:.2e} with step {step:.3e} ({grid.size} nodes)"


def standardized_pairs():
    """(label, standardised law) pairs the Wasserstein/Kolmogorov check runs on."""
    for n in (10, 20, 50, 100):
        m = cb.descent_moments(n)
        yield f"descents n={n}", lm.standardize(dist.eulerian_pmf(n), float(m.mean), math.sqrt(m.variance))
    for n in (7, 11, 13, 17, 19):
        m = cb.ap_moments_unconditional(n)
        yield f"aps n={n}", lm.standardize(dist.exhaustive_ap_pmf(n), float(m.mean), math.sqrt(m.variance))
    for k in (4, 6, 8):
        m = cb.ap_moments_conditional(13, k)
        yield f"aps n=13 k={k}", lm.standardize(dist.exhaustive_conditional_pmf(13, k), float(m.mean), math.sqrt(m.variance))


def kolmogorov_wasserstein(pairs=None) -> tuple:
    gauss = dist.GaussianRef(0.0, 1.0)
    worst, label = 0.0, ""
    for name, z in pairs or standardized_pairs():
        k = lm.kolmogorov(z, gauss)
        w = lm.wasserstein_integer(z, gauss)
        ratio = k / math.sqrt(2 / math.pi * w)
        if ratio > worst:
            worst, label = ratio, name
        if ratio > 1:
            return False, f"{name}: Kolm {k:.4g} > sqrt(2W/pi) {math.sqrt(2 / math.pi * w):.4g}"
    return True, f"max Kolm / sqrt(2W/pi) = {worst:.3f} ({label})"


def metrics_suite() -> list:
    checks = [_timed("fourier round trip eulerian n=20", fourier_round_trip)]
    checks.append(_timed("Kolm <= sqrt(2 Wass / pi)", kolmogorov_wasserstein))

    def cdp():
        got = lm.conditional_descent_probabilities(4, 2)
        want = [Fraction(1, 6), Fraction(1, 2), Fraction(1, 2), Fraction(5, 6)]
        return list(got.values()) == want, f"{[str(v) for v in got.values()]}"
    checks.append(_timed("conditional descent probabilities S_4", cdp))

    def bern():
        theta = np.linspace(-math.pi, math.pi, 4001)[1:-1]
        ok = True
        for p in (1 / 6, 1 / 2, 5 / 6):
            lhs, rhs = lm.bernoulli_cf_bound(p, theta)
            ok &= bool(np.all(lhs <= rhs + 1e-15))
        return ok, "p in {1/6, 1/2, 5/6}, 3999 angles"
    checks.append(_timed("bernoulli characteristic-function bound", bern))

    def envelope():
        c11 = lm.small_t_envelope(11).constant
        c19 = lm.small_t_envelope(19).constant
        return c19 <= 1.5 * c11, f"C(11)={c11:.4f} C(19)={c19:.4f}"
    checks.append(_timed("small-t envelope constant", envelope))
    return checks


SUITES = {
    "identities": identities_suite,
    "moments": moments_suite,
    "stein": stein_suite,
    "metrics": metrics_suite,
}


def run_suite(name: str) -> list:
    if name == "all":
        return [c for key in SUITES for c in SUITES[key]()]
    return SUITES[name]()
