"""The fourteen acceptance criteria, each at its stated tolerance and time budget.

Every test records one PASS/FAIL line; the lines are repeated in the terminal
summary so they show up without ``-s``.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from limitlab import combinatorics as cb
from limitlab import counters, distributions as dist, limitmetrics as lm, steinlab as sl, verify
from limitlab.rng import RngStream

from ._acceptance_log import record

STD = dist.GaussianRef(0.0, 1.0)


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def check(number, title, ok, detail, clock, budget):
    in_time = clock.seconds < budget
    if not in_time:
        detail += f"; over the {budget:g}s budget"
    record(number, ok and in_time, title, detail, clock.seconds)
    assert ok, detail
    assert in_time, detail


def primes_between(lo, hi):
    return [n for n in range(lo, hi + 1) if cb.is_prime(n)]


def test_c01_eulerian_moments():
    with Clock() as c:
        ok, detail = verify.eulerian_moments(200)
    check(1, "exact Eulerian moments", ok, detail, c, 30)


def test_c02_conditional_descent_lemma():
    want = [Fraction(1, 6), Fraction(1, 2), Fraction(1, 2), Fraction(5, 6)]
    with Clock() as c:
        got = list(lm.conditional_descent_probabilities(4, 2).values())
    check(2, "conditional descent lemma on S_4", got == want, f"got {[str(g) for g in got]}", c, 1)


def test_c03_parseval_variance():
    cases = [(n, Fraction(1, 2)) for n in (5, 7, 11, 13, 17, 19)]
    cases += [(n, Fraction(1, 4)) for n in (5, 7, 11, 13)]
    with Clock() as c:
        bad = [(n, str(p)) for n, p in cases if not verify.parseval_exhaustive(n, p)[0]]
    check(3, "Parseval variance", not bad, f"{len(cases)} (n, p) cases, mismatches {bad}", c, 300)


def test_c04_conditional_moments():
    with Clock() as c:
        results = [verify.conditional_exhaustive(n) for n in (7, 11, 13)]
        var53 = dist.exhaustive_conditional_pmf(5, 3).variance()
    ok = all(r[0] for r in results) and var53 == 0 == cb.conditional_variance(5, 3)
    detail = "; ".join(r[1] for r in results) + f"; enumerated sigma_(5,3)^2 = {var53}"
    check(4, "conditional moments", ok, detail, c, 120)


def test_c05_complement_identity():
    with Clock() as c:
        results = [verify.complement_identity_exhaustive(n) for n in (5, 7, 9, 11, 13)]
    check(5, "complement identity", all(r[0] for r in results), "; ".join(r[1] for r in results), c, 120)


def test_c06_intersection_table():
    with Clock() as c:
        rows = []
        for n in (7, 11, 13):
            closed = cb.intersection_table(n)
            brute = counters.intersection_table_bruteforce(n)
            rows.append((n, closed.counts == brute.counts and sum(closed.counts) == math.comb(n, 2) ** 2))
    check(6, "intersection table", all(ok for _, ok in rows), f"per n: {rows}", c, 10)


def test_c07_exchangeable_pair():
    """The identity as stated: lambda = 3(n-k)/C(n,2)."""
    with Clock() as c:
        worst_stated, worst_exact, where = Fraction(0), Fraction(0), None
        for n in (5, 7, 11, 13):
            for k in range(n + 1):
                r = sl.exchangeable_verify(n, k)
                if r.max_residual_stated > worst_stated:
                    worst_stated, where = r.max_residual_stated, (n, k)
                worst_exact = max(worst_exact, r.max_residual_exact)
    detail = (f"max residual {worst_stated} at (n, k) = {where} with the stated lambda; "
              f"{worst_exact} with lambda = 3(n-2)/(k(n-k))")
    check(7, "exchangeable-pair identity", worst_stated == 0, detail, c, 300)


def test_c08_stein_bounds():
    with Clock() as c:
        ineq_ok, ineq_detail = verify.kolmogorov_wasserstein()
        scan = lm.scaling_scan("chatterjee_kolmogorov", primes_between(11, 101))
    slope_ok = abs(scan.slope + 0.25) <= 0.10
    detail = f"{ineq_detail}; Chatterjee slope {scan.slope:.3f} +- {scan.slope_stderr:.3f}"
    check(8, "Stein bounds", ineq_ok and slope_ok, detail, c, 60)


def test_c09_descents_llt_scaling():
    ns = [50, 100, 200, 400]
    with Clock() as c:
        scaled = lm.scaling_scan("descents_llt", ns)
        raw = lm.scaling_scan("descents_llt_raw", ns)
    ok = (scaled.slope <= -0.4 and raw.slope <= -0.9
          and scaled.slope_stderr <= 0.1 and raw.slope_stderr <= 0.1)
    detail = (f"scaled slope {scaled.slope:.3f} (se {scaled.slope_stderr:.3f}), "
              f"raw slope {raw.slope:.3f} (se {raw.slope_stderr:.3f})")
    check(9, "descents LLT scaling", ok, detail, c, 120)


def test_c10_aps_not_llt():
    with Clock() as c:
        vals = lm.scaling_scan("aps_llt_scaled", [11, 13, 17, 19]).metric_values
        n = 101
        x = dist.mc_sample(dist.Statistic.aps(n, 0.5), 100_000, RngStream(7))
        peak = np.bincount(x).max() / x.size
        sd = math.sqrt(cb.ap_moments_unconditional(n).variance)
    threshold = 1.5 / math.sqrt(2 * math.pi)
    flat = min(vals) >= 0.5 * max(vals)
    tall = sd * peak > threshold
    detail = (f"sigma*llt {[round(v, 3) for v in vals]}; "
              f"n=101 sigma*max P = {sd * peak:.3f} vs {threshold:.3f}")
    check(10, "no local limit for AP counts", flat and tall, detail, c, 60)


def test_c11_conditional_gaussian():
    n, m = 53, 10_000
    floor = lm.kolmogorov_noise_floor(m)
    with Clock() as c:
        worst, at = 0.0, None
        for k in range(20, 34):
            mom = cb.ap_moments_conditional(n, k)
            x = dist.mc_sample(dist.Statistic.aps_fixed_k(n, k), m, RngStream(7, k))
            z = lm.standardize(lm.AtomDist.from_samples(x), float(mom.mean), math.sqrt(mom.variance))
            d = lm.kolmogorov(z, STD)
            if d > worst:
                worst, at = d, k
    detail = f"worst Kolmogorov {worst:.4f} at k={at} vs {0.05 + floor:.4f}"
    check(11, "conditional near-Gaussianity", worst < 0.05 + floor, detail, c, 60)


def test_c12_continuous_variant():
    n, m = 23, 100_000
    floor = lm.kolmogorov_noise_floor(m)
    with Clock() as c:
        mom = cb.ap_moments_continuous(n)
        rep = mom.discrepancy()
        x = dist.mc_sample(dist.Statistic.aps_continuous_binned(n), m, RngStream(7))
        z = lm.standardize(lm.AtomDist.from_samples(x), float(mom.mean), math.sqrt(mom.oracle_variance))
        d = lm.kolmogorov(z, STD)
    report = ", ".join(f"{key} {v}" for key, v in rep.items() if isinstance(v, Fraction))
    print(f"continuous variance report n={n}: {report}; sample variance {x.var():.2f}")
    assert isinstance(mom.stated_variance, Fraction) and isinstance(mom.oracle_variance, Fraction)
    detail = f"Kolmogorov {d:.4f} vs {0.05 + floor:.4f} (oracle variance)"
    check(12, "continuous variant", d < 0.05 + floor, detail, c, 60)


def test_c13_fourier_round_trip():
    with Clock() as c:
        ok, detail = verify.fourier_round_trip(20, 1e-8)
    check(13, "Fourier round trip", ok, detail, c, 5)


def test_c14_small_t_envelope():
    with Clock() as c:
        reps = [lm.small_t_envelope(n) for n in (11, 19)]
    cs = [r.constant for r in reps]
    ok = all(np.isfinite(cs)) and all(v > 0 for v in cs) and max(cs) <= 2 * min(cs)
    ok &= all(r.t[-1] <= math.sqrt(r.n) / 4 + 1e-12 and r.t[0] > 0 for r in reps)
    check(14, "small-t envelope", ok, f"C(11) {cs[0]:.4f}, C(19) {cs[1]:.4f}", c, 60)
