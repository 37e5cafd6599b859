"""Stein-method checks for AP counts: dependency graph, Chatterjee's bound,
the exchangeable-pair drift identity, and the mixture diagnostics that argue
against a local limit theorem.
"""

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from . import _kernels as K
from ._accel import use_numba
from .combinatorics import (
    _as_fraction,
    _check_prime,
    ap_moments_unconditional,
    ap_total,
    binomial_weights,
    conditional_mean,
    conditional_variance,
)
from .distributions import joint_size_ap_histogram
from .errors import DomainError, ResourceError
from .rng import RngStream
from .samplers import subset_fixed_k_batch

PEAK_CONSTANT = 8 * math.sqrt(2) / math.pi
GAUSS_CEILING = math.sqrt(2 / math.pi) / 3

MAX_GRAPH_N = 200
MAX_EXACT_SWAP_N = 13


def _require_odd_prime(n: int, allow_composite: bool = False) -> bool:
    if n < 3 or n % 2 == 0:
        raise DomainError(f"need an odd n >= 3, got {n}")
    return _check_prime(n, allow_composite)


# --------------------------------------------------------------------------
# dependency graph


@dataclass(frozen=True)
class DependencyGraphSummary:
    n: int
    vertex_count: int
    max_degree: int
    degree_bound: Fraction

    def __post_init__(self):
        if self.vertex_count != ap_total(self.n):
            raise ValueError("vertex count must equal C(n, 2)")
        if self.max_degree > self.degree_bound:
            raise ValueError("max degree exceeds the (9/2)(n-1) bound")

    @property
    def D(self) -> int:
        return self.max_degree + 1


def degree_bound(n: int) -> Fraction:
    return Fraction(9 * (n - 1), 2)


def dependency_graph(n: int, allow_composite: bool = False) -> DependencyGraphSummary:
    """Exact max degree of the graph joining progressions that share an element."""
    _require_odd_prime(n, allow_composite)
    if n < 7 and not allow_composite:
        raise DomainError("dependency graph needs n >= 7")
    if n > MAX_GRAPH_N:
        err = ResourceError(f"n={n} too large for the pairwise check; bound is {degree_bound(n)}")
        err.bound = degree_bound(n)
        raise err
    degs = K.max_degree_nb(n) if use_numba() else K.max_degree_np(n)
    return DependencyGraphSummary(n, ap_total(n), int(degs.max()), degree_bound(n))


# --------------------------------------------------------------------------
# Chatterjee's Wasserstein bound


@dataclass(frozen=True)
class ChatterjeeBound:
    n: int
    p: Fraction
    variance: Fraction
    D: int
    vertex_count: int
    m3: Fraction
    m4: Fraction
    fourth_term: float
    third_term: float
    exact_degree: bool = True

    @property
    def wasserstein(self) -> float:
        return self.fourth_term + self.third_term

    @property
    def kolmogorov(self) -> float:
        return math.sqrt(2 / math.pi * self.wasserstein)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "variance": self.variance,
            "D": self.D,
            "exact_degree": self.exact_degree,
            "vertex_count": self.vertex_count,
            "m3": self.m3,
            "m4": self.m4,
            "fourth_moment_term": self.fourth_term,
            "third_moment_term": self.third_term,
            "wasserstein": self.wasserstein,
            "kolmogorov": self.kolmogorov,
        }


def centered_indicator_moment(p, m: int) -> Fraction:
    """E|1_L - p^3|^m for a progression L; the indicator is Bernoulli(p^3)."""
    q = _as_fraction(p) ** 3
    return q * (1 - q) ** m + (1 - q) * q**m


def chatterjee_bound(n: int, p=Fraction(1, 2), relaxed: bool = False, degree: str = "bound",
                     allow_composite: bool = False) -> ChatterjeeBound:
    """Wasserstein bound for the standardised AP count, plus its Kolmogorov conversion.

    ``degree="bound"`` uses D = (9/2)(n-1) + 1 from the degree lemma, the value
    the O(n^{-1/4}) argument plugs in; ``degree="exact"`` uses 1 + the brute-force
    max degree, which is smaller by 9 and gives a tighter but flatter curve at
    small n.  ``relaxed=True`` replaces the exact absolute moments by 1.
    """
    _require_odd_prime(n, allow_composite)
    p = _as_fraction(p)
    var = ap_moments_unconditional(n, p, allow_composite=allow_composite).variance
    if degree == "exact":
        D, exact = dependency_graph(n, allow_composite).D, True
    elif degree == "bound":
        D, exact = int(degree_bound(n)) + 1, False
    else:
        raise DomainError(f"degree must be 'bound' or 'exact', got {degree!r}")
    v = ap_total(n)
    m3 = Fraction(1) if relaxed else centered_indicator_moment(p, 3)
    m4 = Fraction(1) if relaxed else centered_indicator_moment(p, 4)
    s2 = float(var)
    fourth = 4 / (math.sqrt(math.pi) * s2) * math.sqrt(D**3 * v * float(m4))
    third = D**2 / s2**1.5 * v * float(m3)
    return ChatterjeeBound(n, p, var, D, v, m3, m4, fourth, third, exact)


# --------------------------------------------------------------------------
# exchangeable pair


def lambda_stated(n: int, k: int) -> Fraction:
    """The stated drift rate 3(n-k)/C(n,2)."""
    return Fraction(3 * (n - k), ap_total(n))


def lambda_exact(n: int, k: int, swap: str = "member_nonmember") -> Fraction:
    """Drift rate that makes the identity hold for the given swap design.

    Swapping a uniform member with a uniform non-member gives
    ``3(n-2)/(k(n-k))``; toggling a uniform unordered pair of positions
    (a no-op when both share a status) gives ``3(n-2)/C(n,2)``.
    """
    if swap == "all_pairs":
        return Fraction(3 * (n - 2), ap_total(n))
    if swap == "member_nonmember":
        if k in (0, n):
            return Fraction(0)
        return Fraction(3 * (n - 2), k * (n - k))
    raise DomainError(f"unknown swap design {swap!r}")


@dataclass
class ExchangeableReport:
    n: int
    k: int
    swap: str
    mode: str
    subsets: int
    mean: Fraction
    lambda_stated: Fraction
    lambda_exact: Fraction
    lambda_fitted: Fraction | None
    max_residual_stated: Fraction
    max_residual_exact: Fraction
    worst_subset_a: int | None = None
    extras: dict = field(default_factory=dict)

    @property
    def identity_holds(self) -> bool:
        return self.max_residual_exact == 0

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def _swap_rows(n, k, samples, rng):
    if samples is None:
        if n > MAX_EXACT_SWAP_N:
            raise ResourceError(f"exact exchangeable check limited to n <= {MAX_EXACT_SWAP_N}")
        total = comb(n, k)
        return (K.swap_totals_nb(n, k, total) if use_numba() else K.swap_totals_np(n, k)), "exact"
    x = subset_fixed_k_batch(n, k, samples, rng)
    rows = K.swap_totals_rows_nb(x) if use_numba() else K.swap_totals_rows_np(x)
    return rows, "sampled"


def exchangeable_verify(n: int, k: int, swap: str = "member_nonmember", samples: int | None = None,
                        rng: RngStream | None = None, allow_composite: bool = False) -> ExchangeableReport:
    """Checks E[A' - A | S] = -lambda (A(S) - mu_{n,k}) subset by subset, in rationals.

    Exhaustive over all k-subsets when ``samples`` is None; otherwise over
    ``samples`` random k-subsets (each drift is still computed exactly).
    Residuals are reported for both the stated lambda and the exact one.
    """
    _require_odd_prime(n, allow_composite)
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, {n}]")
    lam_s, lam_e = lambda_stated(n, k), lambda_exact(n, k, swap)
    mu = conditional_mean(n, k)
    if k in (0, n):
        return ExchangeableReport(n, k, swap, "degenerate", 1, mu, lam_s, lam_e, None,
                                  Fraction(0), Fraction(0))
    if samples is not None and rng is None:
        rng = RngStream(0)
    rows, mode = _swap_rows(n, k, samples, rng)
    pairs = k * (n - k) if swap == "member_nonmember" else ap_total(n)
    worst_s = worst_e = Fraction(0)
    worst_a = None
    ratios = set()
    for a, total in {(int(a), int(t)) for a, t in rows}:
        drift = Fraction(total, pairs)
        dev = a - mu
        r_s = abs(drift + lam_s * dev)
        r_e = abs(drift + lam_e * dev)
        if r_s > worst_s:
            worst_s, worst_a = r_s, a
        worst_e = max(worst_e, r_e)
        if dev != 0:
            ratios.add(-drift / dev)
    distinct = len(ratios)
    fitted = next(iter(ratios)) if distinct == 1 else None
    return ExchangeableReport(
        n, k, swap, mode, int(rows.shape[0]), mu, lam_s, lam_e, fitted, worst_s, worst_e, worst_a,
        extras={"pairs_per_subset": pairs, "distinct_drift_ratios": distinct},
    )


# --------------------------------------------------------------------------
# spacing of conditional means


@dataclass(frozen=True, eq=False)
class SpacingProfile:
    n: int
    k_values: tuple
    gaps: tuple
    variances: tuple
    sigmas: np.ndarray
    ratios: np.ndarray

    def __post_init__(self):
        m = len(self.k_values)
        if not (len(self.gaps) == len(self.variances) == self.sigmas.size == self.ratios.size == m):
            raise ValueError("profile columns must have equal length")

    def coefficient_of_variation(self, lo: float = 0.3, hi: float = 0.7) -> float:
        sel = np.array([lo * self.n <= k <= hi * self.n for k in self.k_values])
        r = self.ratios[sel]
        return float(r.std() / r.mean())


def mean_gap(n: int, k: int) -> Fraction:
    """mu_{n,k+1} - mu_{n,k} = 3 C(k,2) / (n-2)."""
    return Fraction(3 * comb(k, 2), n - 2)


def spacing_profile(n: int, k_range=None, allow_composite: bool = False) -> SpacingProfile:
    _require_odd_prime(n, allow_composite)
    ks = list(range(3, n - 2)) if k_range is None else [int(k) for k in k_range]
    if not ks or min(ks) < 3 or max(ks) > n - 3:
        raise DomainError(f"k range must lie inside [3, {n - 3}]")
    gaps = tuple(mean_gap(n, k) for k in ks)
    variances = tuple(conditional_variance(n, k) for k in ks)
    sigmas = np.sqrt(np.array([float(v) for v in variances]))
    if np.any(sigmas <= 0):
        raise DomainError("conditional variance vanishes inside the k range")
    ratios = np.array([float(g) for g in gaps]) / sigmas
    return SpacingProfile(n, tuple(ks), gaps, variances, sigmas, ratios)


# --------------------------------------------------------------------------
# mixture tail bounds at a point


@dataclass(frozen=True)
class GapReport:
    n: int
    x: float
    chebyshev: float
    gaussian_tail: float
    gaussian_height: float
    gaussian_density: float
    exact_probability: Fraction | None = None


def _conditional_moments(n):
    mus = [conditional_mean(n, k) for k in range(n + 1)]
    # the closed form needs n >= 5; the sizes k < 3 and k > n - 3 are exact anyway
    variances = [conditional_variance(n, k) for k in range(n + 1)]
    return mus, variances


def midpoint(n: int, k: int) -> int:
    """Integer nearest the midpoint between mu_{n,k} and mu_{n,k+1}."""
    return round((conditional_mean(n, k) + conditional_mean(n, k + 1)) / 2)


def gap_diagnostic(n: int, x, exact: bool | None = None, allow_composite: bool = False) -> GapReport:
    """Upper bounds for P(A_n = x) from the size-k mixture with binomial weights.

    Chebyshev form: ``sum_k min(1, (sigma_k / |x - mu_k|)^2) P(|S| = k)``.
    Gaussian-tail form replaces the Chebyshev factor by the normal tail
    bound ``sigma_k / (|x - mu_k| sqrt(2 pi)) exp(-(x - mu_k)^2 / 2 sigma_k^2)``.
    A term whose centre equals ``x`` is capped at ``P(|S| = k)``.
    """
    _require_odd_prime(n, allow_composite)
    if n < 5:
        raise DomainError("gap diagnostic needs n >= 5")
    xf = Fraction(x) if not isinstance(x, float) else _as_fraction(x)
    weights = binomial_weights(n)
    mus, variances = _conditional_moments(n)
    cheb = Fraction(0)
    tail = 0.0
    for w, mu, var in zip(weights, mus, variances):
        d = abs(xf - mu)
        if d == 0:
            cheb += w
            tail += float(w)
            continue
        cheb += w * min(Fraction(1), var / d**2)
        if var > 0:
            z = float(d) / math.sqrt(var)
            tail += float(w) * min(1.0, math.exp(-0.5 * z * z) / (z * math.sqrt(2 * math.pi)))
    mom = ap_moments_unconditional(n, allow_composite=allow_composite)
    sd = math.sqrt(mom.variance)
    height = 1 / (math.sqrt(2 * math.pi) * sd)
    density = height * math.exp(-0.5 * ((float(xf) - float(mom.mean)) / sd) ** 2)
    prob = None
    if exact is None:
        exact = n <= 19
    if exact:
        prob = _exact_point_probability(n, xf)
    return GapReport(n, float(xf), float(cheb), tail, height, density, prob)


def _exact_point_probability(n: int, x: Fraction) -> Fraction:
    if x.denominator != 1 or not 0 <= x <= ap_total(n):
        return Fraction(0)
    hist = joint_size_ap_histogram(n)
    return Fraction(int(hist[:, int(x)].sum()), 2**n)


# --------------------------------------------------------------------------
# peak height at the centre of the middle conditional law


@dataclass(frozen=True)
class PeakReport:
    n: int
    k: int
    x: int
    probability: float
    scaled: float
    ci: tuple
    mode: str
    samples: int | None
    peak_constant: float = PEAK_CONSTANT
    gaussian_ceiling: float = GAUSS_CEILING

    @property
    def closer_to_peak(self) -> bool:
        return abs(self.scaled - self.peak_constant) < abs(self.scaled - self.gaussian_ceiling)


def _wilson(hits: int, m: int, z: float) -> tuple:
    ph = hits / m
    den = 1 + z * z / m
    centre = (ph + z * z / (2 * m)) / den
    half = z * math.sqrt(ph * (1 - ph) / m + z * z / (4 * m * m)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def peak_height_check(n: int, samples: int | None = None, rng: RngStream | None = None,
                      allow_composite: bool = False) -> PeakReport:
    """P(A_n = round(mu_{n,k})) at k = (n+1)/2, scaled by n^{3/2}.

    Exact from the joint histogram when ``samples`` is None (n <= 25),
    otherwise a Monte Carlo estimate with a Wilson interval.
    """
    from .distributions import Statistic, mc_sample

    _require_odd_prime(n, allow_composite)
    k = (n + 1) // 2
    x = round(conditional_mean(n, k))
    scale = n**1.5
    if samples is None:
        prob = float(_exact_point_probability(n, Fraction(x)))
        return PeakReport(n, k, x, prob, prob * scale, (prob * scale, prob * scale), "exact", None)
    rng = rng or RngStream(0)
    values = mc_sample(Statistic.aps(n, 0.5), samples, rng)
    hits = int(np.count_nonzero(values == x))
    z = 1.96
    if hits < 100:
        warnings.warn(
            f"only {hits} hits at x={x}; interval widened to 99.9%", ResourceWarning, stacklevel=2
        )
        z = 3.29
    lo, hi = _wilson(hits, samples, z)
    prob = hits / samples
    return PeakReport(n, k, x, prob, prob * scale, (lo * scale, hi * scale), "monte_carlo", samples)
