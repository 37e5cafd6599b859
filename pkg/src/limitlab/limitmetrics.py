"""Distances and transforms that measure how close a lattice law is to Gaussian.

All metrics accept an :class:`IntegerPmf`, an :class:`EmpiricalDist`, an
:class:`AtomDist` (finitely many real atoms, e.g. a standardised pmf or raw
samples) or a :class:`GaussianRef`.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy import stats
from scipy.special import ndtr

from .combinatorics import ap_moments_unconditional, descent_moments
from .distributions import (
    EmpiricalDist,
    GaussianRef,
    IntegerPmf,
    eulerian_pmf,
    exhaustive_ap_pmf,
    gaussian_height,
)
from .errors import DomainError, PartialResultError, ResourceError

_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class AtomDist:
    """Discrete law on sorted real atoms."""

    atoms: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.atoms, dtype=np.float64)
        m = np.asarray(self.masses, dtype=np.float64)
        if a.shape != m.shape or a.ndim != 1 or a.size == 0:
            raise DomainError("atoms and masses must be equal-length non-empty vectors")
        order = np.argsort(a, kind="stable")
        object.__setattr__(self, "atoms", a[order])
        object.__setattr__(self, "masses", m[order])

    @classmethod
    def from_samples(cls, values) -> "AtomDist":
        v, c = np.unique(np.asarray(values, dtype=np.float64), return_counts=True)
        return cls(v, c / c.sum())

    def mean(self) -> float:
        return float(np.dot(self.atoms, self.masses))

    def variance(self) -> float:
        m = self.mean()
        return float(np.dot((self.atoms - m) ** 2, self.masses))

    def cdf(self) -> np.ndarray:
        return np.minimum(np.cumsum(self.masses), 1.0)


def as_atoms(dist) -> AtomDist:
    if isinstance(dist, AtomDist):
        return dist
    if isinstance(dist, IntegerPmf):
        return AtomDist(dist.support.astype(np.float64), dist.as_float())
    if isinstance(dist, EmpiricalDist):
        x = dist.support.astype(np.float64)
        if dist.binned:
            x = (x + 0.5) * dist.bin_width
        keep = dist.counts > 0
        return AtomDist(x[keep], dist.frequencies[keep])
    raise TypeError(f"cannot treat {type(dist).__name__} as a discrete law")


def _moments(dist):
    if isinstance(dist, IntegerPmf) and dist.exact:
        return dist.mean(), dist.variance()
    return dist.mean(), dist.variance()


def standardize(dist, mean=None, sd=None) -> AtomDist:
    """Law of ``(X - mean) / sd``; defaults to the distribution's own moments."""
    a = as_atoms(dist)
    if mean is None or sd is None:
        m, v = _moments(dist)
        mean = m if mean is None else mean
        sd = math.sqrt(v) if sd is None else sd
    sd = float(sd)
    if not sd > 0:
        raise DomainError("cannot standardise a law with zero spread")
    return AtomDist((a.atoms - float(mean)) / sd, a.masses)


# --------------------------------------------------------------------------
# pointwise LLT error


@dataclass(frozen=True)
class LltError:
    raw: float
    scaled: float
    argmax: int
    sd: float
    noise_floor: float = 0.0


def llt_error(dist, ref: GaussianRef | None = None) -> LltError:
    """sup_k |P(X = k) - density(k)| over the support widened by 3 sd each side."""
    if isinstance(dist, EmpiricalDist):
        if dist.binned:
            raise DomainError("pointwise LLT error needs an integer-valued histogram")
        probs, lo = dist.frequencies, dist.support_min
        floor = dist.noise_floor()
    elif isinstance(dist, IntegerPmf):
        probs, lo = dist.as_float(), dist.support_min
        floor = 0.0
    else:
        raise TypeError("llt_error needs an IntegerPmf or EmpiricalDist")
    if probs.size == 0 or probs.sum() <= 0:
        raise DomainError("empty distribution")
    if ref is None:
        ref = GaussianRef.matching(dist)
    pad = int(math.ceil(3 * ref.sd))
    ks = np.arange(lo - pad, lo + probs.size + pad)
    p = np.zeros(ks.size)
    p[pad:pad + probs.size] = probs
    diff = np.abs(p - gaussian_height(ref, ks))
    i = int(np.argmax(diff))
    return LltError(float(diff[i]), float(diff[i] * ref.sd), int(ks[i]), ref.sd, floor * ref.sd)


# --------------------------------------------------------------------------
# Kolmogorov and Wasserstein


def _gauss_std(g: GaussianRef, x):
    return (np.asarray(x, dtype=np.float64) - g.mean) / g.sd


def kolmogorov(d1, d2) -> float:
    """sup_x |F1(x) - F2(x)|."""
    g1, g2 = isinstance(d1, GaussianRef), isinstance(d2, GaussianRef)
    if g1 and g2:
        lo = min(d1.mean - 12 * d1.sd, d2.mean - 12 * d2.sd)
        hi = max(d1.mean + 12 * d1.sd, d2.mean + 12 * d2.sd)
        x = np.linspace(lo, hi, 200001)
        return float(np.max(np.abs(ndtr(_gauss_std(d1, x)) - ndtr(_gauss_std(d2, x)))))
    if g1:
        d1, d2 = d2, d1
        g2 = True
    a = as_atoms(d1)
    if g2:
        f = a.cdf()
        f_left = np.concatenate(([0.0], f[:-1]))
        phi = ndtr(_gauss_std(d2, a.atoms))
        return float(max(np.max(np.abs(f - phi)), np.max(np.abs(f_left - phi))))
    b = as_atoms(d2)
    grid = np.union1d(a.atoms, b.atoms)
    fa = _step_cdf(a, grid)
    fb = _step_cdf(b, grid)
    return float(np.max(np.abs(fa - fb)))


def _step_cdf(a: AtomDist, x: np.ndarray) -> np.ndarray:
    c = np.concatenate(([0.0], a.cdf()))
    return c[np.searchsorted(a.atoms, x, side="right")]


def _int_phi(a, b):
    """Integral of the standard normal cdf over [a, b] (finite ends)."""
    def g(x):
        return x * ndtr(x) + np.exp(-0.5 * x * x) / _SQRT2PI
    return g(b) - g(a)


def _abs_gap_integral(c: float, a: float, b: float) -> float:
    """Integral of |c - Phi(x)| over [a, b]; a may be -inf or b +inf."""
    from scipy.special import ndtri

    pts = [a]
    if 0.0 < c < 1.0:
        xs = float(ndtri(c))
        if a < xs < b:
            pts.append(xs)
    pts.append(b)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid = hi - 1.0 if math.isinf(lo) else (lo + 1.0 if math.isinf(hi) else 0.5 * (lo + hi))
        above = c >= ndtr(mid)
        if math.isinf(lo):
            # c must be 0 on a left tail: integral of Phi from -inf
            total += float(hi * ndtr(hi) + math.exp(-0.5 * hi * hi) / _SQRT2PI)
        elif math.isinf(hi):
            # c must be 1 on a right tail: integral of 1 - Phi to +inf
            total += float(math.exp(-0.5 * lo * lo) / _SQRT2PI - lo * (1.0 - ndtr(lo)))
        else:
            ip = float(_int_phi(lo, hi))
            total += (c * (hi - lo) - ip) if above else (ip - c * (hi - lo))
    return total


def wasserstein_integer(d1, d2) -> float:
    """Wasserstein-1 distance as the L1 distance between cdfs."""
    if isinstance(d1, GaussianRef) and isinstance(d2, GaussianRef):
        if d1.sd == d2.sd:
            return abs(d1.mean - d2.mean)
        raise DomainError("Gaussian-Gaussian Wasserstein with unequal sd is not supported")
    if isinstance(d1, GaussianRef):
        d1, d2 = d2, d1
    a = as_atoms(d1)
    if not np.all(np.isfinite(a.atoms)) or not math.isfinite(a.mean()):
        raise DomainError("Wasserstein distance needs a finite mean")
    if isinstance(d2, GaussianRef):
        z = (a.atoms - d2.mean) / d2.sd
        f = a.cdf()
        total = _abs_gap_integral(0.0, -math.inf, z[0])
        for i in range(z.size - 1):
            total += _abs_gap_integral(float(f[i]), z[i], z[i + 1])
        total += _abs_gap_integral(1.0, z[-1], math.inf)
        return total * d2.sd
    b = as_atoms(d2)
    grid = np.union1d(a.atoms, b.atoms)
    fa = _step_cdf(a, grid)
    fb = _step_cdf(b, grid)
    return float(np.sum(np.abs(fa - fb)[:-1] * np.diff(grid)))


def kolmogorov_noise_floor(samples: int) -> float:
    """95% quantile of the one-sample Kolmogorov statistic, ~1.358/sqrt(m)."""
    return float(stats.kstwo.ppf(0.95, samples))


# --------------------------------------------------------------------------
# characteristic functions and inversion


@dataclass(frozen=True, eq=False)
class CharProfile:
    t: np.ndarray
    phi: np.ndarray
    gauss_ref: np.ndarray
    abs_diff: np.ndarray
    center: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        n = self.t.size
        if not (self.phi.size == self.gauss_ref.size == self.abs_diff.size == n):
            raise ValueError("profile columns must have equal length")

    def rows(self):
        for t, ph, g, d in zip(self.t, self.phi, self.gauss_ref, self.abs_diff):
            yield float(t), float(ph.real), float(ph.imag), float(g), float(d)


def char_fn(dist, t_grid, standardize: bool = False, mean=None, sd=None) -> CharProfile:
    """phi(t) = sum_k P(k) exp(i t (k - center) / scale)."""
    t = np.asarray(t_grid, dtype=np.float64)
    if t.size == 0:
        raise DomainError("empty t grid")
    a = as_atoms(dist)
    center, scale = 0.0, 1.0
    if standardize:
        m, v = _moments(dist)
        center = float(m if mean is None else mean)
        scale = float(math.sqrt(v) if sd is None else sd)
        if not scale > 0:
            raise DomainError("cannot standardise a law with zero spread")
    y = (a.atoms - center) / scale
    phi = np.empty(t.size, dtype=np.complex128)
    step = 1 << 14
    for lo in range(0, t.size, step):
        tt = t[lo:lo + step]
        phi[lo:lo + step] = np.exp(1j * np.outer(tt, y)) @ a.masses
    g = np.exp(-0.5 * t * t)
    return CharProfile(t, phi, g, np.abs(phi - g), center, scale)


def inversion_grid(b: float, second_moment: float, tol: float = 1e-9) -> tuple:
    """Trapezoid grid on [-pi b, pi b] with step^2 * max|phi''| < tol.

    ``max|phi''| <= E[Y^2]``, so ``second_moment`` is that bound.  Returns
    ``(grid, step)``.
    """
    if not b > 0:
        raise DomainError("lattice scale b must be positive")
    bound = max(float(second_moment), 1e-300)
    h_max = math.sqrt(tol / bound)
    n_int = int(math.ceil(2 * math.pi * b / h_max))
    grid = np.linspace(-math.pi * b, math.pi * b, n_int + 1)
    return grid, grid[1] - grid[0]


def fourier_invert(profile: CharProfile, lattice: tuple, y) -> float | np.ndarray:
    """P(Y = y) = (1 / 2 pi b) * integral over [-pi b, pi b] of exp(-i t y) phi(t).

    ``lattice = (a, b)`` describes support in ``(Z - a) / b``; the profile grid
    must be uniform and span exactly that interval.
    """
    a, b = lattice
    t = profile.t
    span = math.pi * b
    h = np.diff(t)
    if (
        t.size < 3
        or abs(t[0] + span) > 1e-9 * max(1.0, span)
        or abs(t[-1] - span) > 1e-9 * max(1.0, span)
        or np.ptp(h) > 1e-9 * h.mean()
    ):
        raise DomainError("t grid must be uniform and span [-pi b, pi b]")
    w = np.full(t.size, h.mean())
    w[0] = w[-1] = 0.5 * h.mean()
    ys = np.atleast_1d(np.asarray(y, dtype=np.float64))
    out = np.empty(ys.size)
    for i, yy in enumerate(ys):
        out[i] = float(np.real(np.sum(w * np.exp(-1j * t * yy) * profile.phi))) / (2 * math.pi * b)
    return float(out[0]) if np.ndim(y) == 0 else out


def fit_gaussian_decay(profile: CharProfile, tmin: float = 1.0, tmax: float = 3.0) -> float:
    """Largest c with |phi(t)| <= exp(-c t^2) on [tmin, tmax]."""
    sel = (np.abs(profile.t) >= tmin) & (np.abs(profile.t) <= tmax)
    if not sel.any():
        raise DomainError("no grid points in the fitting window")
    mag = np.abs(profile.phi[sel])
    return float(np.min(-np.log(mag) / profile.t[sel] ** 2))


# --------------------------------------------------------------------------
# descent-specific checks


def bernoulli_cf_bound(p: float, theta) -> tuple:
    """(|E exp(i theta B)|, 1 - 8 p (1-p) (theta / 2 pi)^2) for B ~ Bernoulli(p)."""
    theta = np.asarray(theta, dtype=np.float64)
    lhs = np.abs(1 - p + p * np.exp(1j * theta))
    rhs = 1 - 8 * p * (1 - p) * (theta / (2 * np.pi)) ** 2
    return lhs, rhs


def conditional_descent_probabilities(n: int = 4, j: int = 2) -> dict:
    """P(X_j = 1 | X_{j-1}, X_{j+1}) by enumerating S_n (1-based j)."""
    if not 2 <= j <= n - 2:
        raise DomainError("need 2 <= j <= n - 2 so both neighbours exist")
    hits, totals = {}, {}
    for perm in permutations(range(1, n + 1)):
        x = [int(perm[i] > perm[i + 1]) for i in range(n - 1)]
        cond = (x[j - 2], x[j])
        totals[cond] = totals.get(cond, 0) + 1
        hits[cond] = hits.get(cond, 0) + x[j - 1]
    return {c: Fraction(hits[c], totals[c]) for c in sorted(totals, reverse=True)}


# --------------------------------------------------------------------------
# small-t envelope for AP counts


@dataclass(frozen=True, eq=False)
class EnvelopeReport:
    n: int
    t: np.ndarray
    abs_diff: np.ndarray
    envelope_base: np.ndarray
    constant: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "constant": self.constant,
            "t": self.t.tolist(),
            "abs_diff": self.abs_diff.tolist(),
            "envelope_base": self.envelope_base.tolist(),
        }


def default_envelope_grid(n: int, points: int = 200) -> np.ndarray:
    tmax = math.sqrt(n) / 4
    return np.linspace(tmax / points, tmax, points)


def small_t_envelope(n: int, t_grid=None, p=Fraction(1, 2)) -> EnvelopeReport:
    """Smallest C with |phi_Z(t) - e^{-t^2/2}| <= C (t^3 e^{-t^2/3} + t) / sqrt(n) on the grid."""
    if n > 19:
        raise ResourceError("small-t envelope uses the exhaustive pmf; n <= 19")
    t = default_envelope_grid(n) if t_grid is None else np.asarray(t_grid, dtype=np.float64)
    if np.any(t <= 0) or np.any(t > math.sqrt(n) / 4 + 1e-12):
        raise DomainError("t grid must lie in (0, sqrt(n)/4]")
    pmf = exhaustive_ap_pmf(n, p)
    mom = ap_moments_unconditional(n, p)
    prof = char_fn(pmf, t, standardize=True, mean=float(mom.mean), sd=math.sqrt(mom.variance))
    base = (t**3 * np.exp(-t * t / 3) + t) / math.sqrt(n)
    return EnvelopeReport(n, t, prof.abs_diff, base, float(np.max(prof.abs_diff / base)))


# --------------------------------------------------------------------------
# scaling scans


@dataclass(frozen=True)
class ScanResult:
    metric: str
    n_values: tuple
    metric_values: tuple
    slope: float
    slope_stderr: float
    noise_floors: tuple = ()
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.n_values) != len(self.metric_values) or len(self.n_values) < 3:
            raise ValueError("a slope fit needs at least 3 equal-length points")


def fit_loglog_slope(xs, ys) -> tuple:
    """OLS slope of log(y) on log(x) and its standard error."""
    lx = np.log(np.asarray(xs, dtype=np.float64))
    ly = np.log(np.asarray(ys, dtype=np.float64))
    if np.ptp(ly) == 0:
        return 0.0, 0.0
    r = stats.linregress(lx, ly)
    return float(r.slope), float(r.stderr)


def _metric_descents_llt(n, cfg):
    pmf = eulerian_pmf(n)
    mom = descent_moments(n)
    e = llt_error(pmf, GaussianRef(float(mom.mean), math.sqrt(mom.variance)))
    return (e.raw if cfg.get("raw") else e.scaled), 0.0


def _metric_aps_kolmogorov(n, cfg):
    p = cfg.get("p", Fraction(1, 2))
    mom = ap_moments_unconditional(n, p)
    z = standardize(exhaustive_ap_pmf(n, p), float(mom.mean), math.sqrt(mom.variance))
    return kolmogorov(z, GaussianRef(0.0, 1.0)), 0.0


def _metric_aps_llt(n, cfg):
    p = cfg.get("p", Fraction(1, 2))
    mom = ap_moments_unconditional(n, p)
    e = llt_error(exhaustive_ap_pmf(n, p), GaussianRef(float(mom.mean), math.sqrt(mom.variance)))
    return e.scaled, 0.0


def _metric_chatterjee(n, cfg):
    from .steinlab import chatterjee_bound

    return chatterjee_bound(n, cfg.get("p", Fraction(1, 2)), degree=cfg.get("degree", "bound")).kolmogorov, 0.0


METRICS = {
    "descents_llt": _metric_descents_llt,
    "descents_llt_raw": lambda n, cfg: _metric_descents_llt(n, {**cfg, "raw": True}),
    "aps_kolmogorov": _metric_aps_kolmogorov,
    "aps_llt_scaled": _metric_aps_llt,
    "chatterjee_kolmogorov": _metric_chatterjee,
}


def scaling_scan(metric: str, n_list, **config) -> ScanResult:
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}")
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3:
        raise DomainError("a scaling scan needs at least 3 values of n")
    done, values, floors = [], [], []
    for n in n_list:
        try:
            v, floor = METRICS[metric](n, config)
        except Exception as exc:
            raise PartialResultError(
                f"{metric} failed at n={n}: {exc}", list(zip(done, values, floors))
            ) from exc
        done.append(n)
        values.append(float(v))
        floors.append(float(floor))
    slope, se = fit_loglog_slope(done, values)
    return ScanResult(metric, tuple(done), tuple(values), slope, se, tuple(floors), dict(config))
