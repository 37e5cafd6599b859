"""Exact and empirical integer distributions of descents and AP counts."""

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import _kernels as K
from ._accel import use_numba
from .combinatorics import _as_fraction, _check_prime, ap_total
from .errors import DomainError, ResourceError
from .rng import RngStream

MAX_EXHAUSTIVE_N = 25
MAX_COMBINATIONS = 10**7
MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class IntegerPmf:
    """Probability mass function on ``support_min, support_min + 1, ...``.

    ``probabilities`` is a tuple of Fractions when ``exact`` and a float64
    array otherwise.
    """

    support_min: int
    probabilities: tuple | np.ndarray
    exact: bool = True

    def __post_init__(self):
        if self.exact:
            probs = tuple(Fraction(p) for p in self.probabilities)
            if any(p < 0 for p in probs):
                raise ValueError("negative probability")
            if sum(probs) != 1:
                raise ValueError(f"exact pmf sums to {sum(probs)}")
        else:
            probs = np.asarray(self.probabilities, dtype=np.float64)
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
                raise ValueError("float pmf must be non-negative and sum to 1")
        object.__setattr__(self, "probabilities", probs)

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_min + len(self.probabilities))

    @property
    def support_max(self) -> int:
        return self.support_min + len(self.probabilities) - 1

    @property
    def total_mass(self):
        return sum(self.probabilities) if self.exact else float(self.probabilities.sum())

    def prob(self, x: int):
        i = x - self.support_min
        if 0 <= i < len(self.probabilities):
            return self.probabilities[i]
        return Fraction(0) if self.exact else 0.0

    def mean(self):
        if self.exact:
            return sum(p * (self.support_min + i) for i, p in enumerate(self.probabilities))
        return float(np.dot(self.probabilities, self.support))

    def variance(self):
        m = self.mean()
        if self.exact:
            return sum(p * (self.support_min + i - m) ** 2 for i, p in enumerate(self.probabilities))
        return float(np.dot(self.probabilities, (self.support - m) ** 2))

    def as_float(self) -> np.ndarray:
        if self.exact:
            return np.array([float(p) for p in self.probabilities])
        return self.probabilities

    def to_float(self) -> "IntegerPmf":
        return IntegerPmf(self.support_min, self.as_float(), exact=False) if self.exact else self

    def trimmed(self) -> "IntegerPmf":
        """Drop zero mass at both ends."""
        nz = [i for i, p in enumerate(self.probabilities) if p != 0]
        lo, hi = nz[0], nz[-1]
        return IntegerPmf(self.support_min + lo, self.probabilities[lo:hi + 1], self.exact)


@dataclass(frozen=True)
class EmpiricalDist:
    """Histogram of Monte Carlo draws.

    For a real-valued statistic ``bin_width`` is set and bin ``i`` covers
    ``[i * bin_width, (i + 1) * bin_width)``; ``support_min`` is then a bin index.
    """

    support_min: int
    counts: np.ndarray
    sample_size: int
    provenance: dict = field(default_factory=dict, compare=False)
    bin_width: float | None = None

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if np.any(c < 0) or int(c.sum()) != self.sample_size:
            raise ValueError("counts must be non-negative and sum to sample_size")
        object.__setattr__(self, "counts", c)

    @property
    def binned(self) -> bool:
        return self.bin_width is not None

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_min, self.support_min + self.counts.size)

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.sample_size

    def mean(self) -> float:
        return float(np.dot(self.frequencies, self.support))

    def variance(self) -> float:
        f = self.frequencies
        m = float(np.dot(f, self.support))
        return float(np.dot(f, (self.support - m) ** 2))

    def noise_floor(self) -> float:
        """Typical per-bin sampling error of a frequency, ~ sqrt(1/samples)."""
        return math.sqrt(1.0 / self.sample_size)

    def merge(self, other: "EmpiricalDist") -> "EmpiricalDist":
        if self.bin_width != other.bin_width:
            raise DomainError("cannot merge histograms with different binning")
        lo = min(self.support_min, other.support_min)
        hi = max(self.support_min + self.counts.size, other.support_min + other.counts.size)
        c = np.zeros(hi - lo, dtype=np.int64)
        c[self.support_min - lo:self.support_min - lo + self.counts.size] += self.counts
        c[other.support_min - lo:other.support_min - lo + other.counts.size] += other.counts
        prov = {"merged": [self.provenance, other.provenance]}
        return EmpiricalDist(lo, c, self.sample_size + other.sample_size, prov, self.bin_width)


@dataclass(frozen=True)
class GaussianRef:
    mean: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError("Gaussian reference needs sd > 0")

    @classmethod
    def matching(cls, dist) -> "GaussianRef":
        return cls(float(dist.mean()), math.sqrt(float(dist.variance())))


def gaussian_height(ref: GaussianRef, x) -> float | np.ndarray:
    z = (np.asarray(x, dtype=np.float64) - ref.mean) / ref.sd
    h = np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * ref.sd)
    return float(h) if np.ndim(h) == 0 else h


# --------------------------------------------------------------------------
# exact distributions


@lru_cache(maxsize=None)
def eulerian_row(n: int) -> tuple:
    """Eulerian numbers A(n, 0..n-1) as Python ints."""
    if n < 1:
        raise DomainError("n must be >= 1")
    row = [1]
    for m in range(2, n + 1):
        new = [0] * m
        for k in range(m):
            stay = (k + 1) * row[k] if k < m - 1 else 0
            move = (m - k) * row[k - 1] if k >= 1 else 0
            new[k] = stay + move
        row = new
    return tuple(row)


def eulerian_pmf(n: int) -> IntegerPmf:
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > 1000:
        raise ResourceError("exact Eulerian DP is limited to n <= 1000")
    row = eulerian_row(n)
    total = math.factorial(n)
    return IntegerPmf(0, tuple(Fraction(a, total) for a in row))


@lru_cache(maxsize=8)
def _joint_hist(n: int) -> np.ndarray:
    if use_numba():
        return K.joint_hist_nb(n, 8)
    return K.joint_hist_np(n)


def joint_size_ap_histogram(n: int, allow_composite: bool = False) -> np.ndarray:
    """``hist[k, a]`` = number of subsets of Z/nZ with ``|S| = k`` and ``A(S) = a``."""
    if n % 2 == 0 or n < 3:
        raise DomainError("exhaustive AP enumeration needs odd n")
    _check_prime(n, allow_composite)
    if n > MAX_EXHAUSTIVE_N:
        raise ResourceError(f"2^{n} subsets is too many; use Monte Carlo (mc_histogram)")
    return _joint_hist(n)


def exhaustive_ap_pmf(n: int, p=Fraction(1, 2), allow_composite: bool = False) -> IntegerPmf:
    p = _as_fraction(p)
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    hist = joint_size_ap_histogram(n, allow_composite)
    q = 1 - p
    weights = [p**k * q ** (n - k) for k in range(n + 1)]
    probs = []
    for a in range(hist.shape[1]):
        col = hist[:, a]
        probs.append(sum(int(col[k]) * weights[k] for k in range(n + 1) if col[k]))
    return IntegerPmf(0, tuple(probs))


def conditional_ap_histogram(n: int, k: int, allow_composite: bool = False) -> np.ndarray:
    """Counts of A over all k-subsets, by direct combination enumeration."""
    if n % 2 == 0 or n < 3:
        raise DomainError("AP enumeration needs odd n")
    _check_prime(n, allow_composite)
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, {n}]")
    if comb(n, k) > MAX_COMBINATIONS:
        raise ResourceError(f"C({n},{k}) = {comb(n, k)} subsets exceeds {MAX_COMBINATIONS}")
    return K.fixed_k_hist_nb(n, k) if use_numba() else K.fixed_k_hist_np(n, k)


def exhaustive_conditional_pmf(n: int, k: int, allow_composite: bool = False) -> IntegerPmf:
    hist = conditional_ap_histogram(n, k, allow_composite)
    total = comb(n, k)
    return IntegerPmf(0, tuple(Fraction(int(c), total) for c in hist))


# --------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class Statistic:
    """What to simulate; build with the classmethods."""

    kind: str
    n: int
    p: float | None = None
    k: int | None = None
    bin_width: float | None = None

    @classmethod
    def descents(cls, n: int) -> "Statistic":
        if n < 1:
            raise DomainError("n must be >= 1")
        return cls("descents", n)

    @classmethod
    def aps(cls, n: int, p=0.5) -> "Statistic":
        _check_odd(n)
        p = float(p)
        if not 0 < p < 1:
            raise DomainError("p must lie in (0, 1)")
        return cls("aps", n, p=p)

    @classmethod
    def aps_fixed_k(cls, n: int, k: int) -> "Statistic":
        _check_odd(n)
        if not 0 <= k <= n:
            raise DomainError(f"k={k} outside [0, {n}]")
        return cls("aps_fixed_k", n, k=k)

    @classmethod
    def aps_continuous_binned(cls, n: int, bin_width: float = 1.0) -> "Statistic":
        _check_odd(n)
        if not bin_width > 0:
            raise DomainError("bin width must be positive")
        return cls("aps_continuous", n, bin_width=float(bin_width))

    @property
    def real_valued(self) -> bool:
        return self.kind == "aps_continuous"

    def config(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def _check_odd(n):
    if n < 3 or n % 2 == 0:
        raise DomainError(f"AP statistics need odd n >= 3, got {n}")


def _mc_chunk(stat: Statistic, key, start: int, count: int) -> np.ndarray:
    n = stat.n
    if use_numba():
        if stat.kind == "descents":
            return K.mc_descents_nb(key, start, count, n)
        if stat.kind == "aps":
            return K.mc_aps_nb(key, start, count, n, stat.p)
        if stat.kind == "aps_fixed_k":
            return K.mc_aps_fixed_k_nb(key, start, count, n, stat.k)
        return K.mc_aps_continuous_nb(key, start, count, n)
    if stat.kind == "descents":
        return K.descents_batch_np(K.lehmer_batch_np(key, start, count, n))
    if stat.kind == "aps":
        return K.count_aps_batch_np(K.bernoulli_batch_np(key, start, count, n, stat.p))
    if stat.kind == "aps_fixed_k":
        return K.count_aps_batch_np(K.fixed_k_batch_np(key, start, count, n, stat.k))
    return K.count_aps_cont_batch_np(K.continuous_batch_np(key, start, count, n))


def mc_sample(stat: Statistic, samples: int, rng: RngStream) -> np.ndarray:
    """Raw statistic values for ``samples`` consecutive blocks of ``rng``."""
    if samples < 1:
        raise DomainError("samples must be >= 1")
    start = rng.take(samples)
    key = rng.key
    chunk = MC_CHUNK if use_numba() else 4096
    parts = [
        _mc_chunk(stat, key, s, min(chunk, start + samples - s))
        for s in range(start, start + samples, chunk)
    ]
    return np.concatenate(parts)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def histogram_from_values(values, bin_width: float | None = None, provenance=None) -> EmpiricalDist:
    values = np.asarray(values)
    if bin_width is None:
        idx = values.astype(np.int64)
    else:
        idx = np.floor(values / bin_width).astype(np.int64)
    lo = int(idx.min())
    counts = np.bincount(idx - lo)
    return EmpiricalDist(lo, counts, int(values.size), provenance or {}, bin_width)


def mc_histogram(stat: Statistic, samples: int, rng: RngStream) -> EmpiricalDist:
    first_block = rng.position
    values = mc_sample(stat, samples, rng)
    prov = {
        "seed": rng.seed,
        "stream_id": rng.stream_id,
        "first_block": first_block,
        "samples": samples,
        "statistic": stat.config(),
    }
    prov["config_hash"] = config_hash(prov)
    return histogram_from_values(values, stat.bin_width, prov)


def ap_support_size(n: int) -> int:
    return ap_total(n) + 1
