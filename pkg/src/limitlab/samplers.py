"""Seedable samplers: Lehmer codes, Bernoulli subsets, fixed-size subsets, uniform weights.

Each single-sample call consumes one block of the stream; the ``*_batch``
variants consume ``count`` consecutive blocks and give exactly the same rows
as repeated single calls would.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from ._accel import use_numba
from .errors import DomainError, ValidationError
from .rng import RngStream


@dataclass(frozen=True, eq=False)
class LehmerCode:
    """``a[j]`` (0-based j) lies in ``1..n-j``: pick the a[j]-th remaining element."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.int64)
        n = a.size
        if a.ndim != 1 or np.any(a < 1) or np.any(a > n - np.arange(n)):
            raise ValidationError("Lehmer code entry out of range")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.a.size

    def __eq__(self, other):
        return isinstance(other, LehmerCode) and np.array_equal(self.a, other.a)


@dataclass(frozen=True, eq=False)
class SubsetState:
    membership: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.membership)
        if m.ndim != 1 or not np.isin(m, (0, 1)).all():
            raise ValidationError("membership must be a 0/1 vector")
        object.__setattr__(self, "membership", m.astype(np.uint8))

    @classmethod
    def from_elements(cls, n: int, elements) -> "SubsetState":
        m = np.zeros(n, dtype=np.uint8)
        m[[e % n for e in elements]] = 1
        return cls(m)

    @property
    def n(self) -> int:
        return self.membership.size

    @property
    def size(self) -> int:
        return int(self.membership.sum())

    def elements(self) -> list:
        return np.flatnonzero(self.membership).tolist()

    def complement(self) -> "SubsetState":
        return SubsetState(1 - self.membership)

    def __eq__(self, other):
        return isinstance(other, SubsetState) and np.array_equal(self.membership, other.membership)


@dataclass(frozen=True, eq=False)
class ContinuousState:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or np.any(w < 0) or np.any(w > 1):
            raise ValidationError("weights must lie in [0, 1]")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.size

    def __eq__(self, other):
        return isinstance(other, ContinuousState) and np.array_equal(self.weights, other.weights)


def _check_n(n):
    if n < 1:
        raise DomainError("n must be >= 1")


def _check_p(p):
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie in the open interval (0, 1)")
    return p


def lehmer_batch(n: int, count: int, rng: RngStream) -> np.ndarray:
    _check_n(n)
    start = rng.take(count)
    f = K.lehmer_batch_nb if use_numba() else K.lehmer_batch_np
    return f(rng.key, start, count, n)


def subset_batch(n: int, p, count: int, rng: RngStream) -> np.ndarray:
    _check_n(n)
    p = _check_p(p)
    start = rng.take(count)
    f = K.bernoulli_batch_nb if use_numba() else K.bernoulli_batch_np
    return f(rng.key, start, count, n, p)


def subset_fixed_k_batch(n: int, k: int, count: int, rng: RngStream) -> np.ndarray:
    _check_n(n)
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, {n}]")
    start = rng.take(count)
    f = K.fixed_k_batch_nb if use_numba() else K.fixed_k_batch_np
    return f(rng.key, start, count, n, k)


def continuous_batch(n: int, count: int, rng: RngStream) -> np.ndarray:
    _check_n(n)
    start = rng.take(count)
    f = K.continuous_batch_nb if use_numba() else K.continuous_batch_np
    return f(rng.key, start, count, n)


def sample_lehmer(n: int, rng: RngStream) -> LehmerCode:
    return LehmerCode(lehmer_batch(n, 1, rng)[0])


def sample_subset(n: int, p, rng: RngStream) -> SubsetState:
    return SubsetState(subset_batch(n, p, 1, rng)[0])


def sample_subset_fixed_k(n: int, k: int, rng: RngStream) -> SubsetState:
    return SubsetState(subset_fixed_k_batch(n, k, 1, rng)[0])


def sample_continuous(n: int, rng: RngStream) -> ContinuousState:
    return ContinuousState(continuous_batch(n, 1, rng)[0])


def lehmer_to_permutation(code: LehmerCode) -> np.ndarray:
    """Permutation of 1..n whose j-th entry is the a[j]-th smallest unused value."""
    remaining = list(range(1, code.n + 1))
    return np.array([remaining.pop(int(aj) - 1) for aj in code.a], dtype=np.int64)


def permutation_to_lehmer(perm) -> LehmerCode:
    perm = [int(v) for v in perm]
    remaining = sorted(perm)
    a = []
    for v in perm:
        i = remaining.index(v)
        a.append(i + 1)
        remaining.pop(i)
    return LehmerCode(np.array(a, dtype=np.int64))
