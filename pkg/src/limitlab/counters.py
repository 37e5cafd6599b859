"""Descent counts and 3-AP counts of discrete and weighted subsets of Z/nZ.

A progression is a pair ``(a, d)`` with ``d != 0``, identified with its
reversal ``(a + 2d, -d)``, so Z/nZ has exactly C(n, 2) of them for odd n.
When 3 divides n the set ``{x, x + n/3, x + 2n/3}`` arises from three such
pairs and is counted three times.
"""

from itertools import product
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from ._accel import use_numba
from .combinatorics import IntersectionTable, ap_total
from .errors import DomainError, ValidationError
from .samplers import ContinuousState, LehmerCode, SubsetState


class ApTriple(NamedTuple):
    """Progression ``start, start+diff, start+2*diff`` in Z/nZ with ``1 <= diff <= (n-1)/2``."""

    start: int
    diff: int
    n: int

    @classmethod
    def canonical(cls, start: int, diff: int, n: int) -> "ApTriple":
        _require_odd(n)
        diff %= n
        if diff == 0:
            raise DomainError("difference must be non-zero")
        start %= n
        if diff > (n - 1) // 2:
            # (a, d) and (a + 2d, -d) are the same progression read backwards
            start, diff = (start + 2 * diff) % n, n - diff
        return cls(start, diff, n)

    @property
    def elements(self) -> tuple:
        a, d, n = self
        return (a, (a + d) % n, (a + 2 * d) % n)


def _require_odd(n: int):
    if n < 3 or n % 2 == 0:
        raise DomainError(f"AP counting needs odd n >= 3, got {n}")


def enumerate_aps(n: int) -> list:
    _require_odd(n)
    return [ApTriple(a, d, n) for a in range(n) for d in range(1, (n - 1) // 2 + 1)]


def count_descents(perm_or_code) -> int:
    """Descents of a permutation of 1..n, or of a Lehmer code (a_j > a_{j+1})."""
    if isinstance(perm_or_code, LehmerCode):
        a = perm_or_code.a
    else:
        a = np.asarray(perm_or_code, dtype=np.int64)
        if a.ndim != 1 or a.size == 0 or not np.array_equal(np.sort(a), np.arange(1, a.size + 1)):
            raise ValidationError("not a permutation of 1..n")
    return int(np.count_nonzero(a[:-1] > a[1:]))


def _membership(s) -> np.ndarray:
    return s.membership if isinstance(s, SubsetState) else np.asarray(s, dtype=np.uint8)


def count_aps(s) -> int:
    x = _membership(s)
    _require_odd(x.size)
    if use_numba():
        return int(K._aps_one(x))
    return int(K.count_aps_batch_np(x[None, :])[0])


def count_aps_double_sum(s) -> int:
    """``(1/2) sum_i sum_{j=1}^{n-1} x_i x_{i+j} x_{i+2j}``, evaluated literally."""
    x = _membership(s).astype(np.int64)
    n = x.size
    _require_odd(n)
    i = np.arange(n)
    total = 0
    for j in range(1, n):
        total += int((x * x[(i + j) % n] * x[(i + 2 * j) % n]).sum())
    assert total % 2 == 0
    return total // 2


def count_aps_continuous(s) -> float:
    w = s.weights if isinstance(s, ContinuousState) else np.asarray(s, dtype=np.float64)
    _require_odd(w.size)
    if use_numba():
        return float(K._aps_cont_one(w))
    return float(K.count_aps_cont_batch_np(w[None, :])[0])


def count_aps_batch(x: np.ndarray) -> np.ndarray:
    """AP counts for each row of a 0/1 matrix."""
    x = np.ascontiguousarray(x, dtype=np.uint8)
    _require_odd(x.shape[1])
    return K.count_aps_batch_nb(x) if use_numba() else K.count_aps_batch_np(x)


def count_aps_continuous_batch(w: np.ndarray) -> np.ndarray:
    w = np.ascontiguousarray(w, dtype=np.float64)
    _require_odd(w.shape[1])
    return K.count_aps_cont_batch_nb(w) if use_numba() else K.count_aps_cont_batch_np(w)


def count_descents_batch(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    return K.descents_batch_nb(a) if use_numba() else K.descents_batch_np(a)


def intersection_table_bruteforce(n: int) -> IntersectionTable:
    """Overlap counts over all ordered pairs of progressions, by direct comparison."""
    sets = [frozenset(t.elements) for t in enumerate_aps(n)]
    counts = [0, 0, 0, 0]
    for s1, s2 in product(sets, repeat=2):
        counts[len(s1 & s2)] += 1
    table = IntersectionTable(n, tuple(counts))
    assert table.total == ap_total(n) ** 2
    return table
