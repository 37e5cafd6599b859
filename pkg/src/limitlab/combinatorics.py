"""Exact closed forms for descents and 3-term arithmetic progressions.

Everything here is evaluated in :class:`fractions.Fraction`; nothing is
converted to float.  Operations that rely on ``n`` being prime refuse a
composite modulus unless called with ``allow_composite=True``, in which case
the result is flagged ``formula_unsafe``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt

from .errors import DomainError, FormulaDomainError, PrimalityError

Rational = Fraction


@dataclass(frozen=True)
class MomentSummary:
    mean: Fraction
    variance: Fraction
    exact: bool = True
    formula_unsafe: bool = False
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError(f"negative variance {self.variance}")


@dataclass(frozen=True)
class IntersectionTable:
    """Ordered pairs of progressions ``(L1, L2)`` by overlap size ``i = |L1 & L2|``.

    Ordered-pair convention: ``(L, L)`` sits in the ``i = 3`` cell, so the four
    counts sum to ``C(n,2)**2``.
    """

    n: int
    counts: tuple

    def __post_init__(self):
        if len(self.counts) != 4 or any(c < 0 for c in self.counts):
            raise ValueError("counts must be four non-negative integers")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def per_progression(self) -> tuple:
        v = ap_total(self.n)
        return tuple(Fraction(c, v) for c in self.counts)


@dataclass(frozen=True)
class ContinuousMoments:
    """Mean and two competing variances of the uniform-weight AP sum.

    ``stated_variance`` is the stated closed form ``C(n,2)(n - 25/54)/64``;
    ``stated_route_variance`` repeats the stated derivation (per-overlap
    moment ``(1/2)^(6-i)``) term by term; ``oracle_variance`` uses the actual
    uniform moments ``E[x] = 1/2``, ``E[x^2] = 1/3``.  None of them is
    reconciled with the others.
    """

    n: int
    mean: Fraction
    stated_variance: Fraction
    stated_route_variance: Fraction
    oracle_variance: Fraction

    def summary(self) -> MomentSummary:
        return MomentSummary(self.mean, self.oracle_variance)

    def discrepancy(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "stated_variance": self.stated_variance,
            "stated_route_variance": self.stated_route_variance,
            "oracle_variance": self.oracle_variance,
            "oracle_minus_stated": self.oracle_variance - self.stated_variance,
            "oracle_over_stated": self.oracle_variance / self.stated_variance,
            "agree": self.oracle_variance == self.stated_variance,
        }


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def _check_prime(n: int, allow_composite: bool) -> bool:
    """Returns the ``formula_unsafe`` flag."""
    if is_prime(n):
        return False
    if allow_composite:
        return True
    raise PrimalityError(f"n={n} is not prime (pass allow_composite=True to override)")


def _as_fraction(p) -> Fraction:
    # floats go through their shortest repr so 0.1 means 1/10
    if isinstance(p, float):
        return Fraction(repr(p))
    return Fraction(p)


def descent_moments(n: int) -> MomentSummary:
    if n < 2:
        raise DomainError("descent moments need n >= 2")
    return MomentSummary(Fraction(n - 1, 2), Fraction(n + 1, 12))


def ap_total(n: int) -> int:
    """Number of non-trivial 3-APs in Z/nZ, counted once per unordered progression."""
    if n < 3:
        raise DomainError("ap_total needs n >= 3")
    return n * (n - 1) // 2


def ap_moments_unconditional(n: int, p=Fraction(1, 2), allow_composite: bool = False) -> MomentSummary:
    """Mean and variance of the AP count of a p-random subset (Parseval form)."""
    unsafe = _check_prime(n, allow_composite)
    p = _as_fraction(p)
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    q = 1 - p
    c2 = ap_total(n)
    # squared Fourier weights at levels 1, 2 and 3
    level1 = Fraction(9, 4) * n * (n - 1) ** 2 * p**5 * q
    level2 = 9 * c2 * p**4 * q**2
    level3 = c2 * p**3 * q**3
    return MomentSummary(
        p**3 * c2,
        level1 + level2 + level3,
        formula_unsafe=unsafe,
        extras={"level_weights": (level1, level2, level3)},
    )


def conditional_mean(n: int, k: int) -> Fraction:
    """E[A | |S| = k] = C(n,2) C(k,3) / C(n,3)."""
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, {n}]")
    if n < 3:
        raise DomainError("conditional mean needs n >= 3")
    return Fraction(ap_total(n) * comb(k, 3), comb(n, 3))


def conditional_variance(n: int, k: int) -> Fraction:
    """Closed-form variance of the AP count of a uniform k-subset."""
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, {n}]")
    if n <= 4:
        raise DomainError("variance closed form has a vanishing denominator for n <= 4")
    num = -(k - 2) * (k - 1) * k * (
        k**3 - 3 * k**2 * (n - 1) - n * (n**2 - 3 * n + 2) + k * (3 * n**2 - 6 * n + 2)
    )
    return Fraction(num, 2 * (n - 4) * (n - 3) * (n - 2) ** 2)


def ap_moments_conditional(n: int, k: int, allow_composite: bool = False) -> MomentSummary:
    unsafe = _check_prime(n, allow_composite)
    var = conditional_variance(n, k)
    leading = Fraction(k**3 * (n - k) ** 3, 2 * n**4)
    return MomentSummary(
        conditional_mean(n, k), var, formula_unsafe=unsafe,
        extras={"leading_variance": leading},
    )


def extension_count(n: int, i: int) -> int:
    """Number of progressions containing a fixed i-element subset of a progression."""
    if i not in (0, 1, 2, 3):
        raise DomainError("i must be in 0..3")
    if n < 3 or n % 2 == 0:
        raise DomainError("extension counts need odd n >= 3")
    return (ap_total(n), 3 * (n - 1) // 2, 3, 1)[i]


def overlap_counts_inclusion_exclusion(n: int) -> tuple:
    """Per-progression overlap counts via inclusion-exclusion over extension counts.

    For a fixed progression L and an i-subset T of it, the progressions meeting
    L in exactly T number ``sum_j (-1)^j C(3-i, j) f(i+j)``.
    """
    f = [extension_count(n, i) for i in range(4)]
    out = []
    for i in range(4):
        exact_t = sum((-1) ** j * comb(3 - i, j) * f[i + j] for j in range(4 - i))
        out.append(comb(3, i) * exact_t)
    return tuple(out)


def intersection_table(n: int, allow_composite: bool = False) -> IntersectionTable:
    _check_prime(n, allow_composite)
    c2 = ap_total(n)
    counts = (
        Fraction(c2 * (n * n - 10 * n + 25), 2),
        Fraction(c2 * (9 * n - 39), 2),
        Fraction(6 * c2),
        Fraction(c2),
    )
    for i, c in enumerate(counts):
        if c < 0 or c.denominator != 1:
            raise FormulaDomainError(f"pair-count formula gives {c} for overlap {i} at n={n}", n=n)
    table = IntersectionTable(n, tuple(int(c) for c in counts))
    if table.total != c2 * c2:
        raise FormulaDomainError(f"pair counts do not sum to C(n,2)^2 at n={n}", n=n)
    return table


def complement_identity(n: int, k: int) -> Fraction:
    """The constant value of A(S) + A(complement of S) over all |S| = k."""
    if n % 2 == 0 or n <= 3:
        raise DomainError("complement identity needs odd n > 3")
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, {n}]")
    return Fraction(3 * k * (k - 1) + 3 * (n - k) * (n - k - 1) - n * (n - 1), 4)


def ap_moments_continuous(n: int, allow_composite: bool = False) -> ContinuousMoments:
    unsafe = _check_prime(n, allow_composite)
    if n < 7 and not unsafe:
        raise DomainError("continuous moments need n >= 7")
    c2 = ap_total(n)
    mean = Fraction(c2, 8)
    table = intersection_table(n, allow_composite=allow_composite)
    half, third = Fraction(1, 2), Fraction(1, 3)
    # i = overlap size; 6 - i distinct variables, i of them squared
    stated_second = sum(c * half ** (6 - i) for i, c in enumerate(table.counts))
    oracle_second = sum(c * half ** (6 - 2 * i) * third**i for i, c in enumerate(table.counts))
    return ContinuousMoments(
        n=n,
        mean=mean,
        stated_variance=Fraction(1, 64) * c2 * (n - Fraction(25, 54)),
        stated_route_variance=stated_second - mean**2,
        oracle_variance=oracle_second - mean**2,
    )


def binomial_weights(n: int, p=Fraction(1, 2)) -> list:
    """Exact P(|S| = k) for k = 0..n."""
    p = _as_fraction(p)
    return [comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n + 1)]
