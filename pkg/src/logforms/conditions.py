"""Exclusion filters selecting tuples whose products have rigid factor layouts.

Three per-tuple conditions are tested against a cutoff parameter C >= 2:

1. some prime divides the base product a_1 * ... * a_n with total multiplicity
   e >= 2 and that prime power p**e reaches C;
2. some base is C-smooth, i.e. all of its prime factors are <= C (the base 1
   counts vacuously);
3. the exponents admit a nontrivial integer relation
   c_1*b_1 + ... + c_n*b_n = 0 with every |c_i| <= floor(2 ln C).

Form tuples passing *none* of the three conditions make up the "e-set".
Inside it, equal product values force equal tuples up to reordering of the
(base, exponent) pairs: every remaining base carries a prime factor larger
than C that appears to the first power in the whole product, which pins each
exponent b_i to a matching partner, and condition 3 then forces the prime
exponent vectors of the bases themselves to match.

All logarithms are natural.  The coefficient window floor(2 ln C) is the
narrowest integer box that still covers any single prime's exponent imbalance
(a repeated prime power below C has exponent at most log2 C <= 2 ln C), which
is what lets the third filter close that uniqueness argument.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .core import (
    Bounds,
    BudgetError,
    ConfigError,
    FactorTable,
    FormTuple,
    factorize,
)

__all__ = [
    "FilterParameter",
    "default_cutoff",
    "has_large_prime_power",
    "has_smooth_base",
    "has_bounded_relation",
    "in_e_set",
    "count_e_set",
]

# Above this many candidate coefficient vectors the relation search switches
# to meet-in-the-middle on the two halves of the coordinate set.
_MITM_THRESHOLD = 10_000_000


@dataclass(frozen=True)
class FilterParameter:
    """Cutoff C >= 2 together with its derived coefficient bound floor(2 ln C)."""

    cutoff: float
    coeff_bound: int

    def __post_init__(self) -> None:
        if not (self.cutoff >= 2.0):
            raise ConfigError(f"cutoff {self.cutoff} must be >= 2")
        expected = math.floor(2.0 * math.log(self.cutoff))
        if self.coeff_bound != expected:
            raise ConfigError(
                f"coeff_bound {self.coeff_bound} inconsistent with cutoff "
                f"{self.cutoff} (expected {expected})"
            )

    @classmethod
    def from_cutoff(cls, cutoff: float) -> "FilterParameter":
        cutoff = float(cutoff)
        if not (cutoff >= 2.0):
            raise ConfigError(f"cutoff {cutoff} must be >= 2")
        return cls(cutoff, math.floor(2.0 * math.log(cutoff)))


def default_cutoff(bounds: Bounds) -> FilterParameter:
    """The canonical cutoff min(B_1..B_n, ln A_1..ln A_n) for a box.

    Raises ConfigError when that minimum drops below 2, i.e. when some base
    bound is below e**2 (so < 8 as an integer) or some exponent bound is < 2.
    """
    cutoff = min(
        min(float(b) for b in bounds.exp_max),
        min(math.log(a) for a in bounds.base_max),
    )
    if cutoff < 2.0:
        raise ConfigError(
            f"default cutoff {cutoff:.4f} < 2 for bounds {bounds.base_max}/{bounds.exp_max}; "
            "every base bound must be >= 8 and every exponent bound >= 2"
        )
    return FilterParameter.from_cutoff(cutoff)


def has_large_prime_power(
    bases: Sequence[int], param: FilterParameter, table: FactorTable
) -> bool:
    """Condition 1: some prime p has total multiplicity e >= 2 in the base
    product with p**e >= cutoff.

    Equivalent to the existence of k >= 2 with p**k dividing the product and
    p**k >= cutoff, since the maximal power is the easiest to push past the
    cutoff.
    """
    acc: Counter[int] = Counter()
    for a in bases:
        for p, e in factorize(a, table):
            acc[p] += e
    return any(e >= 2 and p**e >= param.cutoff for p, e in acc.items())


def has_smooth_base(
    bases: Sequence[int], param: FilterParameter, table: FactorTable
) -> bool:
    """Condition 2: some base is cutoff-smooth (1 is vacuously smooth)."""
    c = param.cutoff
    return any(all(p <= c for p, _ in factorize(a, table)) for a in bases)


def has_bounded_relation(
    exps: Sequence[int],
    param: FilterParameter,
    *,
    mitm_threshold: int = _MITM_THRESHOLD,
) -> bool:
    """Condition 3: a nonzero integer vector c with |c_i| <= coeff_bound and
    c_1*b_1 + ... + c_n*b_n = 0 exists.

    Exhaustive over the coefficient box; switches to meet-in-the-middle on the
    two coordinate halves when the box holds more than ``mitm_threshold``
    vectors.
    """
    k = param.coeff_bound
    if k < 1:
        return False
    b = tuple(int(x) for x in exps)
    n = len(b)
    if any(x == 0 for x in b):
        return True  # unit coefficient on a zero exponent
    if n == 1:
        return False  # c*b = 0 with b != 0 forces c = 0
    if len({abs(x) for x in b}) < n:
        return True  # matching magnitudes cancel with coefficients +-1
    width = 2 * k + 1
    if width**n <= mitm_threshold:
        rng = range(-k, k + 1)
        for c in itertools.product(rng, repeat=n):
            if any(c) and sum(ci * bi for ci, bi in zip(c, b)) == 0:
                return True
        return False
    return _relation_mitm(b, k)


def _relation_mitm(b: tuple[int, ...], k: int) -> bool:
    """Meet-in-the-middle relation search; exact, used for wide coefficient boxes."""
    half = (len(b) + 1) // 2
    left, right = b[:half], b[half:]
    rng = range(-k, k + 1)

    def sums(part: tuple[int, ...]) -> Counter[int]:
        out: Counter[int] = Counter()
        for c in itertools.product(rng, repeat=len(part)):
            out[sum(ci * bi for ci, bi in zip(c, part))] += 1
        return out

    left_sums = sums(left)
    right_sums = sums(right)
    # zero achieved by a nonzero half-vector (the all-zero vector contributes 1)
    if left_sums[0] > 1 or right_sums[0] > 1:
        return True
    return any(s != 0 and -s in right_sums for s in left_sums)


def in_e_set(t: FormTuple, param: FilterParameter, table: FactorTable) -> bool:
    """Whether ``t`` passes all three filters (fails every exclusion condition)."""
    return (
        not has_large_prime_power(t.bases, param, table)
        and not has_smooth_base(t.bases, param, table)
        and not has_bounded_relation(t.exps, param)
    )


def count_e_set(
    bounds: Bounds,
    param: FilterParameter,
    table: FactorTable,
    budget: int = 10**8,
) -> tuple[int, float]:
    """Exact size of the e-set in the box, with its density against 2**n * prod(A_i B_i).

    Conditions 1 and 2 touch only the bases and condition 3 only the exponents,
    so the count factors as (#admissible base tuples) * (#admissible exponent
    tuples); both factors are enumerated exhaustively.
    """
    space = bounds.tuple_space()
    if space > budget:
        raise BudgetError(f"tuple space {space} exceeds enumeration budget {budget}")
    base_ranges = [range(1, a + 1) for a in bounds.base_max]
    good_bases = sum(
        1
        for bases in itertools.product(*base_ranges)
        if not has_large_prime_power(bases, param, table)
        and not has_smooth_base(bases, param, table)
    )
    exp_ranges = [range(-bm, bm + 1) for bm in bounds.exp_max]
    good_exps = sum(
        1 for exps in itertools.product(*exp_ranges) if not has_bounded_relation(exps, param)
    )
    count = good_bases * good_exps
    denom = 2**bounds.n * math.prod(
        a * bm for a, bm in zip(bounds.base_max, bounds.exp_max)
    )
    return count, count / denom
