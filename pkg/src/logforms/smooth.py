"""Exact smooth-number counts and envelope checks for the three filter conditions.

``smooth_count`` evaluates the classical count of y-smooth integers in [1, x]
exactly via a greatest-prime-factor sieve.  The per-condition counters return
how many base (or exponent) tuples in a box satisfy each exclusion filter from
:mod:`logforms.conditions`; each has a theoretical envelope it should stay
under (up to an absolute constant), evaluated by ``condition_bound``:

* condition 1: prod(A_i) * (ln C)**n / sqrt(C)
* condition 2: prod(A_i) * sum_i exp(-u_i / 2) with C**u_i = A_i
* condition 3: prod(B_i) * sum_i (9 ln C)**n / B_i

Counts are exact, never sampled.  Small boxes are enumerated directly; larger
one- and two-coordinate boxes use sieve masks and a divisor-lattice
inclusion-exclusion that agree with direct enumeration (property-tested).
"""

from __future__ import annotations

import itertools
import math
import weakref
from dataclasses import dataclass

import numpy as np

from .core import Bounds, BudgetError, FactorTable, factorize
from .conditions import (
    FilterParameter,
    has_bounded_relation,
    has_large_prime_power,
)

__all__ = [
    "ConditionReport",
    "smooth_count",
    "count_large_prime_power",
    "count_smooth_base",
    "count_bounded_relation",
    "condition_bound",
    "check_condition",
]

# Boxes at most this large are counted by literal tuple enumeration.
_DIRECT_LIMIT = 200_000

_gpf_cache: "weakref.WeakKeyDictionary[FactorTable, np.ndarray]" = weakref.WeakKeyDictionary()


def _greatest_prime_factors(table: FactorTable) -> np.ndarray:
    """gpf[m] = largest prime factor of m (gpf[0] = gpf[1] = 0), cached per table."""
    gpf = _gpf_cache.get(table)
    if gpf is None:
        gpf = np.zeros(table.limit + 1, dtype=np.int32)
        for p in table.primes():
            gpf[p::p] = p  # ascending primes, so the last write wins
        _gpf_cache[table] = gpf
    return gpf


def smooth_count(x: int, y: float, table: FactorTable) -> int:
    """Exact number of y-smooth integers in [1, x]; 1 is smooth for every y."""
    x = int(x)
    if x < 1:
        raise ValueError("x must be >= 1")
    if x > table.limit:
        raise ValueError(f"x = {x} exceeds factor table limit {table.limit}")
    gpf = _greatest_prime_factors(table)
    return int(np.count_nonzero(gpf[1 : x + 1] <= y))


def _min_bad_exponent(p: int, cutoff: float) -> int:
    """Smallest k >= 2 with p**k >= cutoff."""
    k = 2
    pk = p * p
    while pk < cutoff:
        k += 1
        pk *= p
    return k


def _bad_alone_mask(limit: int, cutoff: float, table: FactorTable) -> np.ndarray:
    """mask[a] = True iff the single base a already satisfies condition 1."""
    mask = np.zeros(limit + 1, dtype=bool)
    for p in range(2, math.isqrt(limit) + 1):
        if int(table.spf[p]) == p:
            q = p ** _min_bad_exponent(p, cutoff)
            if q <= limit:
                mask[q::q] = True
    return mask


def count_large_prime_power(
    bounds: Bounds,
    param: FilterParameter,
    table: FactorTable,
    *,
    budget: int = 10**8,
) -> int:
    """Exact count of base tuples in the box satisfying condition 1.

    Exponents never matter, so only the base box prod(A_i) is enumerated.
    One- and two-coordinate boxes use sieve masks and, for pairs, an
    inclusion-exclusion over the divisor demands each clean partner value
    places on the other coordinate; wider boxes are enumerated directly.
    """
    a_max = bounds.base_max
    space = math.prod(a_max)
    if bounds.n == 1:
        if a_max[0] > table.limit:
            raise ValueError("base bound exceeds factor table limit")
        mask = _bad_alone_mask(a_max[0], param.cutoff, table)
        return int(mask[1 : a_max[0] + 1].sum())
    if bounds.n == 2 and space > _DIRECT_LIMIT:
        return _count_pairs_large_prime_power(bounds, param, table)
    if space > budget:
        raise BudgetError(f"base space {space} exceeds budget {budget}")
    return sum(
        1
        for bases in itertools.product(*(range(1, a + 1) for a in a_max))
        if has_large_prime_power(bases, param, table)
    )


def _count_pairs_large_prime_power(
    bounds: Bounds, param: FilterParameter, table: FactorTable
) -> int:
    """Pair count for condition 1 without touching all prod(A) pairs.

    A pair is clean iff both members are clean alone and no prime's joint
    multiplicity reaches its bad exponent k_p.  Looping over the smaller
    coordinate, each clean value a imposes, at every prime p | a, the demand
    "partner multiplicity >= k_p - mult_p(a)" for a joint violation; the
    violating partners are counted by inclusion-exclusion over subsets of
    those prime demands, each term being a stride count over the clean mask.
    """
    cutoff = param.cutoff
    loop_i = 0 if bounds.base_max[0] <= bounds.base_max[1] else 1
    y_max = bounds.base_max[loop_i]
    x_max = bounds.base_max[1 - loop_i]
    if max(x_max, y_max) > table.limit:
        raise ValueError("base bound exceeds factor table limit")
    clean_x = ~_bad_alone_mask(x_max, cutoff, table)
    clean_x[0] = False
    clean_y = ~_bad_alone_mask(y_max, cutoff, table)

    stride_counts: dict[int, int] = {1: int(clean_x[1:].sum())}

    def clean_multiples(d: int) -> int:
        got = stride_counts.get(d)
        if got is None:
            got = int(clean_x[d::d].sum())
            stride_counts[d] = got
        return got

    clean_pairs = 0
    for a in range(1, y_max + 1):
        if not clean_y[a]:
            continue  # whole row is violating
        # signed subset products of the per-prime demands p**(k_p - mult_p(a))
        terms = [(1, 1)]
        for p, e in factorize(a, table):
            demand = p ** (_min_bad_exponent(p, cutoff) - e)
            terms.extend(
                (d * demand, -s) for d, s in list(terms) if d * demand <= x_max
            )
        clean_pairs += sum(s * clean_multiples(d) for d, s in terms)
    return x_max * y_max - clean_pairs


def count_smooth_base(
    bounds: Bounds, param: FilterParameter, table: FactorTable
) -> int:
    """Exact count of base tuples satisfying condition 2.

    The coordinates are independent, so the count of tuples with at least one
    smooth base is prod(A_i) - prod(A_i - smooth_count(A_i, C)).
    """
    smooth = [smooth_count(a, param.cutoff, table) for a in bounds.base_max]
    total = math.prod(bounds.base_max)
    none_smooth = math.prod(a - s for a, s in zip(bounds.base_max, smooth))
    return total - none_smooth


def count_bounded_relation(
    bounds: Bounds, param: FilterParameter, *, budget: int = 10**8
) -> int:
    """Exact count of exponent tuples in the box satisfying condition 3.

    Bases never matter, so only the exponent box prod(2 B_i + 1) is involved.
    For one coordinate only the zero vector qualifies.  For two coordinates the
    qualifying nonzero pairs are exactly the multiples of primitive directions
    (q, p) with both entries <= coeff_bound, which are disjoint families, so
    the count closes to a double sum of floor divisions.  Wider boxes are
    enumerated directly.
    """
    k = param.coeff_bound
    b_max = bounds.exp_max
    if bounds.n == 1:
        return 1 if k >= 1 else 0
    if bounds.n == 2:
        b1, b2 = b_max
        zeros = (2 * b1 + 1) + (2 * b2 + 1) - 1
        nonzero = 0
        for q in range(1, k + 1):
            for p in range(1, k + 1):
                if math.gcd(q, p) == 1:
                    # directions (+-q, p) with multiplier +-t
                    nonzero += 4 * min(b1 // q, b2 // p)
        return zeros + nonzero
    space = math.prod(2 * b + 1 for b in b_max)
    if space > budget:
        raise BudgetError(f"exponent space {space} exceeds budget {budget}")
    return sum(
        1
        for exps in itertools.product(*(range(-b, b + 1) for b in b_max))
        if has_bounded_relation(exps, param)
    )


def condition_bound(condition: int, bounds: Bounds, param: FilterParameter) -> float:
    """Theoretical envelope for the exact count of the given condition (1..3)."""
    n = bounds.n
    log_c = math.log(param.cutoff)
    if condition == 1:
        return math.prod(bounds.base_max) * log_c**n / math.sqrt(param.cutoff)
    if condition == 2:
        tail = sum(math.exp(-math.log(a) / log_c / 2.0) for a in bounds.base_max)
        return math.prod(bounds.base_max) * tail
    if condition == 3:
        tail = sum((9.0 * log_c) ** n / b for b in bounds.exp_max)
        return math.prod(bounds.exp_max) * tail
    raise ValueError(f"condition must be 1, 2 or 3, got {condition}")


@dataclass(frozen=True)
class ConditionReport:
    """Exact count of one condition against its envelope on one box."""

    condition: int
    exact_count: int
    bound_value: float
    ratio: float
    bounds: Bounds
    param: FilterParameter


def check_condition(
    condition: int,
    bounds: Bounds,
    param: FilterParameter,
    table: FactorTable,
    *,
    budget: int = 10**8,
) -> ConditionReport:
    """Measure one condition's exact count against its envelope."""
    if condition == 1:
        count = count_large_prime_power(bounds, param, table, budget=budget)
    elif condition == 2:
        count = count_smooth_base(bounds, param, table)
    elif condition == 3:
        count = count_bounded_relation(bounds, param, budget=budget)
    else:
        raise ValueError(f"condition must be 1, 2 or 3, got {condition}")
    bound = condition_bound(condition, bounds, param)
    return ConditionReport(condition, count, bound, count / bound, bounds, param)
