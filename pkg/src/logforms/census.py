"""Exhaustive ground truth for the power-product census.

Everything here is exact: ``count_distinct_rationals`` enumerates the full
box of (bases, exponents) tuples and counts distinct product values;
``verify_unique_representation`` checks that equal values inside the filtered
representative set only arise from coordinate reorderings; the permissibility
helpers measure how much of the box a coordinate permutation preserves; and
``convergence_run`` sweeps a scale sequence comparing exact counts against
the leading-term formulas.

The default enumeration strategy maps every tuple to an integer key that is
injective on product values: each prime up to max(A_i) gets a bit lane wide
enough that no signed combination of exponents in the box can reach half the
lane capacity, so equal keys mean equal rationals and vice versa.  A second,
deliberately independent strategy ("sorted") re-derives each value's full
prime factorization and deduplicates by sorting the serialized forms; the two
must agree exactly and the test suite holds them to that.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Bounds,
    BudgetError,
    CanonicalRational,
    ConfigError,
    FactorTable,
    FormTuple,
    Permutation,
    build_factor_table,
    canonical_form,
    factorize,
    is_possible,
)
from .conditions import (
    FilterParameter,
    count_e_set,
    default_cutoff,
    has_bounded_relation,
    has_large_prime_power,
    has_smooth_base,
)
from .asymptotics import main_term, separated_leading_term, symmetric_leading_term

__all__ = [
    "CensusReport",
    "OrbitViolation",
    "ConvergenceResult",
    "count_distinct_rationals",
    "verify_unique_representation",
    "related_by_permutation",
    "possible_count",
    "permissibility_closed_form",
    "permissibility_fraction",
    "run_census",
    "convergence_run",
]

_SAMPLE_SIZE = 100_000


@dataclass(frozen=True)
class CensusReport:
    """Exact census of one box against a leading-term formula."""

    bounds: Bounds
    tuple_space: int
    exact_count: int
    formula_value: float
    ratio: float
    e_count: int | None
    elapsed: float


@dataclass(frozen=True)
class OrbitViolation:
    """Two filtered representatives of one value not related by reordering."""

    value: CanonicalRational
    first: FormTuple
    second: FormTuple


@dataclass(frozen=True)
class ConvergenceResult:
    """Census reports along a scale sequence; truncated_at is the first
    scale whose box exceeded the enumeration budget, if any."""

    reports: tuple[CensusReport, ...]
    truncated_at: int | None


def _usable_table(table: FactorTable | None, limit: int) -> FactorTable:
    if table is None or table.limit < limit:
        return build_factor_table(limit)
    return table


def _packed_strides(bounds: Bounds, table: FactorTable) -> list[int]:
    """packed[a] = prime-exponent vector of a, one bit lane per prime.

    The widest signed lane value reachable in the box is bounded by
    max_lane = sum_i B_i * (bitlen(A_i) - 1), since no prime exponent of a
    single base a <= A_i exceeds log2(A_i).  With lane width
    max_lane.bit_length() + 1 every lane stays strictly inside +-2**(w-1),
    and an integer whose base-2**w digits all lie strictly inside half the
    radix determines those digits uniquely, so key equality is exactly
    product-value equality.
    """
    limit = max(bounds.base_max)
    lane_of = {p: k for k, p in enumerate(table.primes()) if p <= limit}
    max_lane = sum(
        b * (a.bit_length() - 1) for a, b in zip(bounds.base_max, bounds.exp_max)
    )
    lane_bits = max_lane.bit_length() + 1
    packed = [0] * (limit + 1)
    for a in range(2, limit + 1):
        acc = 0
        for p, e in factorize(a, table):
            acc += e << (lane_bits * lane_of[p])
        packed[a] = acc
    return packed


def _collect_keys(
    bounds: Bounds,
    packed: list[int],
    first_bases: list[int] | range,
    half_space: bool,
) -> set[int]:
    """Distinct value keys over the box, first coordinate's base restricted.

    With ``half_space`` only exponent tuples whose leading nonzero exponent
    (among coordinates with base > 1) is positive are walked.  Negating all
    exponents negates the key and keeps the tuple in the box, so the full key
    set is the union of this half with its negation; callers reassemble the
    total count from that.
    """
    n = bounds.n
    exp_max = bounds.exp_max
    keys: set[int] = set()
    add = keys.add

    def walk(i: int, partial: int, free_sign: bool) -> None:
        a_values = (
            first_bases if i == 0 else range(1, bounds.base_max[i] + 1)
        )
        bmax = exp_max[i]
        last = i == n - 1
        for a in a_values:
            pa = packed[a]
            if pa == 0:
                # base 1 contributes nothing for any exponent
                if last:
                    add(partial)
                else:
                    walk(i + 1, partial, free_sign)
            elif free_sign:
                if last:
                    add(partial)
                    val = partial
                    for _ in range(bmax):
                        val += pa
                        add(val)
                else:
                    walk(i + 1, partial, True)
                    val = partial
                    for _ in range(bmax):
                        val += pa
                        walk(i + 1, val, False)
            else:
                val = partial - bmax * pa
                if last:
                    for _ in range(2 * bmax + 1):
                        add(val)
                        val += pa
                else:
                    for _ in range(2 * bmax + 1):
                        walk(i + 1, val, False)
                        val += pa

    walk(0, 0, half_space)
    return keys


def _census_worker(
    base_max: tuple[int, ...],
    exp_max: tuple[int, ...],
    first_bases: list[int],
    half_space: bool,
) -> set[int]:
    bounds = Bounds(base_max, exp_max)
    table = build_factor_table(max(base_max))
    packed = _packed_strides(bounds, table)
    return _collect_keys(bounds, packed, first_bases, half_space)


def _count_sorted(bounds: Bounds, table: FactorTable) -> int:
    """Independent census route: serialize every tuple's factored value,
    sort, and count runs.  Shares no dedup machinery with the key path."""
    encodings: list[bytes] = []
    base_ranges = [range(1, a + 1) for a in bounds.base_max]
    exp_ranges = [range(-b, b + 1) for b in bounds.exp_max]
    for bases in itertools.product(*base_ranges):
        for exps in itertools.product(*exp_ranges):
            form = canonical_form(FormTuple(bases, exps), table)
            encodings.append(form.encode())
    encodings.sort()
    return sum(
        1 for k, enc in enumerate(encodings) if k == 0 or enc != encodings[k - 1]
    )


def count_distinct_rationals(
    bounds: Bounds,
    table: FactorTable | None = None,
    *,
    budget: int = 10**8,
    strategy: str = "set",
    threads: int = 1,
    sign_symmetry: bool = False,
) -> int:
    """Exact number of distinct rationals a_1**b_1 * ... * a_n**b_n in the box.

    ``strategy="set"`` hashes injective integer keys; ``strategy="sorted"``
    is the independent sort-and-scan route (single-threaded, full box).
    ``sign_symmetry`` walks only the positive-leading-exponent half of the
    box and reconstructs the count as 2*|half| - |self-reciprocal values|,
    exact because value sets are closed under reciprocals here.
    ``threads`` > 1 partitions the first coordinate's bases across processes.
    """
    space = bounds.tuple_space()
    if space > budget:
        raise BudgetError(f"tuple space {space} exceeds budget {budget}")
    table = _usable_table(table, max(bounds.base_max))
    if strategy == "sorted":
        if threads != 1 or sign_symmetry:
            raise ValueError("sorted strategy runs single-threaded on the full box")
        return _count_sorted(bounds, table)
    if strategy != "set":
        raise ValueError(f"unknown strategy {strategy!r}")

    if threads <= 1:
        packed = _packed_strides(bounds, table)
        keys = _collect_keys(
            bounds, packed, range(1, bounds.base_max[0] + 1), sign_symmetry
        )
    else:
        chunks = [
            list(range(1 + w, bounds.base_max[0] + 1, threads))
            for w in range(threads)
        ]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [
                pool.submit(
                    _census_worker,
                    bounds.base_max,
                    bounds.exp_max,
                    chunk,
                    sign_symmetry,
                )
                for chunk in chunks
            ]
            keys = set()
            for future in futures:
                keys |= future.result()
    if not sign_symmetry:
        return len(keys)
    self_paired = sum(1 for k in keys if -k in keys)
    return 2 * len(keys) - self_paired


def verify_unique_representation(
    bounds: Bounds,
    table: FactorTable | None = None,
    *,
    param: FilterParameter | None = None,
    budget: int = 10**8,
) -> list[OrbitViolation]:
    """Check that equal values in the filtered set come from reorderings only.

    Builds the filtered set (tuples passing none of the three exclusion
    conditions), groups members by exact value, and inside each group
    partitions by the multiset of (base, exponent) coordinate pairs.  Two
    members in different partitions share a value without any permutation
    relating them; each such group yields one violation.  Returns all
    violations found -- the expected result is an empty list.
    """
    space = bounds.tuple_space()
    if space > budget:
        raise BudgetError(f"tuple space {space} exceeds budget {budget}")
    table = _usable_table(table, max(bounds.base_max))
    if param is None:
        param = default_cutoff(bounds)

    good_bases = [
        bases
        for bases in itertools.product(*(range(1, a + 1) for a in bounds.base_max))
        if not has_large_prime_power(bases, param, table)
        and not has_smooth_base(bases, param, table)
    ]
    good_exps = [
        exps
        for exps in itertools.product(*(range(-b, b + 1) for b in bounds.exp_max))
        if not has_bounded_relation(exps, param)
    ]

    packed = _packed_strides(bounds, table)
    groups: dict[int, list[tuple[int, int]]] = {}
    for bi, bases in enumerate(good_bases):
        strides = [packed[a] for a in bases]
        for ei, exps in enumerate(good_exps):
            key = sum(e * s for e, s in zip(exps, strides))
            groups.setdefault(key, []).append((bi, ei))

    violations: list[OrbitViolation] = []
    for members in groups.values():
        if len(members) < 2:
            continue
        orbits: dict[tuple[tuple[int, int], ...], tuple[int, int]] = {}
        for bi, ei in members:
            pairing = tuple(sorted(zip(good_bases[bi], good_exps[ei])))
            orbits.setdefault(pairing, (bi, ei))
        if len(orbits) > 1:
            (b1, e1), (b2, e2) = list(orbits.values())[:2]
            first = FormTuple(good_bases[b1], good_exps[e1])
            second = FormTuple(good_bases[b2], good_exps[e2])
            violations.append(
                OrbitViolation(canonical_form(first, table), first, second)
            )
    return violations


def related_by_permutation(first: FormTuple, second: FormTuple) -> Permutation | None:
    """A permutation sending the first tuple onto the second, or None.

    The returned permutation satisfies apply_permutation(first, sigma) ==
    second.
    """
    n = len(first.bases)
    if len(second.bases) != n:
        raise ValueError("tuples must have the same number of coordinates")
    used = [False] * n
    images = []
    for i in range(n):
        target = (second.bases[i], second.exps[i])
        for j in range(n):
            if not used[j] and (first.bases[j], first.exps[j]) == target:
                used[j] = True
                images.append(j)
                break
        else:
            return None
    return Permutation(tuple(images))


def possible_count(sigma: Permutation, bounds: Bounds) -> int:
    """How many box tuples the permutation keeps inside the box (full loop)."""
    count = 0
    base_ranges = [range(1, a + 1) for a in bounds.base_max]
    exp_ranges = [range(-b, b + 1) for b in bounds.exp_max]
    for bases in itertools.product(*base_ranges):
        for exps in itertools.product(*exp_ranges):
            if is_possible(sigma, FormTuple(bases, exps), bounds):
                count += 1
    return count


def permissibility_closed_form(sigma: Permutation, bounds: Bounds) -> Fraction:
    """Exact fraction of box tuples the permutation keeps inside the box.

    Coordinates are independent, so the fraction factors as
    prod_i min(A_sigma(i), A_i) * (2 min(B_sigma(i), B_i) + 1) over the box
    volume.
    """
    n = bounds.n
    if len(sigma.images) != n:
        raise ValueError("permutation size disagrees with bounds")
    numerator = 1
    denominator = 1
    for i in range(n):
        j = sigma.images[i]
        numerator *= min(bounds.base_max[j], bounds.base_max[i]) * (
            2 * min(bounds.exp_max[j], bounds.exp_max[i]) + 1
        )
        denominator *= bounds.base_max[i] * (2 * bounds.exp_max[i] + 1)
    return Fraction(numerator, denominator)


def permissibility_fraction(
    sigma: Permutation,
    bounds: Bounds,
    *,
    sample_budget: int = 10**6,
    seed: int | None = None,
) -> float:
    """Fraction of box tuples the permutation keeps inside the box.

    Exact (by full enumeration) when the box has at most ``sample_budget``
    tuples; otherwise a uniform sample of 100000 tuples drawn from ``seed``.
    """
    space = bounds.tuple_space()
    if space <= sample_budget:
        return possible_count(sigma, bounds) / space
    rng = random.Random(seed)
    hits = 0
    for _ in range(_SAMPLE_SIZE):
        bases = tuple(rng.randint(1, a) for a in bounds.base_max)
        exps = tuple(rng.randint(-b, b) for b in bounds.exp_max)
        if is_possible(sigma, FormTuple(bases, exps), bounds):
            hits += 1
    return hits / _SAMPLE_SIZE


def run_census(
    bounds: Bounds,
    table: FactorTable | None = None,
    *,
    budget: int = 10**8,
    threads: int = 1,
    strategy: str = "set",
    sign_symmetry: bool = False,
    formula: float | None = None,
    param: FilterParameter | None = None,
) -> CensusReport:
    """Exact census of one box against a formula (the main term by default).

    The filtered-set size is included when a filter parameter is given or the
    default cutoff rule applies to the box, else left as None.
    """
    table = _usable_table(table, max(bounds.base_max))
    start = time.perf_counter()
    exact = count_distinct_rationals(
        bounds,
        table,
        budget=budget,
        strategy=strategy,
        threads=threads,
        sign_symmetry=sign_symmetry,
    )
    if formula is None:
        formula = main_term(bounds)
    if param is None:
        try:
            param = default_cutoff(bounds)
        except ConfigError:
            param = None
    e_count = (
        count_e_set(bounds, param, table, budget=budget)[0] if param is not None else None
    )
    elapsed = time.perf_counter() - start
    ratio = exact / formula if formula > 0 else math.inf
    return CensusReport(
        bounds=bounds,
        tuple_space=bounds.tuple_space(),
        exact_count=exact,
        formula_value=formula,
        ratio=ratio,
        e_count=e_count,
        elapsed=elapsed,
    )


def _shape_bounds(shape: str, scale: int, factors: int | None, base: Bounds | None):
    if shape == "equal":
        if factors is None:
            raise ConfigError("equal shape needs the number of factors")
        bounds = Bounds((scale,) * factors, (scale,) * factors)
        return bounds, symmetric_leading_term(factors, scale, scale)
    if shape == "separated":
        if factors is None:
            raise ConfigError("separated shape needs the number of factors")
        geometric = tuple(scale**i for i in range(1, factors + 1))
        bounds = Bounds(geometric, geometric)
        return bounds, separated_leading_term(bounds)
    if shape == "custom":
        if base is None:
            raise ConfigError("custom shape needs base bounds to scale")
        bounds = Bounds(
            tuple(a * scale for a in base.base_max),
            tuple(b * scale for b in base.exp_max),
        )
        return bounds, main_term(bounds)
    raise ConfigError(f"unknown shape {shape!r}")


def convergence_run(
    scales: tuple[int, ...] | list[int],
    shape: str,
    *,
    factors: int | None = None,
    base: Bounds | None = None,
    table: FactorTable | None = None,
    budget: int = 10**8,
    threads: int = 1,
) -> ConvergenceResult:
    """Census a scale sequence against the shape's leading-term formula.

    Shapes: ``equal`` uses A_i = B_i = s; ``separated`` uses A_i = B_i = s**i;
    ``custom`` multiplies the given base bounds by s and compares against the
    full main term.  A scale whose box exceeds the budget truncates the sweep
    and is reported in ``truncated_at``.
    """
    reports: list[CensusReport] = []
    truncated_at: int | None = None
    for scale in scales:
        bounds, formula = _shape_bounds(shape, scale, factors, base)
        try:
            report = run_census(
                bounds, table, budget=budget, threads=threads, formula=formula
            )
        except BudgetError:
            truncated_at = scale
            break
        reports.append(report)
    return ConvergenceResult(tuple(reports), truncated_at)
