"""Leading-term formulas for the count of distinct bounded power products.

The central object is ``main_term``: the box [1, A_1] x ... x [-B_n, B_n] is
cut per coordinate into blocks along the sorted base bounds and the sorted
exponent bounds, every assignment of one (base block, exponent block) pair per
coordinate contributes the product of its block widths, and each contribution
is divided by the number of coordinate permutations that map the assignment
into itself-shaped assignments (a permanent of a 0/1 step matrix).  Summing
and scaling by 2**n (exponent sign choices) gives the polynomial that the
exact census approaches as the bounds grow.

Two closed forms bracket it: ``symmetric_leading_term`` (all bounds equal,
the n! symmetry is fully active) and ``separated_leading_term`` (bounds so
spread out that no permutation symmetry survives).  ``leading_term_envelope``
returns both brackets for arbitrary bounds.

All main-term arithmetic is exact (integers and fractions); callers receive
floats only from the convenience wrappers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import Bounds, ConfigError, Permutation

__all__ = [
    "OrderedBounds",
    "BlockIndex",
    "order_bounds",
    "constrained_perm_count",
    "permanent_brute",
    "permanent_ryser",
    "main_term",
    "main_term_exact",
    "symmetric_leading_term",
    "separated_leading_term",
    "leading_term_envelope",
]

# Brute-force permanent (n! scan) up to here; Ryser inclusion-exclusion above.
_BRUTE_MAX = 7
_RYSER_MAX = 20
# The main-term sum has up to (n!)**2 terms before zero-width pruning.
_MAIN_TERM_MAX = 10


@dataclass(frozen=True)
class OrderedBounds:
    """Bounds rearranged for block decomposition.

    ``base_sorted`` holds the base bounds in nondecreasing order and
    ``exp_by_base`` the exponent bounds carried along with their bases.
    ``exp_sort`` lists coordinate positions in nondecreasing ``exp_by_base``
    order, so ``exp_sorted`` is monotone.  ``sentinel`` is the width origin
    of the first block (1 for the literal formula, 0 for the full-width
    variant used in convergence studies).
    """

    base_sorted: tuple[int, ...]
    exp_by_base: tuple[int, ...]
    exp_sort: Permutation
    sentinel: int = 1

    def __post_init__(self) -> None:
        n = len(self.base_sorted)
        if len(self.exp_by_base) != n or len(self.exp_sort.images) != n:
            raise ValueError("component lengths disagree")
        if any(x > y for x, y in zip(self.base_sorted, self.base_sorted[1:])):
            raise ValueError("base bounds must be nondecreasing")
        if any(x > y for x, y in zip(self.exp_sorted, self.exp_sorted[1:])):
            raise ValueError("exp_sort must sort the exponent bounds")
        if self.sentinel not in (0, 1):
            raise ValueError("sentinel must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.base_sorted)

    @property
    def exp_sorted(self) -> tuple[int, ...]:
        """Exponent bounds in nondecreasing order."""
        return tuple(self.exp_by_base[m] for m in self.exp_sort.images)

    @property
    def exp_ranks(self) -> tuple[int, ...]:
        """1-based sorted position of each coordinate's exponent bound."""
        inv = self.exp_sort.inverse()
        return tuple(pos + 1 for pos in inv.images)


@dataclass(frozen=True)
class BlockIndex:
    """One block choice per coordinate; entries are 1-based.

    ``base_blocks[k]`` may not exceed k+1 (coordinate k+1 sees only the first
    k+1 base blocks); the matching exponent ceiling depends on OrderedBounds
    and is enforced where the two meet.
    """

    base_blocks: tuple[int, ...]
    exp_blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.base_blocks)
        if len(self.exp_blocks) != n:
            raise ValueError("component lengths disagree")
        for k, (i, j) in enumerate(zip(self.base_blocks, self.exp_blocks), start=1):
            if not 1 <= i <= k:
                raise ValueError(f"base block {i} out of range 1..{k}")
            if not 1 <= j <= n:
                raise ValueError(f"exp block {j} out of range 1..{n}")


def order_bounds(bounds: Bounds, *, sentinel: int = 1) -> OrderedBounds:
    """Sort the bounds for block decomposition; ties keep original order."""
    n = bounds.n
    by_base = sorted(range(n), key=lambda m: bounds.base_max[m])
    base_sorted = tuple(bounds.base_max[m] for m in by_base)
    exp_by_base = tuple(bounds.exp_max[m] for m in by_base)
    by_exp = sorted(range(n), key=lambda m: exp_by_base[m])
    return OrderedBounds(base_sorted, exp_by_base, Permutation(tuple(by_exp)), sentinel)


def permanent_brute(matrix: list[tuple[int, ...]] | tuple[tuple[int, ...], ...]) -> int:
    """Permanent by full scan of all row-to-column assignments."""
    rows = [tuple(row) for row in matrix]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    total = 0
    for cols in itertools.permutations(range(n)):
        prod = 1
        for l, m in enumerate(cols):
            prod *= rows[l][m]
            if prod == 0:
                break
        total += prod
    return total


def permanent_ryser(matrix: list[tuple[int, ...]] | tuple[tuple[int, ...], ...]) -> int:
    """Exact permanent via Ryser's inclusion-exclusion over column subsets.

    Subsets are visited in Gray-code order so each step updates the running
    row sums by a single column, O(2**n * n) total.
    """
    rows = [tuple(row) for row in matrix]
    n = len(rows)
    if n == 0:
        return 1
    if any(len(row) != n for row in rows):
        raise ValueError("matrix must be square")
    if n > _RYSER_MAX:
        raise ConfigError(f"permanent limited to {_RYSER_MAX}x{_RYSER_MAX} matrices")
    sums = [0] * n
    total = 0
    prev = 0
    for g in range(1, 1 << n):
        gray = g ^ (g >> 1)
        flipped = gray ^ prev
        col = flipped.bit_length() - 1
        if gray & flipped:
            for l in range(n):
                sums[l] += rows[l][col]
        else:
            for l in range(n):
                sums[l] -= rows[l][col]
        prod = 1
        for s in sums:
            prod *= s
            if prod == 0:
                break
        if prod:
            # term sign is (-1)**(n - |S|)
            total += prod if (n + gray.bit_count()) % 2 == 0 else -prod
        prev = gray
    return total


@lru_cache(maxsize=None)
def _perm_count_cached(columns: tuple[tuple[int, int], ...], ranks: tuple[int, ...]) -> int:
    # The count is the permanent of M[l][m] = [i_m <= l+1][j_m <= ranks[l]],
    # invariant under column order, hence the sorted-columns cache key.
    n = len(columns)
    rows = tuple(
        tuple(int(i <= l + 1 and j <= ranks[l]) for i, j in columns) for l in range(n)
    )
    if n <= _BRUTE_MAX:
        return permanent_brute(rows)
    return permanent_ryser(rows)


def constrained_perm_count(block: BlockIndex, ordered: OrderedBounds) -> int:
    """Number of coordinate permutations compatible with a block assignment.

    Counts bijections sigma with base_blocks[sigma(l)] <= l and
    exp_blocks[sigma(l)] <= exp rank of l, for every coordinate l (1-based).
    At least 1 for any block index valid for these bounds: the identity
    always qualifies.
    """
    n = ordered.n
    if len(block.base_blocks) != n:
        raise ValueError("block index size disagrees with bounds")
    ranks = ordered.exp_ranks
    for k, j in enumerate(block.exp_blocks):
        if j > ranks[k]:
            raise ValueError(f"exp block {j} exceeds rank {ranks[k]} at coordinate {k + 1}")
    columns = tuple(sorted(zip(block.base_blocks, block.exp_blocks)))
    return _perm_count_cached(columns, ranks)


def main_term_exact(bounds: Bounds, *, full_first_block: bool = False) -> Fraction:
    """Exact value of the block-decomposition counting polynomial.

    With ``full_first_block`` the first block in each direction starts at 0
    instead of 1, an asymptotically equivalent variant whose value is the
    plain product bound when n = 1.
    """
    n = bounds.n
    if n > _MAIN_TERM_MAX:
        raise ConfigError(f"main term limited to {_MAIN_TERM_MAX} coordinates")
    ordered = order_bounds(bounds, sentinel=0 if full_first_block else 1)
    base_edges = (ordered.sentinel,) + ordered.base_sorted
    exp_edges = (ordered.sentinel,) + ordered.exp_sorted
    base_widths = [base_edges[k] - base_edges[k - 1] for k in range(1, n + 1)]
    exp_widths = [exp_edges[k] - exp_edges[k - 1] for k in range(1, n + 1)]
    ranks = ordered.exp_ranks

    total = Fraction(0)
    base_choice = [0] * n
    exp_choice = [0] * n

    def accumulate(k: int, numerator: int) -> None:
        nonlocal total
        if k == n:
            columns = tuple(sorted(zip(base_choice, exp_choice)))
            total += Fraction(numerator, _perm_count_cached(columns, ranks))
            return
        for i in range(1, k + 2):  # base block for coordinate k+1 (1-based)
            wa = base_widths[i - 1]
            if wa == 0:
                continue
            base_choice[k] = i
            for j in range(1, ranks[k] + 1):
                wb = exp_widths[j - 1]
                if wb == 0:
                    continue
                exp_choice[k] = j
                accumulate(k + 1, numerator * wa * wb)

    accumulate(0, 1)
    return 2**n * total


def main_term(bounds: Bounds, *, full_first_block: bool = False) -> float:
    """Float convenience wrapper over ``main_term_exact``."""
    return float(main_term_exact(bounds, full_first_block=full_first_block))


def symmetric_leading_term(n: int, base_max: float, exp_max: float) -> float:
    """Leading form 2**n A**n B**n / n! for n equal bound pairs (A, B)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2.0**n * float(base_max) ** n * float(exp_max) ** n / math.factorial(n)


def separated_leading_term(bounds: Bounds) -> float:
    """Leading form 2**n prod(A_i B_i) for strongly separated bounds."""
    return float(
        2**bounds.n * math.prod(bounds.base_max) * math.prod(bounds.exp_max)
    )


def leading_term_envelope(bounds: Bounds) -> tuple[float, float]:
    """(lower, upper) bracket for the main term: upper / n! and upper."""
    upper = 2**bounds.n * math.prod(bounds.base_max) * math.prod(bounds.exp_max)
    return float(Fraction(upper, math.factorial(bounds.n))), float(upper)
