"""Factorization infrastructure and canonical forms for products of integer powers.

A form tuple pairs bases (a_1, ..., a_n) with signed exponents (b_1, ..., b_n)
and represents the positive rational a_1**b_1 * ... * a_n**b_n.  Two tuples
represent the same rational exactly when their prime/exponent vectors agree,
so the canonical form -- the sorted tuple of (prime, nonzero exponent) pairs --
doubles as the deduplication key for the exact enumeration in
:mod:`logforms.census`.

Exponent arithmetic uses plain Python integers, which cannot overflow, so no
width guard is needed anywhere in this module.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "BudgetError",
    "ConfigError",
    "Bounds",
    "FormTuple",
    "CanonicalRational",
    "Permutation",
    "FactorTable",
    "build_factor_table",
    "factorize",
    "canonical_form",
    "apply_permutation",
    "is_possible",
]


class BudgetError(RuntimeError):
    """An operation would exceed its configured resource budget."""


class ConfigError(ValueError):
    """Parameters are structurally valid but outside the usable regime."""


# Hard cap on sieve size; above this the table would not fit comfortably in
# memory for a desk-scale run.
_SIEVE_CAP = 100_000_000


@dataclass(frozen=True)
class Bounds:
    """Box constraints: per-coordinate caps on bases and absolute exponents.

    Coordinate i ranges over bases 1 <= a_i <= base_max[i] and exponents
    |b_i| <= exp_max[i].
    """

    base_max: tuple[int, ...]
    exp_max: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_max", tuple(int(a) for a in self.base_max))
        object.__setattr__(self, "exp_max", tuple(int(b) for b in self.exp_max))
        if len(self.base_max) != len(self.exp_max):
            raise ValueError("base_max and exp_max must have equal length")
        if not self.base_max:
            raise ValueError("bounds need at least one coordinate")
        if any(a < 1 for a in self.base_max):
            raise ValueError("every base bound must be >= 1")
        if any(b < 1 for b in self.exp_max):
            raise ValueError("every exponent bound must be >= 1")

    @property
    def n(self) -> int:
        return len(self.base_max)

    def tuple_space(self) -> int:
        """Number of form tuples in the box: prod A_i * (2 B_i + 1)."""
        return math.prod(a * (2 * b + 1) for a, b in zip(self.base_max, self.exp_max))


@dataclass(frozen=True)
class FormTuple:
    """One representation: bases (a_1..a_n) with signed exponents (b_1..b_n)."""

    bases: tuple[int, ...]
    exps: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bases", tuple(int(a) for a in self.bases))
        object.__setattr__(self, "exps", tuple(int(b) for b in self.exps))
        if len(self.bases) != len(self.exps):
            raise ValueError("bases and exps must have equal length")
        if not self.bases:
            raise ValueError("form tuple needs at least one coordinate")
        if any(a < 1 for a in self.bases):
            raise ValueError("every base must be a positive integer")

    @property
    def n(self) -> int:
        return len(self.bases)

    def in_box(self, bounds: Bounds) -> bool:
        if self.n != bounds.n:
            return False
        return all(
            1 <= a <= amax and abs(b) <= bmax
            for a, amax, b, bmax in zip(self.bases, bounds.base_max, self.exps, bounds.exp_max)
        )

    @classmethod
    def checked(cls, bases: Sequence[int], exps: Sequence[int], bounds: Bounds) -> "FormTuple":
        """Construct a tuple and verify it lies inside ``bounds``."""
        t = cls(tuple(bases), tuple(exps))
        if not t.in_box(bounds):
            raise ValueError(f"tuple {t.bases}^{t.exps} outside box {bounds}")
        return t


@dataclass(frozen=True)
class CanonicalRational:
    """A positive rational as its sorted tuple of (prime, nonzero exponent) pairs.

    The empty tuple is the rational 1.  Equality of canonical forms is exactly
    equality of the represented rationals.
    """

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple((int(p), int(e)) for p, e in self.factors))
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e == 0:
                raise ValueError("zero exponents must be dropped")
            last = p

    def value(self) -> Fraction:
        out = Fraction(1)
        for p, e in self.factors:
            out *= Fraction(p) ** e
        return out

    def reciprocal(self) -> "CanonicalRational":
        return CanonicalRational(tuple((p, -e) for p, e in self.factors))

    def encode(self) -> bytes:
        """Fixed-order byte encoding: little-endian pair count, then (p, e) int64 pairs."""
        flat: list[int] = []
        for p, e in self.factors:
            flat.append(p)
            flat.append(e)
        return struct.pack(f"<I{len(flat)}q", len(self.factors), *flat)


@dataclass(frozen=True)
class Permutation:
    """A bijection on coordinate positions 0..n-1; images[i] is the image of i."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise ValueError(f"images {self.images} are not a bijection on 0..{n - 1}")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, img in enumerate(self.images):
            inv[img] = i
        return Permutation(tuple(inv))

    def compose(self, other: "Permutation") -> "Permutation":
        """Permutation r with r(i) = self(other(i)).

        Satisfies apply_permutation(apply_permutation(t, self), other)
        == apply_permutation(t, self.compose(other)).
        """
        if self.n != other.n:
            raise ValueError("cannot compose permutations of different sizes")
        return Permutation(tuple(self.images[j] for j in other.images))


class FactorTable:
    """Read-only smallest-prime-factor table for integers 2..limit.

    ``spf[m]`` is the smallest prime dividing m (and 0 for m < 2).  Built once,
    never mutated; safe to share across threads.
    """

    __slots__ = ("limit", "spf", "__weakref__")

    def __init__(self, limit: int, spf: np.ndarray):
        self.limit = limit
        self.spf = spf

    def primes(self) -> np.ndarray:
        """All primes <= limit, ascending."""
        idx = np.arange(self.limit + 1, dtype=self.spf.dtype)
        mask = (idx >= 2) & (self.spf == idx)
        return np.nonzero(mask)[0]

    def __repr__(self) -> str:  # pragma: no cover
        return f"FactorTable(limit={self.limit})"


def build_factor_table(limit: int, *, max_limit: int = _SIEVE_CAP) -> FactorTable:
    """Sieve smallest prime factors for every integer up to ``limit``.

    limit = 1 yields an empty table (there are no integers >= 2 to factor).
    """
    limit = int(limit)
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if limit > max_limit:
        raise BudgetError(f"sieve limit {limit} exceeds memory budget {max_limit}")
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    # remaining zeros at indices >= 2 are primes above sqrt(limit)
    rest = np.nonzero(spf == 0)[0]
    rest = rest[rest >= 2]
    spf[rest] = rest
    return FactorTable(limit, spf)


def factorize(m: int, table: FactorTable) -> tuple[tuple[int, int], ...]:
    """Prime factorization of m as ((p, multiplicity), ...) with primes ascending.

    factorize(1) is the empty tuple.
    """
    m = int(m)
    if m < 1:
        raise ValueError("can only factor positive integers")
    if m > table.limit:
        raise ValueError(f"{m} exceeds factor table limit {table.limit}")
    spf = table.spf
    out: list[tuple[int, int]] = []
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    return tuple(out)


def canonical_form(t: FormTuple, table: FactorTable) -> CanonicalRational:
    """Canonical form of the rational represented by ``t``.

    Exponents of each base's primes are scaled by the base's signed exponent
    and accumulated; primes whose net exponent is zero are dropped.
    """
    acc: dict[int, int] = {}
    for a, b in zip(t.bases, t.exps):
        if a == 1 or b == 0:
            continue
        for p, e in factorize(a, table):
            acc[p] = acc.get(p, 0) + b * e
    factors = tuple((p, acc[p]) for p in sorted(acc) if acc[p] != 0)
    return CanonicalRational(factors)


def apply_permutation(t: FormTuple, sigma: Permutation) -> FormTuple:
    """The reordered tuple u with u[i] = t[sigma(i)]."""
    if sigma.n != t.n:
        raise ValueError("permutation size does not match tuple size")
    img = sigma.images
    return FormTuple(
        tuple(t.bases[img[i]] for i in range(t.n)),
        tuple(t.exps[img[i]] for i in range(t.n)),
    )


def is_possible(sigma: Permutation, t: FormTuple, bounds: Bounds) -> bool:
    """Whether the reordering of ``t`` by ``sigma`` stays inside ``bounds``.

    True iff for every i: t.bases[sigma(i)] <= base_max[i] and
    |t.exps[sigma(i)]| <= exp_max[i].
    """
    if not (sigma.n == t.n == bounds.n):
        raise ValueError("permutation, tuple and bounds must share one size")
    img = sigma.images
    return all(
        t.bases[img[i]] <= bounds.base_max[i] and abs(t.exps[img[i]]) <= bounds.exp_max[i]
        for i in range(t.n)
    )
