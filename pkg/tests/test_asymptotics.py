"""Block-sum main term, permanents, and leading-order envelopes."""

import itertools
import math
import random
from fractions import Fraction

import pytest

from logforms import (
    BlockIndex,
    Bounds,
    ConfigError,
    OrderedBounds,
    Permutation,
    constrained_perm_count,
    leading_term_envelope,
    main_term,
    main_term_exact,
    order_bounds,
    permanent_brute,
    permanent_ryser,
    separated_leading_term,
    symmetric_leading_term,
)


class TestOrderBounds:
    def test_sorts_bases_and_carries_exponents(self):
        ordered = order_bounds(Bounds((5, 3), (2, 9)))
        assert ordered.base_sorted == (3, 5)
        assert ordered.exp_by_base == (9, 2)
        assert ordered.exp_sort.images == (1, 0)
        assert ordered.exp_ranks == (2, 1)

    def test_sorted_bases_with_descending_exponents(self):
        ordered = order_bounds(Bounds((2, 8), (9, 3)))
        assert ordered.base_sorted == (2, 8)
        assert ordered.exp_by_base == (9, 3)
        assert ordered.exp_ranks == (2, 1)

    def test_ties_keep_identity_order(self):
        ordered = order_bounds(Bounds((4, 4, 4), (7, 7, 7)))
        assert ordered.exp_sort.images == (0, 1, 2)
        assert ordered.exp_ranks == (1, 2, 3)

    def test_exp_sorted_is_ascending(self):
        rng = random.Random(111)
        for _ in range(50):
            n = rng.randint(1, 5)
            bounds = Bounds(
                tuple(rng.randint(2, 40) for _ in range(n)),
                tuple(rng.randint(1, 9) for _ in range(n)),
            )
            ordered = order_bounds(bounds)
            assert list(ordered.base_sorted) == sorted(bounds.base_max)
            assert list(ordered.exp_sorted) == sorted(bounds.exp_max)
            assert sorted(ordered.exp_ranks) == list(range(1, n + 1))

    def test_block_index_validation(self):
        with pytest.raises(ValueError):
            BlockIndex((1, 3), (1, 1))  # second base block may be at most 2
        with pytest.raises(ValueError):
            BlockIndex((1, 1), (0, 1))


class TestPermanents:
    def test_examples(self):
        assert permanent_brute(((1,),)) == 1
        assert permanent_brute(((1, 1), (1, 1))) == 2
        assert permanent_brute(((1, 1, 1),) * 3) == 6
        assert permanent_brute(((1, 1), (0, 1))) == 1

    def test_ryser_matches_brute(self):
        rng = random.Random(222)
        for n in range(1, 8):
            for _ in range(30):
                matrix = tuple(
                    tuple(rng.randint(0, 1) for _ in range(n)) for _ in range(n)
                )
                assert permanent_ryser(matrix) == permanent_brute(matrix)

    def test_ryser_size_cap(self):
        matrix = ((1,) * 21,) * 21
        with pytest.raises(ConfigError):
            permanent_ryser(matrix)


class TestConstrainedPermCount:
    @pytest.fixture()
    def ordered3(self):
        return order_bounds(Bounds((2, 4, 8), (2, 4, 8)))

    def test_unconstrained_block_counts_all(self, ordered3):
        assert constrained_perm_count(BlockIndex((1, 1, 1), (1, 1, 1)), ordered3) == 6

    def test_diagonal_block_forces_identity(self, ordered3):
        assert constrained_perm_count(BlockIndex((1, 2, 3), (1, 2, 3)), ordered3) == 1

    def test_mixed_block(self, ordered3):
        assert constrained_perm_count(BlockIndex((1, 2, 2), (1, 1, 2)), ordered3) == 2

    def test_matches_direct_permutation_scan(self):
        rng = random.Random(333)
        for _ in range(60):
            n = rng.randint(1, 5)
            bounds = Bounds(
                tuple(rng.randint(2, 30) for _ in range(n)),
                tuple(rng.randint(1, 9) for _ in range(n)),
            )
            ordered = order_bounds(bounds)
            base_blocks = (1,) + tuple(rng.randint(1, k) for k in range(2, n + 1))
            exp_blocks = tuple(
                rng.randint(1, ordered.exp_ranks[k]) for k in range(n)
            )
            block = BlockIndex(base_blocks, exp_blocks)
            count = constrained_perm_count(block, ordered)
            scan = 0
            for sigma in itertools.permutations(range(1, n + 1)):
                if all(
                    base_blocks[m] <= sigma[m]
                    and exp_blocks[m] <= ordered.exp_ranks[sigma[m] - 1]
                    for m in range(n)
                ):
                    scan += 1
            assert count == scan
            assert count >= 1

    def test_rejects_block_outside_rank(self):
        ordered = order_bounds(Bounds((2, 8), (9, 3)))  # exp_ranks (2, 1)
        with pytest.raises(ValueError):
            constrained_perm_count(BlockIndex((1, 1), (1, 2)), ordered)


class TestMainTerm:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("base,exp", [(5, 4), (10, 7)])
    def test_equal_bounds_identity(self, n, base, exp):
        value = main_term_exact(Bounds((base,) * n, (exp,) * n))
        expected = Fraction(2**n * ((base - 1) * (exp - 1)) ** n, math.factorial(n))
        assert value == expected

    def test_single_coordinate(self):
        assert main_term_exact(Bounds((9,), (4,))) == 2 * 8 * 3
        assert main_term_exact(Bounds((9,), (4,)), full_first_block=True) == 2 * 9 * 4

    def test_hand_worked_pair(self):
        assert main_term_exact(Bounds((2, 8), (9, 3))) == 440

    def test_pair_closed_form(self):
        rng = random.Random(444)
        for _ in range(60):
            bounds = Bounds(
                (rng.randint(2, 30), rng.randint(2, 30)),
                (rng.randint(2, 12), rng.randint(2, 12)),
            )
            lo_a, hi_a = sorted(x - 1 for x in bounds.base_max)
            lo_b, hi_b = sorted(x - 1 for x in bounds.exp_max)
            expected = (
                4 * Fraction(lo_a * lo_b) * (hi_a * hi_b - Fraction(lo_a * lo_b, 2))
            )
            assert main_term_exact(bounds) == expected

    def test_relabel_invariance(self):
        rng = random.Random(555)
        for _ in range(40):
            n = rng.randint(2, 5)
            pairs = [
                (rng.randint(2, 20), rng.randint(1, 8)) for _ in range(n)
            ]
            value = main_term_exact(
                Bounds(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))
            )
            rng.shuffle(pairs)
            shuffled = main_term_exact(
                Bounds(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))
            )
            assert value == shuffled

    def test_exact_sandwich(self):
        rng = random.Random(666)
        for _ in range(40):
            n = rng.randint(1, 5)
            bounds = Bounds(
                tuple(rng.randint(2, 25) for _ in range(n)),
                tuple(rng.randint(2, 9) for _ in range(n)),
            )
            value = main_term_exact(bounds)
            shrunk = 2**n * math.prod(
                (a - 1) * (b - 1) for a, b in zip(bounds.base_max, bounds.exp_max)
            )
            assert Fraction(shrunk, math.factorial(n)) <= value <= shrunk

    def test_full_first_block_equal_bounds(self):
        for n in (1, 2, 3):
            for base, exp in [(5, 4), (7, 3)]:
                value = main_term_exact(
                    Bounds((base,) * n, (exp,) * n), full_first_block=True
                )
                assert value == Fraction(2**n * (base * exp) ** n, math.factorial(n))

    def test_float_wrapper(self):
        bounds = Bounds((2, 8), (9, 3))
        assert main_term(bounds) == pytest.approx(440.0)

    def test_size_cap(self):
        with pytest.raises(ConfigError):
            main_term_exact(Bounds((3,) * 11, (2,) * 11))


class TestLeadingTerms:
    def test_symmetric_example(self):
        assert symmetric_leading_term(2, 10, 10) == pytest.approx(20000.0)
        assert symmetric_leading_term(3, 2, 2) == pytest.approx(2**3 * 4**3 / 6)

    def test_separated_example(self):
        assert separated_leading_term(Bounds((3, 30), (2, 40))) == pytest.approx(
            28800.0
        )

    def test_envelope_brackets_main_term_asymptotically(self):
        # widely separated boxes drive the block sum toward its upper leading form
        previous = 0.0
        for scale in (4, 8, 16, 32):
            bounds = Bounds((scale, scale**2), (scale, scale**2))
            low, high = leading_term_envelope(bounds)
            ratio = main_term(bounds) / high
            assert low == pytest.approx(high / 2)
            assert ratio > previous
            previous = ratio
        assert previous > 0.9

    def test_envelope_collapses_for_single_coordinate(self):
        low, high = leading_term_envelope(Bounds((12,), (5,)))
        assert low == high == pytest.approx(2 * 12 * 5)
