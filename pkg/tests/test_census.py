"""Brute-force rational census, uniqueness verification, and permissibility."""

import math
import random
from fractions import Fraction

import pytest

import logforms.census as census_module
from logforms import (
    Bounds,
    BudgetError,
    FilterParameter,
    FormTuple,
    Permutation,
    apply_permutation,
    canonical_form,
    convergence_run,
    count_distinct_rationals,
    is_possible,
    main_term,
    permissibility_closed_form,
    permissibility_fraction,
    possible_count,
    related_by_permutation,
    run_census,
    verify_unique_representation,
)


def _random_bounds(rng, max_space):
    while True:
        n = rng.randint(1, 3)
        bounds = Bounds(
            tuple(rng.randint(1, 30 if n == 1 else 12) for _ in range(n)),
            tuple(rng.randint(1, 4 if n < 3 else 2) for _ in range(n)),
        )
        if bounds.tuple_space() <= max_space:
            return bounds


class TestCountDistinctRationals:
    @pytest.mark.parametrize(
        "base_max,exp_max,expected",
        [
            ((2,), (1,), 3),  # 1/2, 1, 2
            ((3,), (1,), 5),
            ((1,), (5,), 1),  # all powers of 1 collapse
            ((10,), (3,), 47),
            ((4, 4), (2, 2), 47),
        ],
    )
    def test_examples(self, table_small, base_max, exp_max, expected):
        bounds = Bounds(base_max, exp_max)
        assert count_distinct_rationals(bounds, table_small) == expected

    def test_strategies_agree(self, table_small):
        rng = random.Random(123)
        for _ in range(12):
            bounds = _random_bounds(rng, 40_000)
            by_set = count_distinct_rationals(bounds, table_small, strategy="set")
            by_sort = count_distinct_rationals(bounds, table_small, strategy="sorted")
            assert by_set == by_sort

    def test_sign_symmetry_agrees(self, table_small):
        rng = random.Random(234)
        for _ in range(12):
            bounds = _random_bounds(rng, 40_000)
            plain = count_distinct_rationals(bounds, table_small)
            halved = count_distinct_rationals(
                bounds, table_small, sign_symmetry=True
            )
            assert plain == halved

    def test_threads_agree(self, table_small):
        bounds = Bounds((30, 25), (4, 3))
        plain = count_distinct_rationals(bounds, table_small)
        threaded = count_distinct_rationals(bounds, table_small, threads=2)
        assert plain == threaded == 14109

    def test_coordinate_order_is_irrelevant(self, table_small):
        rng = random.Random(345)
        for _ in range(10):
            n = rng.randint(2, 3)
            pairs = [(rng.randint(1, 10), rng.randint(1, 3)) for _ in range(n)]
            bounds = Bounds(
                tuple(a for a, _ in pairs), tuple(b for _, b in pairs)
            )
            rng.shuffle(pairs)
            shuffled = Bounds(
                tuple(a for a, _ in pairs), tuple(b for _, b in pairs)
            )
            assert count_distinct_rationals(
                bounds, table_small
            ) == count_distinct_rationals(shuffled, table_small)

    def test_monotone_in_box(self, table_small):
        rng = random.Random(456)
        for _ in range(10):
            bounds = _random_bounds(rng, 20_000)
            grown = Bounds(
                tuple(a + rng.randint(0, 2) for a in bounds.base_max),
                tuple(b + rng.randint(0, 1) for b in bounds.exp_max),
            )
            assert count_distinct_rationals(
                bounds, table_small
            ) <= count_distinct_rationals(grown, table_small)

    def test_budget_guard(self, table_small):
        with pytest.raises(BudgetError):
            count_distinct_rationals(
                Bounds((100, 100), (5, 5)), table_small, budget=10**4
            )

    def test_sorted_strategy_rejects_parallel_options(self, table_small):
        bounds = Bounds((5,), (2,))
        with pytest.raises(ValueError):
            count_distinct_rationals(
                bounds, table_small, strategy="sorted", threads=2
            )
        with pytest.raises(ValueError):
            count_distinct_rationals(
                bounds, table_small, strategy="sorted", sign_symmetry=True
            )
        with pytest.raises(ValueError):
            count_distinct_rationals(bounds, table_small, strategy="typo")


class TestVerifyUniqueRepresentation:
    def test_no_violations_on_reference_box(self, table_small):
        assert verify_unique_representation(Bounds((50, 60), (4, 5)), table_small) == []

    def test_no_violations_single_coordinate(self, table_small):
        assert verify_unique_representation(Bounds((40,), (6,)), table_small) == []

    def test_detects_collisions_when_filters_disabled(self, table_small, monkeypatch):
        # with every exclusion switched off, 2*3 and 6*1 collide at the value 6
        monkeypatch.setattr(
            census_module, "has_large_prime_power", lambda *a, **k: False
        )
        monkeypatch.setattr(census_module, "has_smooth_base", lambda *a, **k: False)
        monkeypatch.setattr(
            census_module, "has_bounded_relation", lambda *a, **k: False
        )
        violations = verify_unique_representation(
            Bounds((6, 6), (1, 1)),
            table_small,
            param=FilterParameter.from_cutoff(2.0),
        )
        assert violations
        seen = violations[0]
        first_value = math.prod(
            (Fraction(a) ** b for a, b in zip(seen.first.bases, seen.first.exps)),
            start=Fraction(1),
        )
        second_value = math.prod(
            (Fraction(a) ** b for a, b in zip(seen.second.bases, seen.second.exps)),
            start=Fraction(1),
        )
        assert first_value == second_value == seen.value.value()
        assert related_by_permutation(seen.first, seen.second) is None

    def test_budget_guard(self, table_small):
        with pytest.raises(BudgetError):
            verify_unique_representation(
                Bounds((50, 60), (4, 5)), table_small, budget=10**3
            )


class TestRelatedByPermutation:
    def test_recovers_a_relating_reordering(self):
        rng = random.Random(567)
        for _ in range(60):
            n = rng.randint(1, 5)
            t = FormTuple(
                tuple(rng.randint(1, 20) for _ in range(n)),
                tuple(rng.randint(-4, 4) for _ in range(n)),
            )
            images = list(range(n))
            rng.shuffle(images)
            sigma = Permutation(tuple(images))
            target = apply_permutation(t, sigma)
            found = related_by_permutation(t, target)
            assert found is not None
            assert apply_permutation(t, found) == target

    def test_unrelated_tuples(self):
        first = FormTuple((2, 3), (1, 1))
        second = FormTuple((6, 1), (1, 1))
        assert related_by_permutation(first, second) is None

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            related_by_permutation(FormTuple((2,), (1,)), FormTuple((2, 3), (1, 1)))


class TestPermissibility:
    def test_identity_is_certain(self):
        rng = random.Random(678)
        for _ in range(20):
            n = rng.randint(1, 4)
            bounds = Bounds(
                tuple(rng.randint(1, 15) for _ in range(n)),
                tuple(rng.randint(1, 5) for _ in range(n)),
            )
            identity = Permutation.identity(n)
            assert permissibility_closed_form(identity, bounds) == 1
            assert possible_count(identity, bounds) == bounds.tuple_space()

    def test_separated_swap_example(self):
        swap = Permutation((1, 0))
        bounds = Bounds((3, 30), (2, 40))
        assert permissibility_closed_form(swap, bounds) == Fraction(1, 162)
        assert possible_count(swap, bounds) == 225

    def test_closed_form_matches_exhaustive_count(self):
        rng = random.Random(789)
        for _ in range(25):
            n = rng.randint(1, 3)
            bounds = Bounds(
                tuple(rng.randint(1, 8) for _ in range(n)),
                tuple(rng.randint(1, 3) for _ in range(n)),
            )
            images = list(range(n))
            rng.shuffle(images)
            sigma = Permutation(tuple(images))
            assert permissibility_closed_form(sigma, bounds) == Fraction(
                possible_count(sigma, bounds), bounds.tuple_space()
            )

    def test_fraction_exact_when_space_is_small(self):
        swap = Permutation((1, 0))
        bounds = Bounds((3, 30), (2, 40))
        value = permissibility_fraction(swap, bounds)
        assert value == pytest.approx(1 / 162)

    def test_fraction_sampling_is_seeded(self):
        swap = Permutation((1, 0))
        bounds = Bounds((40, 50), (30, 40))  # space far above the sample budget
        first = permissibility_fraction(swap, bounds, sample_budget=10**3, seed=31)
        second = permissibility_fraction(swap, bounds, sample_budget=10**3, seed=31)
        other = permissibility_fraction(swap, bounds, sample_budget=10**3, seed=32)
        assert first == second
        exact = float(permissibility_closed_form(swap, bounds))
        assert abs(first - exact) < 0.05
        assert abs(other - exact) < 0.05

    def test_separated_swap_probability_decays(self):
        swap = Permutation((1, 0))
        values = [
            permissibility_closed_form(swap, Bounds((s, s * s), (s, s * s)))
            for s in (3, 4, 5)
        ]
        assert values[0] > values[1] > values[2]


class TestRunCensus:
    def test_report_fields(self, table_small):
        bounds = Bounds((20, 20), (2, 2))
        report = run_census(bounds, table_small)
        assert report.bounds == bounds
        assert report.tuple_space == 10_000
        assert report.exact_count == count_distinct_rationals(bounds, table_small)
        assert report.formula_value == pytest.approx(main_term(bounds))
        assert report.ratio == pytest.approx(
            report.exact_count / report.formula_value
        )
        assert report.e_count is not None
        assert report.elapsed >= 0.0

    def test_small_box_reports_no_filtered_count(self, table_small):
        # the default cutoff rule needs every bound above e**2 / 2 in log terms
        report = run_census(Bounds((5,), (3,)), table_small)
        assert report.e_count is None
        assert report.exact_count == count_distinct_rationals(
            Bounds((5,), (3,)), table_small
        )

    def test_custom_formula_value(self, table_small):
        bounds = Bounds((10, 10), (2, 2))
        report = run_census(bounds, table_small, formula=float(bounds.tuple_space()))
        assert report.formula_value == pytest.approx(float(bounds.tuple_space()))
        assert report.ratio == pytest.approx(report.exact_count / bounds.tuple_space())


class TestConvergenceRun:
    def test_equal_shape_scales(self, table_small):
        result = convergence_run((3, 5, 8), "equal", factors=2, table=table_small)
        assert result.truncated_at is None
        assert len(result.reports) == 3
        for scale, report in zip((3, 5, 8), result.reports):
            assert report.bounds == Bounds((scale, scale), (scale, scale))

    def test_separated_shape_scales(self, table_small):
        result = convergence_run((3, 4), "separated", factors=2, table=table_small)
        assert [r.bounds for r in result.reports] == [
            Bounds((3, 9), (3, 9)),
            Bounds((4, 16), (4, 16)),
        ]

    def test_custom_shape_scales(self, table_small):
        base = Bounds((4, 6), (2, 3))
        result = convergence_run(
            (1, 2), "custom", base=base, table=table_small
        )
        assert [r.bounds for r in result.reports] == [
            base,
            Bounds((8, 12), (4, 6)),
        ]

    def test_budget_truncates_run(self, table_small):
        result = convergence_run(
            (3, 40), "equal", factors=2, table=table_small, budget=10**4
        )
        assert result.truncated_at == 40
        assert len(result.reports) == 1
