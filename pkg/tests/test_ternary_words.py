"""Words, subword statistics, cylinders, and measure bounds."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorapprox import ternary_words as tw
from cantorapprox.errors import ResourceCapExceeded
from cantorapprox.ternary_words import Cylinder, DigitWord

words = st.lists(st.sampled_from([0, 2]), min_size=1, max_size=24).map(
    lambda ds: DigitWord(tuple(ds))
)


def W(s: str) -> DigitWord:
    return DigitWord.from_string(s)


class TestDigitWord:
    def test_rejects_bad_symbols(self):
        with pytest.raises(ValueError):
            DigitWord((0, 1, 2))

    def test_bits_round_trip(self):
        w = W("02202")
        assert DigitWord.from_bits(w.bits(), len(w)) == w

    def test_concat_and_slice(self):
        assert str(W("02") + W("20")) == "0220"
        assert W("0220")[1:3] == W("22")


class TestComplexity:
    @pytest.mark.parametrize(
        "w,t,expect",
        [("0202", 1, 2), ("0000", 2, 1), ("0220", 2, 3)],
    )
    def test_examples(self, w, t, expect):
        assert tw.complexity(W(w), t) == expect

    def test_range_errors(self):
        with pytest.raises(ValueError):
            tw.complexity(W("02"), 0)
        with pytest.raises(ValueError):
            tw.complexity(W("02"), 3)

    @given(words, st.data())
    @settings(max_examples=150)
    def test_refinement_monotonicity(self, w, data):
        # C_{k'} >= C_k - (k' - k) for k < k' <= len(w)
        if len(w) < 2:
            return
        k = data.draw(st.integers(1, len(w) - 1))
        k2 = data.draw(st.integers(k + 1, len(w)))
        assert tw.complexity(w, k2) >= tw.complexity(w, k) - (k2 - k)

    def test_refinement_monotonicity_exhaustive_small(self):
        for n in range(2, 11):
            for w in tw.all_words(n):
                cs = [tw.complexity(w, k) for k in range(1, n + 1)]
                for k in range(1, n):
                    for k2 in range(k + 1, n + 1):
                        assert cs[k2 - 1] >= cs[k - 1] - (k2 - k)


class TestPairStatistic:
    @pytest.mark.parametrize(
        "w,k,expect",
        [("00", 1, 4), ("02", 1, 2), ("0220", 2, 3)],
    )
    def test_examples(self, w, k, expect):
        assert tw.pair_statistic(W(w), k) == expect

    @pytest.mark.parametrize("n,k,expect", [(2, 1, Fraction(3)), (4, 2, Fraction(9, 2))])
    def test_expectation_examples(self, n, k, expect):
        assert tw.expected_pair_statistic(n, k) == expect

    def test_expectation_n_equals_k(self):
        for n in range(1, 9):
            assert tw.expected_pair_statistic(n, n) == 1

    def test_expectation_matches_exhaustive_average(self):
        for n in range(1, 11):
            for k in range(1, min(n, 4) + 1):
                total = sum(tw.pair_statistic(w, k) for w in tw.all_words(n))
                assert Fraction(total, 2**n) == tw.expected_pair_statistic(n, k)

    def test_vectorized_total_matches_direct(self):
        for n, k in [(6, 2), (8, 3), (9, 1)]:
            direct = sum(tw.pair_statistic(w, k) for w in tw.all_words(n))
            assert tw.pair_statistic_exhaustive_total(n, k) == direct


class TestRichness:
    def test_every_length_4_word_is_rich(self):
        assert all(tw.fn_membership(w) for w in tw.all_words(4))

    def test_constant_and_alternating_fail_at_16(self):
        assert not tw.fn_membership(W("0" * 16))
        assert not tw.fn_membership(W("02" * 8))

    def test_short_words_rejected(self):
        with pytest.raises(ValueError):
            tw.fn_membership(W("0"))

    def test_census_small_exact(self):
        assert tw.census_fn(4).count == 16
        assert tw.census_fn(2).count == 4

    def test_census_matches_per_word_filter(self):
        for n in range(2, 13):
            count = sum(1 for w in tw.all_words(n) if tw.fn_membership(w))
            assert tw.census_fn(n).count == count

    def test_census_chunking_is_invisible(self):
        a = tw.census_fn(12, chunk_bits=5)
        b = tw.census_fn(12, chunk_bits=20)
        assert a.count == b.count

    def test_census_cap(self):
        with pytest.raises(ResourceCapExceeded):
            tw.census_fn(25)

    def test_census_sampled_reproducible(self):
        a = tw.census_fn(16, mode="sampled", sample_count=400, seed=9)
        b = tw.census_fn(16, mode="sampled", sample_count=400, seed=9)
        assert a.estimate == b.estimate and a.std_error == b.std_error
        # estimate within 6 true-p standard errors of the exhaustive count
        exact = tw.census_fn(16).count
        p = exact / a.total
        se_true = a.total * (p * (1 - p) / a.sample_count) ** 0.5
        assert abs(a.estimate - exact) <= 6 * max(se_true, 1.0)

    def test_positions_examples(self):
        assert tw.distinct_subword_positions(W("0202"), 2) == [(0, W("02"))]
        assert tw.distinct_subword_positions(W("0022"), 2) == [(0, W("00"))]
        with pytest.raises(ValueError):
            tw.distinct_subword_positions(W("0" * 16))

    def test_positions_are_distinct_and_sufficient(self):
        for n in (8, 9, 12):
            for w in tw.all_words(n):
                if not tw.fn_membership(w):
                    continue
                pos = tw.distinct_subword_positions(w)
                assert len(pos) == tw.required_positions(n)
                subs = [str(s) for _, s in pos]
                assert len(set(subs)) == len(subs)


class TestCylinders:
    def test_gap_property_exhaustive(self):
        for n in range(1, 7):
            bound = Fraction(1, 3**n)
            cyls = sorted(Cylinder(w).interval() for w in tw.all_words(n))
            for (a_lo, a_hi), (b_lo, b_hi) in zip(cyls, cyls[1:]):
                assert b_lo - a_hi >= bound

    def test_measure_additivity(self):
        for n in range(1, 11):
            total = sum((Cylinder(w).measure for w in tw.all_words(n)), Fraction(0))
            assert total == 1

    def test_measure_additivity_counted_to_20(self):
        # each order-n cylinder carries exactly 2**-n; enumerate the words in
        # chunks and add the masses as one exact product per chunk
        import numpy as np

        for n in range(11, 21):
            total = Fraction(0)
            step = 1 << 18
            for start in range(0, 1 << n, step):
                chunk = np.arange(start, min(start + step, 1 << n), dtype=np.uint64)
                total += len(chunk) * Fraction(1, 2**n)
            assert total == 1

    def test_left_endpoint_denominator(self):
        for w in tw.all_words(5):
            c = Cylinder(w)
            assert (3**5) % c.left_endpoint.denominator == 0


class TestMeasureInterval:
    def test_full_space(self):
        mb = tw.measure_interval(Fraction(0), Fraction(1), 7)
        assert mb.lower == mb.upper == 1

    def test_first_cylinder(self):
        mb = tw.measure_interval(Fraction(0), Fraction(1, 3), 1)
        assert mb.lower == mb.upper == Fraction(1, 2)

    def test_quarter_interval_brackets_one_third(self):
        # mu([0, 1/4]) = 1/3: the staircase value of the point (0.0202...)_3
        for depth in (4, 8, 12):
            mb = tw.measure_interval(Fraction(0), Fraction(1, 4), depth)
            assert mb.lower <= Fraction(1, 3) <= mb.upper
        deep = tw.measure_interval(Fraction(0), Fraction(1, 4), 20)
        assert deep.upper - deep.lower <= Fraction(2, 2**20)
        assert abs((deep.lower + deep.upper) / 2 - Fraction(1, 3)) < Fraction(1, 2**18)

    def test_depth_refinement_never_loosens(self):
        a, b = Fraction(1, 10), Fraction(3, 7)
        prev = tw.measure_interval(a, b, 2)
        for depth in range(3, 16):
            cur = tw.measure_interval(a, b, depth)
            assert cur.lower >= prev.lower
            assert cur.upper <= prev.upper
            prev = cur

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            tw.measure_interval(Fraction(1, 2), Fraction(1, 3), 4)


class TestWordStream:
    def test_deterministic(self):
        assert tw.random_word(5, 77, 300) == tw.random_word(5, 77, 300)

    def test_distinct_indices_distinct_words(self):
        seen = {str(tw.random_word(1, i, 64)) for i in range(2000)}
        assert len(seen) == 2000

    def test_prefix_consistency(self):
        long = tw.random_word(3, 4, 500)
        short = tw.random_word(3, 4, 100)
        assert long[:100] == short
