"""Canonical expansions, intrinsic fractions, and membership testing."""

from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorapprox import cantor_rationals as cr
from cantorapprox.cantor_rationals import (
    CantorRational,
    PeriodicExpansion,
    canonicalize,
    expansion_of,
    in_cantor_set,
    intrinsic_height,
    to_rational,
    verify_gcd_identities,
)
from cantorapprox.census import enumerate_expansions
from cantorapprox.errors import NotInCantorSet
from cantorapprox.ternary_words import DigitWord

digit_lists = st.lists(st.sampled_from([0, 2]), max_size=10)
period_lists = st.lists(st.sampled_from([0, 2]), min_size=1, max_size=8)


def W(s: str) -> DigitWord:
    return DigitWord.from_string(s)


def E(pre: str, per: str) -> PeriodicExpansion:
    return PeriodicExpansion(W(pre), W(per))


class TestCanonicalize:
    def test_prefix_absorbed_into_period(self):
        assert canonicalize(W("2"), W("2")) == E("", "2")

    def test_period_self_repetition_reduced(self):
        assert canonicalize(W(""), W("0202")) == E("", "02")

    def test_already_canonical_unchanged(self):
        assert canonicalize(W("0"), W("2")) == E("0", "2")

    def test_empty_period_rejected(self):
        with pytest.raises(ValueError):
            canonicalize(W("0"), W(""))

    def test_constructor_enforces_canonicality(self):
        with pytest.raises(ValueError):
            PeriodicExpansion(W(""), W("0202"))
        with pytest.raises(ValueError):
            PeriodicExpansion(W("2"), W("2"))

    @given(digit_lists, period_lists)
    @settings(max_examples=300)
    def test_idempotent_and_sequence_preserving(self, pre, per):
        e = canonicalize(DigitWord(tuple(pre)), DigitWord(tuple(per)))
        again = canonicalize(e.preperiod, e.period)
        assert again == e
        # same infinite digit sequence as the raw (pre, per) pair
        raw = PeriodicExpansion.__new__(PeriodicExpansion)  # bypass validation
        object.__setattr__(raw, "preperiod", DigitWord(tuple(pre)))
        object.__setattr__(raw, "period", DigitWord(tuple(per)))
        for i in range(1, len(pre) + 3 * len(per) + 4):
            assert e.digit(i) == raw.digit(i)


class TestToRational:
    def test_quarter(self):
        r = to_rational(E("", "02"))
        assert (r.p, r.q, r.p_int, r.q_int) == (1, 4, 2, 8)

    def test_one(self):
        r = to_rational(E("", "2"))
        assert (r.p, r.q, r.p_int, r.q_int) == (1, 1, 2, 2)

    def test_third(self):
        r = to_rational(E("0", "2"))
        assert (r.p, r.q, r.p_int, r.q_int) == (1, 3, 2, 6)
        assert gcd(2, 6) == gcd(cr.int3(W("2")), 3 - 1) == 2

    def test_value_is_series_sum(self):
        e = E("20", "02")
        r = to_rational(e)
        approx = sum(Fraction(e.digit(i), 3**i) for i in range(1, 40))
        assert abs(r.value - approx) < Fraction(1, 3**38)


class TestIntrinsicHeight:
    @pytest.mark.parametrize(
        "pre,per,expect",
        [("2", "0", (4, 6)), ("", "0", (0, 2)), ("0", "2", (2, 6))],
    )
    def test_examples(self, pre, per, expect):
        assert intrinsic_height(E(pre, per)) == expect

    def test_alternative_form_agrees(self):
        # (3**m - 1) * int3(pre) + int3(per) equals the defining difference
        for r in enumerate_expansions(8):
            e = r.expansion
            ell, m = e.prelength, e.period_length
            alt = (3**m - 1) * cr.int3(e.preperiod) + cr.int3(e.period)
            assert r.p_int == alt


class TestExpansionOf:
    def test_quarter(self):
        assert expansion_of(1, 4) == E("", "02")

    def test_half_not_in_set(self):
        with pytest.raises(NotInCantorSet) as exc:
            expansion_of(1, 2)
        assert exc.value.digit_index == 1

    def test_endpoints(self):
        assert expansion_of(1, 1) == E("", "2")
        assert expansion_of(0, 1) == E("", "0")

    def test_triadic_rationals(self):
        assert expansion_of(1, 3) == E("0", "2")
        assert expansion_of(2, 3) == E("2", "0")
        assert expansion_of(1, 9) == E("00", "2")
        assert expansion_of(2, 9) == E("02", "0")

    def test_unreduced_rejected(self):
        with pytest.raises(ValueError):
            expansion_of(2, 4)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            expansion_of(5, 4)
        with pytest.raises(ValueError):
            expansion_of(1, 0)

    def test_known_members(self):
        assert expansion_of(1, 10) == E("", "0022")
        assert expansion_of(1, 13) == E("", "002")


class TestGcdIdentities:
    @pytest.mark.parametrize("pre,per", [("0", "2"), ("", "02"), ("2", "0")])
    def test_examples(self, pre, per):
        assert verify_gcd_identities(E(pre, per))

    @given(digit_lists, period_lists)
    @settings(max_examples=300)
    def test_random_expansions(self, pre, per):
        e = canonicalize(DigitWord(tuple(pre)), DigitWord(tuple(per)))
        assert verify_gcd_identities(e)


class TestRoundTrip:
    def test_exhaustive_to_level_8(self):
        for r in enumerate_expansions(8):
            assert expansion_of(r.p, r.q) == r.expansion

    def test_height_divisibility_to_level_8(self):
        for r in enumerate_expansions(8):
            assert r.q_int % r.q == 0
            assert r.q_int // r.q == gcd(r.p_int, r.q_int)

    def test_three_part_of_denominator_is_prelength(self):
        for r in enumerate_expansions(8):
            ell = r.prelength
            assert r.q % 3**ell == 0
            if ell < 40:
                assert r.q % 3 ** (ell + 1) != 0 or r.q == 0

    def test_canonical_minimality_of_stream(self):
        for r in enumerate_expansions(7):
            e = r.expansion
            if e.prelength:
                assert e.preperiod[-1] != e.period[-1]
            m = e.period_length
            for d in range(1, m):
                if m % d == 0:
                    assert e.period.digits != e.period.digits[:d] * (m // d)


class TestDistanceLaw:
    def test_pairs_to_level_5(self):
        rats = list(enumerate_expansions(5))
        pref = {id(r): r.expansion.digit_prefix(24).digits for r in rats}
        for i in range(len(rats)):
            for j in range(i + 1, len(rats)):
                a, b = rats[i], rats[j]
                da, db = pref[id(a)], pref[id(b)]
                jdx = next(t + 1 for t in range(24) if da[t] != db[t])
                dist = abs(a.value - b.value)
                assert Fraction(1, 3**jdx) <= dist <= Fraction(1, 3 ** (jdx - 1))

    def test_all_pairs_to_level_8_vectorized(self):
        # distinct members of level <= 8 have |x - y| >= 1/(q q') >= 3**-16,
        # so the first digit disagreement sits at index <= 17; the two-sided
        # law is then an exact int64 cross-multiplication
        import numpy as np

        rats = list(enumerate_expansions(8))
        digs = np.array(
            [r.expansion.digit_prefix(18).digits for r in rats], dtype=np.int8
        )
        ps = np.array([r.p for r in rats], dtype=np.int64)
        qs = np.array([r.q for r in rats], dtype=np.int64)
        pow3 = np.array([3**j for j in range(19)], dtype=np.int64)
        n = len(rats)
        for i in range(n - 1):
            diff = digs[i + 1 :] != digs[i]
            assert diff.any(axis=1).all()  # distinct rationals must disagree
            jdx = diff.argmax(axis=1) + 1
            assert int(jdx.max()) <= 17
            num = np.abs(ps[i + 1 :] * qs[i] - ps[i] * qs[i + 1 :])
            den = qs[i + 1 :] * qs[i]
            assert (num * pow3[jdx] >= den).all()  # dist >= 3**-j
            assert (num * pow3[jdx - 1] <= den).all()  # dist <= 3**-(j-1)


def _membership_oracle(p: int, q: int) -> bool:
    """Independent digit-simulation oracle: x is in the set iff the walk
    x -> 3x - d (d in {0, 2}, staying inside [0, 1], exact rationals) admits
    an infinite path.  States have denominators dividing q, so the state
    graph is finite and an infinite path exists iff a cycle is reachable."""
    WHITE, GRAY, TRUE, FALSE = 0, 1, 2, 3
    color: dict[Fraction, int] = {}

    def dfs(x: Fraction) -> bool:
        c = color.get(x, WHITE)
        if c == GRAY or c == TRUE:
            return True
        if c == FALSE:
            return False
        color[x] = GRAY
        ok = False
        for d in (0, 2):
            y = 3 * x - d
            if 0 <= y <= 1 and dfs(y):
                ok = True
                break
        color[x] = TRUE if ok else FALSE
        return ok

    return dfs(Fraction(p, q))


class TestMembership:
    def test_oracle_agreement_small_denominators(self):
        for q in range(1, 130):
            for p in range(0, q + 1):
                if gcd(p, q) != 1:
                    continue
                assert in_cantor_set(p, q) == _membership_oracle(p, q), (p, q)

    def test_examples(self):
        assert in_cantor_set(1, 4)
        assert not in_cantor_set(1, 2)
        assert in_cantor_set(3, 4)
        assert not in_cantor_set(5, 7)


class TestSerialization:
    def test_json_round_trip(self):
        for r in enumerate_expansions(5):
            d = r.to_json_dict()
            back = CantorRational.from_json_dict(d)
            assert back == r

    def test_json_fields_are_decimal_strings(self):
        d = to_rational(E("2", "0")).to_json_dict()
        assert d == {
            "p": "2",
            "q": "3",
            "preperiod": "2",
            "period": "0",
            "p_int": "4",
            "q_int": "6",
        }
