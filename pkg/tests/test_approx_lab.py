"""Hit model, psi families, series, witness search, best approximations."""

import math
from fractions import Fraction

import pytest

from cantorapprox.approx_lab import (
    ConstantPsi,
    PowerLogPsi,
    TablePsi,
    best_approximations,
    dichotomy_series,
    dirichlet_check,
    hit_scan,
    khintchine_experiment,
    parse_psi,
    sample_point,
)
from cantorapprox.census import enumerate_by_denominator
from cantorapprox.errors import ResourceCapExceeded
from cantorapprox.ternary_words import DigitWord


def W(s: str) -> DigitWord:
    return DigitWord.from_string(s)


GAMMA = math.log(2) / math.log(3)


class TestPowerLogPsi:
    def test_value_bracket_tracks_float(self):
        psi = PowerLogPsi(3)
        for n in (2, 5, 17):
            lo, hi = psi.value_bracket(n)
            approx = 3.0**-n * n ** (-3 / GAMMA)
            assert lo <= Fraction(approx).limit_denominator(10**15) * Fraction(1000001, 1000000)
            assert float(lo) == pytest.approx(approx, rel=1e-12)
            assert float(hi) == pytest.approx(approx, rel=1e-12)
            assert lo <= hi

    def test_compare_pow3_exact_equality_case(self):
        # psi_1(3**4) = 3**-4 * 4**(-1/gamma) = 3**-4 * 3**-2 = 3**-6
        assert PowerLogPsi(1).compare_pow3(4, 6) == 0
        assert PowerLogPsi(1).compare_pow3(4, 7) == 1
        assert PowerLogPsi(1).compare_pow3(4, 5) == -1

    def test_series_terms(self):
        assert PowerLogPsi(2).series_term_exact(5) == Fraction(1, 5)
        assert PowerLogPsi(0).series_term_exact(7) == 7
        lo, hi = PowerLogPsi(Fraction(3, 2)).series_term_bracket(4)
        assert lo <= Fraction(1, 2) <= hi  # 4**(-1/2)

    def test_monotone_nonincreasing(self):
        psi = PowerLogPsi(Fraction(3, 2))
        prev = None
        for n in range(1, 20):
            lo, hi = psi.value_bracket(n)
            if prev is not None:
                assert hi <= prev
            prev = lo

    def test_negative_s_rejected(self):
        with pytest.raises(ValueError):
            PowerLogPsi(-1)


class TestTableAndParse:
    def test_non_monotone_rejected(self):
        with pytest.raises(ValueError):
            TablePsi({1: Fraction(1, 9), 2: Fraction(1, 3)})

    def test_missing_level(self):
        psi = TablePsi({1: Fraction(1, 3)})
        with pytest.raises(ValueError):
            psi.value_exact(2)

    def test_parse_power_log(self):
        psi = parse_psi("power-log:s=1.5")
        assert isinstance(psi, PowerLogPsi) and psi.s == Fraction(3, 2)

    def test_parse_table(self, tmp_path):
        path = tmp_path / "psi.csv"
        path.write_text("n,value_num,value_den\n1,1,3\n2,1,9\n")
        psi = parse_psi(f"table:{path}")
        assert psi.value_exact(2) == Fraction(1, 9)

    def test_parse_rejects_unknown(self):
        with pytest.raises(ValueError):
            parse_psi("linear:2")

    def test_level_for_height(self):
        psi = ConstantPsi(1)
        assert psi.level_for_height(1) == 0
        assert psi.level_for_height(8) == 1
        assert psi.level_for_height(9) == 2


class TestSampling:
    def test_deterministic(self):
        assert sample_point(3, 9, 200) == sample_point(3, 9, 200)

    def test_cap(self):
        with pytest.raises(ResourceCapExceeded):
            sample_point(1, 1, 20001)

    def test_cylinder_frequencies_match_measure(self):
        # frequency of each depth-n prefix over 10**5 samples within 4 true
        # standard errors of 2**-n, for n <= 6
        M = 100_000
        counts: dict[tuple[int, ...], int] = {}
        for i in range(M):
            w = sample_point(123, i, 6)
            counts[w.digits] = counts.get(w.digits, 0) + 1
        for n in range(1, 7):
            prefix_counts: dict[tuple[int, ...], int] = {}
            for digits, c in counts.items():
                prefix_counts[digits[:n]] = prefix_counts.get(digits[:n], 0) + c
            p = 2.0**-n
            se = math.sqrt(p * (1 - p) / M)
            assert len(prefix_counts) == 2**n
            for c in prefix_counts.values():
                assert abs(c / M - p) <= 4 * se


class TestHitScan:
    def test_periodic_target_hits_its_own_period(self):
        x = W("02" * 20)
        psi = TablePsi({n: Fraction(1, 3 ** (2 * n)) for n in range(1, 7)})
        hits = hit_scan(x, psi, 6)
        decided_yes = {(h.prelength, h.period) for h in hits if h.decided == "yes"}
        assert (0, 2) in decided_yes
        h02 = next(h for h in hits if (h.prelength, h.period) == (0, 2))
        assert h02.distance_lower == 0
        assert h02.candidate.value == Fraction(1, 4)

    def test_eventually_constant_target(self):
        x = W("2" + "0" * 39)
        psi = TablePsi({n: Fraction(1, 3 ** (2 * n)) for n in range(1, 7)})
        hits = hit_scan(x, psi, 6)
        h11 = next(h for h in hits if (h.prelength, h.period) == (1, 1))
        assert h11.decided == "yes"
        assert h11.candidate.value == Fraction(2, 3)
        assert h11.distance_lower == 0

    def test_insufficient_digits_rejected(self):
        with pytest.raises(ValueError):
            hit_scan(W("0202"), PowerLogPsi(3), 4)

    def test_bracket_obeys_digit_law(self):
        x = sample_point(5, 0, 60)
        hits = hit_scan(x, PowerLogPsi(2), 20)
        for h in hits:
            if h.mismatch_index is not None:
                j = h.mismatch_index
                assert Fraction(1, 3**j) <= h.distance_lower or h.distance_lower == 0
                assert h.distance_upper <= Fraction(1, 3 ** (j - 1))
                assert h.distance_lower <= h.distance_upper

    def test_all_decided_under_margin(self):
        for i in range(5):
            x = sample_point(11, i, 80)
            hits = hit_scan(x, PowerLogPsi(1), 30)
            assert all(h.decided in ("yes", "no") for h in hits)

    def test_soundness_against_exact_recheck(self):
        # independent recheck: exact distances under both tail conventions
        for i in range(8):
            x = sample_point(17, i, 70)
            N = len(x)
            y0 = Fraction(sum(d * 3 ** (N - 1 - t) for t, d in enumerate(x)), 3**N)
            y2 = y0 + Fraction(1, 3**N)
            psi = PowerLogPsi(2)
            for h in hit_scan(x, psi, 25):
                d_lo = min(abs(y0 - h.candidate.value), abs(y2 - h.candidate.value))
                if y0 <= h.candidate.value <= y2:
                    d_lo = Fraction(0)
                d_hi = max(abs(y0 - h.candidate.value), abs(y2 - h.candidate.value))
                if h.decided == "yes":
                    assert psi.compare_value(h.level, d_hi) > 0
                elif h.decided == "no":
                    assert psi.compare_value(h.level, d_lo) <= 0

    def test_monotone_in_psi(self):
        # pointwise larger psi never yields fewer decided-yes hits
        for i in range(6):
            x = sample_point(23, i, 80)
            small = sum(1 for h in hit_scan(x, PowerLogPsi(3), 25) if h.decided == "yes")
            large = sum(1 for h in hit_scan(x, PowerLogPsi(2), 25) if h.decided == "yes")
            assert large >= small


class TestDichotomySeries:
    def test_s2_is_harmonic(self):
        s = dichotomy_series(PowerLogPsi(2), 200)
        assert s.exact == sum(Fraction(1, n) for n in range(1, 201))

    def test_s0_is_arithmetic(self):
        s = dichotomy_series(PowerLogPsi(0), 50)
        assert s.exact == 50 * 51 // 2

    def test_s3_bounded_by_basel(self):
        s = dichotomy_series(PowerLogPsi(3), 500)
        assert s.exact == sum(Fraction(1, n * n) for n in range(1, 501))
        assert s.upper < Fraction(1645, 1000)

    def test_fractional_s_bracket(self):
        s = dichotomy_series(PowerLogPsi(Fraction(3, 2)), 40)
        assert s.exact is None
        assert s.lower < s.upper
        assert s.upper - s.lower < Fraction(1, 2**100)
        # float64 reference is far coarser than the bracket
        approx = sum(n ** (-0.5) for n in range(1, 41))
        assert float(s.midpoint) == pytest.approx(approx, rel=1e-12)

    def test_constant_psi_terms(self):
        # psi == 1: term is n * (3**n)**gamma = n * 2**n exactly
        s = dichotomy_series(ConstantPsi(1), 12)
        assert s.exact == sum(n * 2**n for n in range(1, 13))


class TestKhintchine:
    def test_empty_report(self):
        rep = khintchine_experiment(PowerLogPsi(3), 0, 80, 40, seed=1)
        assert rep.mean_full is None and rep.regime == "empty"

    def test_reproducible_and_worker_invariant(self):
        a = khintchine_experiment(PowerLogPsi(3), 12, 80, 30, seed=5)
        b = khintchine_experiment(PowerLogPsi(3), 12, 80, 30, seed=5)
        c = khintchine_experiment(PowerLogPsi(3), 12, 80, 30, seed=5, jobs=2)
        assert a.rows == b.rows == c.rows

    def test_regimes_small(self):
        conv = khintchine_experiment(PowerLogPsi(3), 60, 80, 40, seed=2024)
        div = khintchine_experiment(PowerLogPsi(1), 60, 80, 40, seed=2024)
        assert conv.regime == "bounded"
        assert div.regime == "growing"
        lo, hi = div.ratio_to_series
        assert Fraction(1, 10) < hi and lo < 10


class TestDirichlet:
    def test_exact_target_quarter(self):
        res = dirichlet_check(W("02" * 20), 9)
        assert res.status == "witness"
        assert res.witness.value == Fraction(1, 4)

    def test_all_q_values_small_sweep(self):
        members = tuple(enumerate_by_denominator(243))
        for i in range(25):
            x = sample_point(31, i, 60)
            for Q in (9, 27, 81, 243):
                res = dirichlet_check(x, Q, members=members)
                assert res.status == "witness", (i, Q)
                assert res.witness.q <= Q

    def test_degenerate_Q(self):
        with pytest.raises(ValueError):
            dirichlet_check(W("02" * 10), 1)
        with pytest.raises(ResourceCapExceeded):
            dirichlet_check(W("02" * 10), 729)

    def test_witness_bound_holds_exactly(self):
        # Q = 81: (log3 81)**(1/gamma) == 9 exactly, so the bound is rational
        x = sample_point(37, 0, 60)
        res = dirichlet_check(x, 81)
        r = res.witness
        N = len(x)
        y0 = Fraction(sum(d * 3 ** (N - 1 - t) for t, d in enumerate(x)), 3**N)
        y2 = y0 + Fraction(1, 3**N)
        sup = max(abs(y0 - r.value), abs(y2 - r.value))
        assert sup < Fraction(1, 9 * r.q)


class TestBestApproximations:
    def test_exact_target(self):
        entries = best_approximations(W("02" * 12), 100)
        top = entries[0]
        assert top.rational.value == Fraction(1, 4)
        assert top.distance_lower == 0
        assert top.successive_minimum

    def test_empty_below_minimal_height(self):
        assert best_approximations(W("02"), 1) == []

    def test_sorted_and_minimum_flags(self):
        x = sample_point(41, 3, 50)
        entries = best_approximations(x, 3**6)
        los = [e.distance_lower for e in entries]
        assert los == sorted(los)
        flagged = [e for e in entries if e.successive_minimum]
        assert flagged
        # the globally closest entry must be a successive minimum
        assert entries[0].successive_minimum

    def test_against_brute_force_midpoint_sort(self):
        # brute force: sort all candidates by distance to the trailing-0 tail
        x = W("2002" * 8)
        N = len(x)
        y0 = Fraction(sum(d * 3 ** (N - 1 - t) for t, d in enumerate(x)), 3**N)
        entries = best_approximations(x, 81)
        brute = sorted(
            (abs(y0 - e.rational.value), e.rational.value) for e in entries
        )
        # same top value under both orderings (gap to next is > bracket width)
        assert brute[0][1] == entries[0].rational.value

    def test_heights_respect_cap(self):
        for e in best_approximations(W("02" * 10), 26):
            assert e.rational.q_int <= 26
