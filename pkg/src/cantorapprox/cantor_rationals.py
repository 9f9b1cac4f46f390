"""Exact arithmetic for the rational points of the middle-thirds Cantor set.

A rational lies in the Cantor set iff its base-3 expansion is eventually
periodic with digits in {0, 2}.  The canonical representation is the pair
(preperiod word, period word) with minimal prelength and minimal period; from
it the not-necessarily-reduced "intrinsic" fraction is read off:

    q_int = 3**l * (3**m - 1)
    p_int = int3(preperiod + period) - int3(preperiod)
          = (3**m - 1) * int3(preperiod) + int3(period)

where int3(w) is the integer with base-3 digits w, l the prelength and m the
period length.  Every operation below is exact integer arithmetic; there is
no floating point anywhere in this module.

Convention for triadic rationals (denominator a power of 3): such a point has
one digits-in-{0,2} expansion; long division naturally yields the trailing-0
form, and a final digit 1 (only possible at the last nonzero digit) is
rewritten to the in-set trailing-2 form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import NotInCantorSet
from .ternary_words import DigitWord, EMPTY_WORD


def int3(w: DigitWord) -> int:
    """Integer with base-3 digit string w (empty word -> 0)."""
    x = 0
    for d in w:
        x = 3 * x + d
    return x


@dataclass(frozen=True)
class PeriodicExpansion:
    """Canonical eventually periodic digit sequence: preperiod + period**inf.

    Canonicality (enforced at construction): the period is not a power of a
    shorter block, and either the preperiod is empty or its last digit differs
    from the period's last digit (otherwise one digit could be absorbed).
    """

    preperiod: DigitWord
    period: DigitWord

    def __post_init__(self):
        m = len(self.period)
        if m == 0:
            raise ValueError("period must be nonempty")
        if _minimal_period_length(self.period.digits) != m:
            raise ValueError(f"period {self.period} is a repetition of a shorter block")
        if len(self.preperiod) and self.preperiod[-1] == self.period[-1]:
            raise ValueError("preperiod not minimal: its last digit can be absorbed")

    @property
    def prelength(self) -> int:
        return len(self.preperiod)

    @property
    def period_length(self) -> int:
        return len(self.period)

    @property
    def level(self) -> int:
        """prelength + period length."""
        return self.prelength + self.period_length

    def digit(self, i: int) -> int:
        """1-based digit of the infinite sequence."""
        if i < 1:
            raise ValueError("digit positions are 1-based")
        ell = self.prelength
        if i <= ell:
            return self.preperiod[i - 1]
        return self.period[(i - ell - 1) % self.period_length]

    def digit_prefix(self, n: int) -> DigitWord:
        return DigitWord(tuple(self.digit(i) for i in range(1, n + 1)))

    def __str__(self) -> str:
        return f"[{self.preperiod},({self.period})^inf]"


def _minimal_period_length(digits: tuple[int, ...]) -> int:
    """Minimal d dividing len(digits) with digits = block**(len/d).

    For an infinite repetition of ``digits`` the minimal period divides every
    period, so checking divisors suffices.
    """
    m = len(digits)
    for d in range(1, m + 1):
        if m % d == 0 and digits == digits[:d] * (m // d):
            return d
    return m


def canonicalize(preperiod: DigitWord, period: DigitWord) -> PeriodicExpansion:
    """Canonical form of the sequence preperiod + period**inf.

    First shrinks the period to its minimal block, then absorbs preperiod
    digits into the (rotated) period while the last preperiod digit matches
    the last period digit.  Idempotent.
    """
    if len(period) == 0:
        raise ValueError("period must be nonempty")
    d = _minimal_period_length(period.digits)
    per = list(period.digits[:d])
    pre = list(preperiod.digits)
    while pre and pre[-1] == per[-1]:
        per = [per[-1]] + per[:-1]
        pre.pop()
    return PeriodicExpansion(DigitWord(tuple(pre)), DigitWord(tuple(per)))


@dataclass(frozen=True)
class CantorRational:
    """A rational point of the Cantor set with both of its fraction forms.

    ``p/q`` is reduced; ``p_int/q_int`` is the intrinsic fraction read off the
    canonical expansion (q_int = 3**l (3**m - 1)), used as the height in the
    approximation experiments.
    """

    p: int
    q: int
    expansion: PeriodicExpansion
    p_int: int
    q_int: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def prelength(self) -> int:
        return self.expansion.prelength

    @property
    def period_length(self) -> int:
        return self.expansion.period_length

    def to_json_dict(self) -> dict:
        return {
            "p": str(self.p),
            "q": str(self.q),
            "preperiod": str(self.expansion.preperiod),
            "period": str(self.expansion.period),
            "p_int": str(self.p_int),
            "q_int": str(self.q_int),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, d: dict) -> "CantorRational":
        e = PeriodicExpansion(
            DigitWord.from_string(d["preperiod"]), DigitWord.from_string(d["period"])
        )
        r = to_rational(e)
        if (r.p, r.q, r.p_int, r.q_int) != (
            int(d["p"]),
            int(d["q"]),
            int(d["p_int"]),
            int(d["q_int"]),
        ):
            raise ValueError("inconsistent serialized rational")
        return r


def intrinsic_height(e: PeriodicExpansion) -> tuple[int, int]:
    """(p_int, q_int) read off a canonical expansion."""
    ell, m = e.prelength, e.period_length
    full = int3(e.preperiod + e.period)
    head = int3(e.preperiod)
    p_int = full - head
    q_int = 3**ell * (3**m - 1)
    return p_int, q_int


def to_rational(e: PeriodicExpansion) -> CantorRational:
    """Exact conversion of a canonical expansion to a CantorRational."""
    p_int, q_int = intrinsic_height(e)
    g = gcd(p_int, q_int)
    return CantorRational(p=p_int // g, q=q_int // g, expansion=e, p_int=p_int, q_int=q_int)


def expansion_of(p: int, q: int) -> PeriodicExpansion:
    """Canonical expansion of the reduced fraction p/q in [0, 1].

    Base-3 long division with remainder-cycle detection; the remainder state
    space has at most q elements, so at most q+1 steps run before a repeat,
    a termination, or a digit 1 (-> NotInCantorSet, with its 1-based index).
    A final digit 1 with remainder 0 is the triadic-rational edge case and is
    rewritten to the trailing-2 representation, which is the in-set one.
    """
    if q <= 0:
        raise ValueError("denominator must be positive")
    if not 0 <= p <= q:
        raise ValueError("need 0 <= p/q <= 1")
    if gcd(p, q) != 1:
        raise ValueError(f"{p}/{q} is not reduced; reduce before calling")
    if p == 0:
        return PeriodicExpansion(EMPTY_WORD, DigitWord((0,)))
    if p == q:
        return PeriodicExpansion(EMPTY_WORD, DigitWord((2,)))
    digits: list[int] = []
    seen = {p: 0}  # remainder -> digits emitted when it was current
    r = p
    while True:
        d, r = divmod(3 * r, q)
        if d == 1:
            if r == 0:
                # terminating expansion ...d1 == ...d0 (2)^inf
                pre = tuple(digits) + (0,)
                return PeriodicExpansion(DigitWord(pre), DigitWord((2,)))
            raise NotInCantorSet(p, q, len(digits) + 1)
        digits.append(d)
        if r == 0:
            return PeriodicExpansion(DigitWord(tuple(digits)), DigitWord((0,)))
        if r in seen:
            s = seen[r]
            return canonicalize(
                DigitWord(tuple(digits[:s])), DigitWord(tuple(digits[s:]))
            )
        seen[r] = len(digits)


def in_cantor_set(p: int, q: int) -> bool:
    """Membership test for a reduced fraction in [0, 1]."""
    try:
        expansion_of(p, q)
        return True
    except NotInCantorSet:
        return False


def rational_of_fraction(x: Fraction) -> CantorRational:
    """Convenience: expansion_of + to_rational for a Fraction in [0, 1]."""
    e = expansion_of(x.numerator, x.denominator)
    return to_rational(e)


def verify_gcd_identities(e: PeriodicExpansion) -> bool:
    """Check the two divisibility identities of the intrinsic fraction:
    gcd(p_int, 3**l) == 1 and gcd(p_int, q_int) == gcd(int3(period), 3**m - 1).

    Both always hold for canonical expansions; exposed as a boolean so it can
    serve as a property-test hook.
    """
    ell, m = e.prelength, e.period_length
    p_int, q_int = intrinsic_height(e)
    if gcd(p_int, 3**ell) != 1:
        return False
    return gcd(p_int, q_int) == gcd(int3(e.period), 3**m - 1)
