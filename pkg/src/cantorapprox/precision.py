"""Certified high-precision evaluation of the irrational quantities in this package.

Everything downstream needs exact rationals, but two exponents are irrational:
gamma = log 2 / log 3 (the mass-scaling exponent of the Cantor measure) and its
reciprocal.  Quantities like x**gamma are therefore computed as two-sided
rational brackets using MPFR with directed rounding (via gmpy2): the lower end
is computed rounding every operation down, the upper end rounding up, so the
true value is certified to lie inside the returned interval.

Default working precision is 192 significand bits, comfortably above the
128 fractional bits the experiment contracts ask for; comparisons escalate
precision on demand (a rational never equals one of these irrational values,
so escalation terminates).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import gmpy2

DEFAULT_PREC = 192
MAX_PREC = 4096


def _ctx_pair(prec: int):
    down = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
    return down, up


def _to_fraction(x) -> Fraction:
    num, den = x.as_integer_ratio()
    return Fraction(int(num), int(den))


class Interval:
    """Closed interval [lo, hi] of mpfr values certified to contain the truth.

    Only the operations the package needs are implemented; each one rounds the
    lower endpoint down and the upper endpoint up.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec: int):
        self.lo = lo
        self.hi = hi
        self.prec = prec

    @classmethod
    def from_fraction(cls, x: Fraction, prec: int = DEFAULT_PREC) -> "Interval":
        down, up = _ctx_pair(prec)
        q = gmpy2.mpq(x.numerator, x.denominator)
        with down:
            lo = gmpy2.mpfr(q)
        with up:
            hi = gmpy2.mpfr(q)
        return cls(lo, hi, prec)

    @classmethod
    def from_int(cls, n: int, prec: int = DEFAULT_PREC) -> "Interval":
        return cls.from_fraction(Fraction(n), prec)

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        return _to_fraction(self.lo), _to_fraction(self.hi)

    def __add__(self, other: "Interval") -> "Interval":
        down, up = _ctx_pair(self.prec)
        return Interval(down.add(self.lo, other.lo), up.add(self.hi, other.hi), self.prec)

    def __sub__(self, other: "Interval") -> "Interval":
        down, up = _ctx_pair(self.prec)
        return Interval(down.sub(self.lo, other.hi), up.sub(self.hi, other.lo), self.prec)

    def __mul__(self, other: "Interval") -> "Interval":
        down, up = _ctx_pair(self.prec)
        cands_lo = [
            down.mul(a, b)
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        cands_hi = [
            up.mul(a, b)
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        return Interval(min(cands_lo), max(cands_hi), self.prec)

    def __truediv__(self, other: "Interval") -> "Interval":
        if not (other.lo > 0 or other.hi < 0):
            raise ZeroDivisionError("interval denominator straddles zero")
        down, up = _ctx_pair(self.prec)
        cands_lo = [
            down.div(a, b)
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        cands_hi = [
            up.div(a, b)
            for a in (self.lo, self.hi)
            for b in (other.lo, other.hi)
        ]
        return Interval(min(cands_lo), max(cands_hi), self.prec)

    def log(self) -> "Interval":
        if not self.lo > 0:
            raise ValueError("log requires a strictly positive interval")
        down, up = _ctx_pair(self.prec)
        return Interval(down.log(self.lo), up.log(self.hi), self.prec)

    def exp(self) -> "Interval":
        down, up = _ctx_pair(self.prec)
        return Interval(down.exp(self.lo), up.exp(self.hi), self.prec)

    def pow(self, exponent: "Interval") -> "Interval":
        """self ** exponent for a strictly positive base, via exp(e * log(b))."""
        return (self.log() * exponent).exp()


def gamma_interval(prec: int = DEFAULT_PREC) -> Interval:
    """Bracket of gamma = log 2 / log 3 (~0.6309)."""
    two = Interval.from_int(2, prec)
    three = Interval.from_int(3, prec)
    return two.log() / three.log()


def inv_gamma_interval(prec: int = DEFAULT_PREC) -> Interval:
    """Bracket of 1/gamma = log 3 / log 2 (~1.5850)."""
    two = Interval.from_int(2, prec)
    three = Interval.from_int(3, prec)
    return three.log() / two.log()


def pow_gamma_bracket(x: Fraction, prec: int = DEFAULT_PREC) -> tuple[Fraction, Fraction]:
    """Certified rational bracket of x**gamma for rational x > 0.

    Exact when x is an integer power of 3 (then x**gamma is the matching
    power of 2).
    """
    if x <= 0:
        raise ValueError("base must be positive")
    j = _power_of_3_exponent(x)
    if j is not None:
        v = Fraction(2) ** j
        return v, v
    iv = Interval.from_fraction(x, prec).pow(gamma_interval(prec))
    return iv.as_fractions()


def _power_of_3_exponent(x: Fraction) -> int | None:
    """Return j with x == 3**j, or None."""
    num, den = x.numerator, x.denominator
    if num == 1 and den == 1:
        return 0
    if den == 1:
        j = _int_log(num, 3)
        return j
    if num == 1:
        j = _int_log(den, 3)
        return -j if j is not None else None
    return None


def _int_log(n: int, base: int) -> int | None:
    """Exact integer logarithm: e with base**e == n, or None."""
    if n < 1:
        return None
    e = 0
    while n % base == 0:
        n //= base
        e += 1
    return e if n == 1 else None


def resolve_sign(
    build: Callable[[int], tuple[Fraction, Fraction]],
    start_prec: int = DEFAULT_PREC,
) -> int:
    """Sign of a quantity given by ever-tighter brackets.

    ``build(prec)`` must return a bracket of the quantity at that precision.
    Escalates precision until the bracket excludes 0.  Meant for quantities
    that are provably nonzero (rational minus irrational); raises if MAX_PREC
    is reached without a decision.
    """
    prec = start_prec
    while prec <= MAX_PREC:
        lo, hi = build(prec)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if lo == hi == 0:
            return 0
        prec *= 2
    raise ArithmeticError("could not resolve sign within precision ceiling")


def compare_pow_gamma(x: Fraction, r: Fraction, start_prec: int = DEFAULT_PREC) -> int:
    """Sign of x**gamma - r for rationals x > 0, r."""
    j = _power_of_3_exponent(x)
    if j is not None:
        v = Fraction(2) ** j
        return (v > r) - (v < r)
    if r <= 0:
        return 1

    def build(prec: int) -> tuple[Fraction, Fraction]:
        lo, hi = pow_gamma_bracket(x, prec)
        return lo - r, hi - r

    return resolve_sign(build, start_prec)
