"""Tour of exact rational arithmetic on the middle-thirds Cantor set.

A rational lies in the set exactly when its base-3 digits are eventually
periodic over {0, 2}.  This walk-through converts fractions to canonical
(preperiod, period) form and back, reads off intrinsic heights, and checks
the divisibility identities that make the heights well behaved.
"""

from fractions import Fraction

from cantorapprox import (
    canonicalize,
    expansion_of,
    in_cantor_set,
    intrinsic_height,
    to_rational,
    verify_gcd_identities,
    NotInCantorSet,
)
from cantorapprox.ternary_words import DigitWord

# ---------------------------------------------------------------------------
# 1. Membership is a digit condition
# ---------------------------------------------------------------------------

print("Which small fractions live in the set?")
for p, q in [(1, 4), (1, 2), (1, 3), (3, 4), (1, 10), (1, 13), (5, 7)]:
    if in_cantor_set(p, q):
        print(f"  {p}/{q}: yes ->", expansion_of(p, q))
    else:
        try:
            expansion_of(p, q)
        except NotInCantorSet as exc:
            print(f"  {p}/{q}: no (digit 1 at position {exc.digit_index})")

# ---------------------------------------------------------------------------
# 2. Canonical form: minimal period, minimal preperiod
# ---------------------------------------------------------------------------

print("\nCanonicalization squeezes redundant digits:")
pre, per = DigitWord.from_string("2"), DigitWord.from_string("2")
print(f"  ({pre}, {per})      ->", canonicalize(pre, per))
pre, per = DigitWord.from_string(""), DigitWord.from_string("0202")
print(f"  ({pre}, {per})  ->", canonicalize(pre, per))

# ---------------------------------------------------------------------------
# 3. Intrinsic heights: the fraction read straight off the expansion
# ---------------------------------------------------------------------------

print("\nReduced vs intrinsic fractions:")
for p, q in [(1, 4), (1, 3), (2, 3), (1, 10)]:
    e = expansion_of(p, q)
    r = to_rational(e)
    p_int, q_int = intrinsic_height(e)
    print(
        f"  {p}/{q} = {e}: intrinsic {p_int}/{q_int}, "
        f"prelength {e.prelength}, period {e.period_length}, "
        f"gcd identities hold: {verify_gcd_identities(e)}"
    )

# ---------------------------------------------------------------------------
# 4. Round trip: expansion -> fraction -> expansion is the identity
# ---------------------------------------------------------------------------

e = canonicalize(DigitWord.from_string("20"), DigitWord.from_string("0220"))
r = to_rational(e)
again = expansion_of(r.p, r.q)
print(f"\nRound trip {e} -> {r.p}/{r.q} -> {again}: identical = {again == e}")

# exactness demo: the value really is the infinite series
partial = sum(Fraction(e.digit(i), 3**i) for i in range(1, 60))
print(f"series partial sum error: {float(abs(r.value - partial)):.2e} (shrinks as 3**-N)")
