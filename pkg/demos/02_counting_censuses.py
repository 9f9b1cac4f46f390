"""Exhaustive censuses of the set's rationals, two independent ways.

Counts are organized by denominator brackets (3**(n-1), 3**n].  The
denominator scan walks reduced fractions and tests digits; the expansion
enumeration walks period words and reduces intrinsic fractions by gcd.
Where both run they must agree exactly, and the tables track the growth
ratios behind the open counting questions.
"""

from cantorapprox import census
from cantorapprox.census import METHOD_ENUM, METHOD_FORMULA, METHOD_SCAN

# ---------------------------------------------------------------------------
# 1. Levels: canonical expansions with prelength + period == n
# ---------------------------------------------------------------------------

print("expansions per level (n, count, count/(n 2**n)):")
for n in range(1, 11):
    rec = census.count_Tn(n, METHOD_FORMULA)
    print(f"  {n:2d}  {rec.count:6d}  {float(rec.normalized):.4f}")

# ---------------------------------------------------------------------------
# 2. Brackets: reduced members with q in (3**(n-1), 3**n]
# ---------------------------------------------------------------------------

print("\nbracket counts, both methods (n, scan, enumeration, count/(n 2**n)):")
for n in range(1, 6):
    scan = census.count_Nn(n, METHOD_SCAN)
    enum = census.count_Nn(n, METHOD_ENUM)
    marker = "==" if scan.count == enum.count else "!!"
    print(f"  {n:2d}  {scan.count:5d} {marker} {enum.count:<5d}  {float(enum.normalized):.4f}")

# ---------------------------------------------------------------------------
# 3. Purely periodic members and the convolution identity
# ---------------------------------------------------------------------------

print("\npurely periodic bracket counts (m, count, count/2**m):")
for m in range(1, 9):
    rec = census.count_Pm(m, METHOD_ENUM)
    print(f"  {m:2d}  {rec.count:5d}  {float(rec.normalized):.4f}")

print("\nbracket counts decompose exactly over purely periodic ones:")
table = census.purely_periodic_table()
for n in range(1, 6):
    conv = sum(
        census.pre_count(n - j) * table.bracket_count(j) for j in range(n + 1)
    )
    print(f"  n={n}: sum_j pre(n-j) * #pp(j) = {conv} = #bracket = "
          f"{census.count_Nn(n, METHOD_SCAN).count}")

# ---------------------------------------------------------------------------
# 4. Short-period subsets obey the combinatorial envelope
# ---------------------------------------------------------------------------

print("\nshort-period counts (n, M, count, envelope 2**(M+2) n 2**n):")
for n in (2, 4, 6):
    for M in (1, 2):
        rec = census.count_A(n, M, METHOD_SCAN)
        print(f"  {n}  {M}  {rec.count:5d}  {int(rec.reference):7d}")
