"""Planting well-spaced rational families inside cylinders.

Words with rich subword structure (at least n/4 distinct subwords of length
floor(log2 n)) provide planting offsets whose periodic continuations give
pairwise well-separated rationals of controlled intrinsic height.  Floored
ball systems around those points have certified measure brackets and a
computable first/second-moment ratio.
"""

from fractions import Fraction

from cantorapprox import build_family, census_fn, chung_erdos_ratio, psi_floor
from cantorapprox.approx_lab import ConstantPsi
from cantorapprox.spacing import build_ball_family, verify_observations
from cantorapprox.ternary_words import Cylinder, DigitWord

# ---------------------------------------------------------------------------
# 1. Most words are rich
# ---------------------------------------------------------------------------

print("rich-word counts (n, count, 2**n, share):")
for n in (8, 12, 16, 20):
    rec = census_fn(n)
    print(f"  {n:2d}  {rec.count:8d} / {rec.total:8d}  ({rec.count / rec.total:.4f})")

# ---------------------------------------------------------------------------
# 2. One family, concretely
# ---------------------------------------------------------------------------

base = Cylinder(DigitWord.from_string("02"))
w = DigitWord.from_string("00220202")
fam = build_family(base, w)
print(f"\nfamily planted by {w} in base {base.word} (order {base.order}):")
for m in fam.members:
    print(
        f"  offset {m.offset}: {m.rational.p}/{m.rational.q} "
        f"(intrinsic denominator {m.rational.q_int} <= 3**{base.order + len(w)})"
    )
vals = fam.values
sep = min(abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1 :])
print(f"  pairwise separation {sep} >= required {Fraction(1, 3 ** (2 + 8 + 3))}")

# ---------------------------------------------------------------------------
# 3. Exhaustive separation margins
# ---------------------------------------------------------------------------

rep = verify_observations(t_max=1, n_max=8)
print(f"\nobservation sweep clean: {rep.all_ok}")
row = next(r for r in rep.rows if (r.t, r.n) == (1, 8))
print(
    f"  at (t=1, n=8): min inter-family distance {float(row.min_interfamily):.3e} "
    f"(bound {float(row.interfamily_bound):.3e}), "
    f"min intra-family {float(row.min_intrafamily):.3e} "
    f"(bound {float(row.intrafamily_bound):.3e})"
)

# ---------------------------------------------------------------------------
# 4. Floored balls are disjoint and measurable
# ---------------------------------------------------------------------------

floored = psi_floor(ConstantPsi(1), t=0)
ballfam = build_ball_family(floored, Cylinder(DigitWord.from_string("")), 6, depth=22)
print(
    f"\nlevel-6 ball system: {len(ballfam.balls)} disjoint balls of radius "
    f"{ballfam.radius_exact}, total measure in "
    f"[{float(ballfam.measure_lower):.6f}, {float(ballfam.measure_upper):.6f}]"
)

rep = chung_erdos_ratio(ConstantPsi(1), Cylinder(DigitWord.from_string("")), N=5, depth=22)
print(
    "first/second-moment ratio bracket: "
    f"[{float(rep.ratio_lower):.4f}, {float(rep.ratio_upper):.4f}] "
    f"over levels {list(rep.levels)}"
)
