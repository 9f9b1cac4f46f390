"""Well-spaced rational families planted in cylinders, and their ball systems.

A rich word w of length n (see ``ternary_words.fn_membership``) supplies
ceil(n/4) offsets at which pairwise distinct length-k subwords start
(k = floor(log2 n)).  Planting w in a base cylinder of order t at offset o
produces the rational [base, w[:o], (w[o:])**inf]; the family of all ceil(n/4)
plantings has three verified properties:

(1) families of different generators in the same base are >= 3**-(t+n) apart;
(2) members within one family are >= 3**-(t+n+k) apart;
(3) every member's intrinsic denominator is at most 3**(t+n).

Radii are floored at (1/4) * 3**-(n+t+k_n) so the balls around one level's
members are pairwise disjoint; this module verifies all of it with exact
rational arithmetic and computes certified two-sided brackets for the measure
sums and the first/second-moment ratio used in limsup lower bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import precision
from .approx_lab import MinPsi, PsiFamily
from .cantor_rationals import CantorRational, canonicalize, to_rational
from .errors import DegenerateInput, InvariantViolation, ResourceCapExceeded
from .ternary_words import (
    Cylinder,
    DigitWord,
    MeasureBound,
    all_words,
    distinct_subword_positions,
    fn_membership,
    measure_interval,
    required_positions,
    subword_length,
)

OBSERVATION_N_CAP = 12
OBSERVATION_T_CAP = 4
CHUNG_ERDOS_N_CAP = 12
CHUNG_ERDOS_T_CAP = 3


@dataclass(frozen=True)
class PlantedRational:
    """One family member: planting offset, formal pattern, canonical rational."""

    offset: int
    formal_prelength: int  # t + offset
    formal_period: int  # n - offset
    rational: CantorRational


@dataclass(frozen=True)
class RationalFamily:
    base: Cylinder
    generator: DigitWord
    k: int
    members: tuple[PlantedRational, ...]
    duplicates: int  # members sharing a value after canonicalization (expected 0)

    @property
    def values(self) -> list[Fraction]:
        return [m.rational.value for m in self.members]


def build_family(base: Cylinder, w: DigitWord, k: int | None = None) -> RationalFamily:
    """Plant the rich word w in the base cylinder and verify the family
    invariants (member count, height bound, pairwise separation) on the spot.
    """
    n = len(w)
    t = base.order
    if k is None:
        k = subword_length(n)
    if not fn_membership(w, k):
        raise ValueError("generator fails the richness filter")
    positions = distinct_subword_positions(w, k)
    members = []
    for off, _sub in positions:
        pre = base.word + w[:off]
        per = w[off:]
        r = to_rational(canonicalize(pre, per))
        members.append(
            PlantedRational(
                offset=off,
                formal_prelength=t + off,
                formal_period=n - off,
                rational=r,
            )
        )
    need = required_positions(n)
    if len(members) != need:
        raise InvariantViolation(f"expected {need} members, built {len(members)}")
    height_bound = 3 ** (t + n)
    for m in members:
        if m.rational.q_int > height_bound:
            raise InvariantViolation(
                f"intrinsic denominator {m.rational.q_int} exceeds 3**{t + n}"
            )
    sep = Fraction(1, 3 ** (t + n + k))
    duplicates = 0
    vals = [m.rational.value for m in members]
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if vals[i] == vals[j]:
                duplicates += 1
                continue
            if abs(vals[i] - vals[j]) < sep:
                raise InvariantViolation(
                    f"members {i},{j} closer than 3**-{t + n + k}"
                )
    return RationalFamily(base=base, generator=w, k=k, members=tuple(members), duplicates=duplicates)


# ---------------------------------------------------------------------------
# Observation sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObservationRow:
    """Exhaustive separation/height margins for one (base order, word length)."""

    t: int
    n: int
    k: int
    families: int
    members_total: int
    duplicates: int
    min_interfamily: Fraction | None
    interfamily_bound: Fraction
    min_intrafamily: Fraction | None
    intrafamily_bound: Fraction
    max_q_int: int
    q_int_bound: int

    @property
    def ok(self) -> bool:
        inter_ok = self.min_interfamily is None or self.min_interfamily >= self.interfamily_bound
        intra_ok = self.min_intrafamily is None or self.min_intrafamily >= self.intrafamily_bound
        return inter_ok and intra_ok and self.max_q_int <= self.q_int_bound and self.duplicates == 0


@dataclass(frozen=True)
class ObservationReport:
    t_max: int
    n_max: int
    rows: tuple[ObservationRow, ...]

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)


def verify_observations(t_max: int, n_max: int, k: int | None = None) -> ObservationReport:
    """Exhaustive check of the three family properties over every base word of
    order <= t_max and every rich generator of length 2..n_max.

    The inter-family minimum over all generator pairs is certified via one
    sorted sweep per (base, n): the closest pair of points from different
    families is adjacent in the sorted union of all members.
    """
    if n_max > OBSERVATION_N_CAP:
        raise ResourceCapExceeded(f"observation sweep capped at n <= {OBSERVATION_N_CAP}")
    if t_max > OBSERVATION_T_CAP:
        raise ResourceCapExceeded(f"observation sweep capped at t <= {OBSERVATION_T_CAP}")
    rows = []
    for t in range(0, t_max + 1):
        for n in range(2, n_max + 1):
            kk = subword_length(n) if k is None else k
            inter_bound = Fraction(1, 3 ** (t + n))
            intra_bound = Fraction(1, 3 ** (t + n + kk))
            q_bound = 3 ** (t + n)
            families = 0
            members_total = 0
            duplicates = 0
            min_inter: Fraction | None = None
            min_intra: Fraction | None = None
            max_q = 0
            for base_word in all_words(t):
                base = Cylinder(base_word)
                tagged: list[tuple[Fraction, int]] = []  # (value, generator bits)
                for w in all_words(n):
                    if not fn_membership(w, kk):
                        continue
                    fam = build_family(base, w, kk)
                    families += 1
                    members_total += len(fam.members)
                    duplicates += fam.duplicates
                    gen_bits = w.bits()
                    vals = fam.values
                    tagged.extend((v, gen_bits) for v in vals)
                    for i in range(len(vals)):
                        for j in range(i + 1, len(vals)):
                            if vals[i] == vals[j]:
                                continue
                            d = abs(vals[i] - vals[j])
                            if min_intra is None or d < min_intra:
                                min_intra = d
                    for m in fam.members:
                        max_q = max(max_q, m.rational.q_int)
                tagged.sort()
                for (v1, g1), (v2, g2) in zip(tagged, tagged[1:]):
                    if g1 != g2:
                        d = v2 - v1
                        if min_inter is None or d < min_inter:
                            min_inter = d
            rows.append(
                ObservationRow(
                    t=t,
                    n=n,
                    k=kk,
                    families=families,
                    members_total=members_total,
                    duplicates=duplicates,
                    min_interfamily=min_inter,
                    interfamily_bound=inter_bound,
                    min_intrafamily=min_intra,
                    intrafamily_bound=intra_bound,
                    max_q_int=max_q,
                    q_int_bound=q_bound,
                )
            )
    return ObservationReport(t_max=t_max, n_max=n_max, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Radius flooring
# ---------------------------------------------------------------------------

class RadiusFloorPsi(PsiFamily):
    """The disjointness floor (1/4) * 3**-(e + k_{e-t}) indexed by the height
    exponent e = n + t; rational at every level."""

    def __init__(self, t: int):
        self.t = int(t)

    def describe(self) -> str:
        return f"radius-floor[t={self.t}]"

    def value_exact(self, n: int) -> Fraction | None:
        level = n - self.t
        if level < 1:
            raise ValueError(f"floor undefined at height exponent {n} (t={self.t})")
        k = subword_length(level)
        return Fraction(1, 4 * 3 ** (n + k))


def psi_floor(psi: PsiFamily, t: int) -> PsiFamily:
    """Levelwise minimum of psi and the disjointness floor for base order t.

    The result is indexed by the height exponent e = n + t, like psi itself;
    monotone non-increase is preserved (the floor is strictly decreasing).
    """
    return MinPsi(psi, RadiusFloorPsi(t))


def floored_level_terms(
    psi: PsiFamily,
    t: int,
    n_values: range,
    prec: int = precision.DEFAULT_PREC,
) -> list[tuple[int, Fraction, Fraction]]:
    """Certified brackets of the series terms n * (3**(n+t) psi'(3**(n+t)))**gamma
    for the floored family psi' = psi_floor(psi, t)."""
    floored = psi_floor(psi, t)
    out = []
    for n in n_values:
        e = n + t
        v = floored.value_exact(e)
        if v is not None:
            lo, hi = precision.pow_gamma_bracket(Fraction(3) ** e * v, prec)
        else:
            vlo, vhi = floored.value_bracket(e, prec)
            scale = Fraction(3) ** e
            lo, _ = precision.pow_gamma_bracket(scale * vlo, prec)
            _, hi = precision.pow_gamma_bracket(scale * vhi, prec)
        out.append((n, n * lo, n * hi))
    return out


# ---------------------------------------------------------------------------
# Ball families and the correlation ratio
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    center: Fraction
    radius_lo: Fraction
    radius_hi: Fraction

    def outer(self) -> tuple[Fraction, Fraction]:
        return self.center - self.radius_hi, self.center + self.radius_hi

    def inner(self) -> tuple[Fraction, Fraction]:
        return self.center - self.radius_lo, self.center + self.radius_lo


@dataclass(frozen=True)
class BallFamily:
    """All balls of one level: one around every member of every rich family."""

    level: int
    base: Cylinder
    balls: tuple[Ball, ...]
    radius_exact: Fraction | None
    measure_lower: Fraction
    measure_upper: Fraction
    generators: int


def _clamp01(a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
    return max(a, Fraction(0)), min(b, Fraction(1))


def build_ball_family(
    psi_floored: PsiFamily,
    base: Cylinder,
    n: int,
    depth: int,
    prec: int = precision.DEFAULT_PREC,
) -> BallFamily:
    """Balls of radius psi'(3**(n+t)) around every planted member at level n,
    with certified per-ball and total measure bounds.

    Verifies pairwise disjointness exactly (via the radius upper bound, which
    the floor keeps below half the member separation).
    """
    t = base.order
    e = n + t
    radius_exact = psi_floored.value_exact(e)
    if radius_exact is not None:
        r_lo = r_hi = radius_exact
    else:
        r_lo, r_hi = psi_floored.value_bracket(e, prec)
    if r_hi > Fraction(1, 4 * 3 ** (e + subword_length(n))):
        raise InvariantViolation("radius exceeds the disjointness floor")
    centers: list[Fraction] = []
    generators = 0
    for w in all_words(n):
        if not fn_membership(w):
            continue
        generators += 1
        fam = build_family(base, w)
        centers.extend(fam.values)
    centers.sort()
    for c1, c2 in zip(centers, centers[1:]):
        if c2 - c1 < 2 * r_hi:
            raise InvariantViolation(
                f"balls at level {n} are not certifiably disjoint"
            )
    balls = tuple(Ball(center=c, radius_lo=r_lo, radius_hi=r_hi) for c in centers)
    lo_total = Fraction(0)
    hi_total = Fraction(0)
    for b in balls:
        a_in, b_in = _clamp01(*b.inner())
        a_out, b_out = _clamp01(*b.outer())
        lo_total += measure_interval(a_in, b_in, depth).lower
        hi_total += measure_interval(a_out, b_out, depth).upper
    return BallFamily(
        level=n,
        base=base,
        balls=balls,
        radius_exact=radius_exact,
        measure_lower=lo_total,
        measure_upper=hi_total,
        generators=generators,
    )


@dataclass(frozen=True)
class ChungErdosReport:
    """Certified bracket of (sum mu(E_n))**2 / sum_{i != j} mu(E_i cap E_j)."""

    base: Cylinder
    levels: tuple[int, ...]
    depth: int
    families: tuple[BallFamily, ...]
    sum_lower: Fraction
    sum_upper: Fraction
    intersection_lower: Fraction
    intersection_upper: Fraction
    ratio_lower: Fraction | None
    ratio_upper: Fraction | None  # None = unbounded (intersection sum may be 0)

    @property
    def disjoint_levels(self) -> bool:
        return self.intersection_upper == 0


def _pair_intersection_bounds(
    fam_a: BallFamily, fam_b: BallFamily, depth: int
) -> tuple[Fraction, Fraction]:
    """Certified bounds on mu(E_a cap E_b) by decomposing into ball-pair
    interval intersections (disjoint, since each level's balls are disjoint)."""
    lo_sum = Fraction(0)
    hi_sum = Fraction(0)
    bs = sorted(fam_b.balls, key=lambda b: b.center)
    starts = [b.outer()[0] for b in bs]
    import bisect

    for a in fam_a.balls:
        a_out_lo, a_out_hi = a.outer()
        idx = bisect.bisect_left(starts, a_out_lo)
        # walk left to catch a neighbor whose interval started earlier but reaches a
        i = idx - 1
        while i >= 0 and bs[i].outer()[1] >= a_out_lo:
            i -= 1
        for b in bs[i + 1 :]:
            b_out_lo, b_out_hi = b.outer()
            if b_out_lo > a_out_hi:
                break
            if b_out_hi < a_out_lo:
                continue
            o_lo, o_hi = _clamp01(max(a_out_lo, b_out_lo), min(a_out_hi, b_out_hi))
            if o_lo <= o_hi:
                hi_sum += measure_interval(o_lo, o_hi, depth).upper
            ai_lo, ai_hi = a.inner()
            bi_lo, bi_hi = b.inner()
            in_lo, in_hi = max(ai_lo, bi_lo), min(ai_hi, bi_hi)
            if in_lo <= in_hi:
                in_lo, in_hi = _clamp01(in_lo, in_hi)
                lo_sum += measure_interval(in_lo, in_hi, depth).lower
    return lo_sum, hi_sum


def chung_erdos_ratio(
    psi: PsiFamily,
    base: Cylinder,
    N: int,
    depth: int,
    prec: int = precision.DEFAULT_PREC,
) -> ChungErdosReport:
    """Build the floored ball systems for levels 2..N inside the base cylinder
    and bracket the first/second-moment ratio.

    Level 1 is skipped: the richness filter needs word length >= 2.  When the
    floored radii keep all levels disjoint the intersection sum is 0 and the
    ratio is reported as unbounded (upper end None).
    """
    if N > CHUNG_ERDOS_N_CAP:
        raise ResourceCapExceeded(f"ball systems capped at N <= {CHUNG_ERDOS_N_CAP}")
    if base.order > CHUNG_ERDOS_T_CAP:
        raise ResourceCapExceeded(f"base order capped at {CHUNG_ERDOS_T_CAP}")
    levels = tuple(n for n in range(2, N + 1))
    if not levels:
        raise DegenerateInput("no levels to build (need N >= 2)")
    floored = psi_floor(psi, base.order)
    families = tuple(
        build_ball_family(floored, base, n, depth, prec) for n in levels
    )
    if all(not f.balls for f in families):
        raise DegenerateInput("every level is empty")
    sum_lower = sum((f.measure_lower for f in families), Fraction(0))
    sum_upper = sum((f.measure_upper for f in families), Fraction(0))
    inter_lo = Fraction(0)
    inter_hi = Fraction(0)
    for i in range(len(families)):
        for j in range(i + 1, len(families)):
            lo, hi = _pair_intersection_bounds(families[i], families[j], depth)
            inter_lo += 2 * lo  # ordered pairs
            inter_hi += 2 * hi
    if inter_hi == 0:
        ratio_lower = None
        ratio_upper = None
    else:
        ratio_lower = (sum_lower * sum_lower) / inter_hi
        ratio_upper = (sum_upper * sum_upper) / inter_lo if inter_lo > 0 else None
    return ChungErdosReport(
        base=base,
        levels=levels,
        depth=depth,
        families=families,
        sum_lower=sum_lower,
        sum_upper=sum_upper,
        intersection_lower=inter_lo,
        intersection_upper=inter_hi,
        ratio_lower=ratio_lower,
        ratio_upper=ratio_upper,
    )
