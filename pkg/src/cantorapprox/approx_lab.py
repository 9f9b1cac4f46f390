"""Approximation experiments over the Cantor set's rational points.

The hit model: for a target digit word x (a cylinder of order N, i.e. all
points of the set whose expansion starts with those N digits) and a level
split (l, m), the candidate rational is built from x's own digits - prefix
x[:l], period x[l:l+m] repeated forever.  Whether |x - candidate| < psi(3**n)
(n = l + m) is then decidable from finitely many digits: the first index
where x deviates from the periodic continuation pins the distance between
3**-j and 3**-(j-1), and the residual cases are settled with exact rational
endpoint distances.  A decision is only ever reported when it holds for
EVERY point of the cylinder under both tail conventions (trailing 0s and
trailing 2s); otherwise the hit is marked indeterminate.

psi families are evaluated only at powers of 3.  The built-in power-log
family psi_s(3**n) = 3**-n * n**(-s/gamma) is chosen so the dichotomy series
term n * (3**n psi(3**n))**gamma collapses to n**(1-s) exactly; comparisons
against powers of 3 reduce to exact integer power comparisons, everything
else uses certified directed-rounding brackets (>= 128 fractional bits).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import precision
from .cantor_rationals import (
    CantorRational,
    canonicalize,
    int3,
    to_rational,
)
from .census import enumerate_by_denominator, iter_primitive_period_bits
from .errors import ResourceCapExceeded
from .precision import Interval, gamma_interval, inv_gamma_interval, resolve_sign
from .ternary_words import DigitWord, random_word

MAX_SAMPLE_DIGITS = 10_000
HEIGHT_CAP = 3**12
DIRICHLET_Q_CAP = 243


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# psi families
# ---------------------------------------------------------------------------

class PsiFamily:
    """A positive non-increasing approximation-rate function on levels 3**n.

    Subclasses provide ``value_exact`` and/or ``value_bracket``; the base
    class derives exact-when-possible comparisons and dichotomy-series terms.
    """

    def describe(self) -> str:
        raise NotImplementedError

    def value_exact(self, n: int) -> Fraction | None:
        """psi(3**n) as an exact rational, or None if irrational."""
        raise NotImplementedError

    def value_bracket(self, n: int, prec: int = precision.DEFAULT_PREC) -> tuple[Fraction, Fraction]:
        v = self.value_exact(n)
        if v is None:
            raise NotImplementedError
        return v, v

    def compare_value(self, n: int, x: Fraction) -> int:
        """Sign of psi(3**n) - x."""
        v = self.value_exact(n)
        if v is not None:
            return _sign(v - x)

        def build(prec: int) -> tuple[Fraction, Fraction]:
            lo, hi = self.value_bracket(n, prec)
            return lo - x, hi - x

        return resolve_sign(build)

    def compare_pow3(self, n: int, j: int) -> int:
        """Sign of psi(3**n) - 3**-j (often decidable exactly)."""
        return self.compare_value(n, Fraction(1, 3**j))

    def series_term_exact(self, n: int) -> Fraction | None:
        """n * (3**n psi(3**n))**gamma when exactly representable."""
        v = self.value_exact(n)
        if v is None:
            return None
        u = Fraction(3) ** n * v
        lo, hi = precision.pow_gamma_bracket(u)
        if lo == hi:
            return n * lo
        return None

    def series_term_bracket(
        self, n: int, prec: int = precision.DEFAULT_PREC
    ) -> tuple[Fraction, Fraction]:
        exact = self.series_term_exact(n)
        if exact is not None:
            return exact, exact
        v = self.value_exact(n)
        if v is not None:
            lo, hi = precision.pow_gamma_bracket(Fraction(3) ** n * v, prec)
            return n * lo, n * hi
        vlo, vhi = self.value_bracket(n, prec)
        scale = Fraction(3) ** n
        lo, _ = precision.pow_gamma_bracket(scale * vlo, prec)
        _, hi = precision.pow_gamma_bracket(scale * vhi, prec)
        return n * lo, n * hi

    def level_for_height(self, q: int) -> int:
        """Largest n with 3**n <= q (psi between levels uses the level below)."""
        if q < 1:
            raise ValueError("height must be >= 1")
        n = 0
        while 3 ** (n + 1) <= q:
            n += 1
        return n


class PowerLogPsi(PsiFamily):
    """psi_s(3**n) = 3**-n * n**(-s/gamma); s >= 0 rational.

    Series term is n**(1-s); comparisons with powers of 3 reduce to
    2**((j-n) b) vs n**a for s = a/b, which is exact.
    """

    def __init__(self, s: Fraction | int | str):
        self.s = Fraction(s)
        if self.s < 0:
            raise ValueError("s must be >= 0")

    def describe(self) -> str:
        return f"power-log:s={self.s}"

    def value_exact(self, n: int) -> Fraction | None:
        if self.s == 0 or n == 1:
            return Fraction(1, 3**n)
        return None

    def value_bracket(self, n: int, prec: int = precision.DEFAULT_PREC) -> tuple[Fraction, Fraction]:
        v = self.value_exact(n)
        if v is not None:
            return v, v
        exponent = Interval.from_fraction(-self.s, prec) * inv_gamma_interval(prec)
        iv = Interval.from_int(n, prec).pow(exponent)
        lo, hi = iv.as_fractions()
        scale = Fraction(1, 3**n)
        return scale * lo, scale * hi

    def compare_pow3(self, n: int, j: int) -> int:
        # psi > 3**-j  iff  s log2 n < j - n  iff  n**a < 2**((j-n) b)
        a, b = self.s.numerator, self.s.denominator
        lhs = Fraction(n) ** a
        rhs = Fraction(2) ** ((j - n) * b)
        return _sign(rhs - lhs)

    def series_term_exact(self, n: int) -> Fraction | None:
        # n * (3**n psi)**gamma = n**(1-s)
        if self.s.denominator == 1:
            return Fraction(n, n ** int(self.s))
        return None

    def series_term_bracket(
        self, n: int, prec: int = precision.DEFAULT_PREC
    ) -> tuple[Fraction, Fraction]:
        exact = self.series_term_exact(n)
        if exact is not None:
            return exact, exact
        iv = Interval.from_int(n, prec).pow(Interval.from_fraction(1 - self.s, prec))
        return iv.as_fractions()


class TablePsi(PsiFamily):
    """Explicit exact rational values per level."""

    def __init__(self, values: dict[int, Fraction], monotone: bool = True):
        self.values = {int(n): Fraction(v) for n, v in values.items()}
        if any(v <= 0 for v in self.values.values()):
            raise ValueError("psi values must be positive")
        self.monotone = monotone
        if monotone:
            levels = sorted(self.values)
            for a, b in zip(levels, levels[1:]):
                if self.values[b] > self.values[a]:
                    raise ValueError("table is not non-increasing")

    def describe(self) -> str:
        return f"table:{len(self.values)} levels"

    def value_exact(self, n: int) -> Fraction | None:
        if n not in self.values:
            raise ValueError(f"psi table has no level {n}")
        return self.values[n]


class ConstantPsi(PsiFamily):
    """psi identically equal to a positive rational constant."""

    def __init__(self, c: Fraction | int | str):
        self.c = Fraction(c)
        if self.c <= 0:
            raise ValueError("constant must be positive")

    def describe(self) -> str:
        return f"constant:{self.c}"

    def value_exact(self, n: int) -> Fraction | None:
        return self.c


class ShiftedPsi(PsiFamily):
    """View of another family with the level index shifted: value(n) = base(n + t)."""

    def __init__(self, base: PsiFamily, t: int):
        self.base = base
        self.t = int(t)

    def describe(self) -> str:
        return f"shift[{self.t}]({self.base.describe()})"

    def value_exact(self, n: int) -> Fraction | None:
        return self.base.value_exact(n + self.t)

    def value_bracket(self, n: int, prec: int = precision.DEFAULT_PREC) -> tuple[Fraction, Fraction]:
        return self.base.value_bracket(n + self.t, prec)

    def compare_value(self, n: int, x: Fraction) -> int:
        return self.base.compare_value(n + self.t, x)

    def compare_pow3(self, n: int, j: int) -> int:
        return self.base.compare_pow3(n + self.t, j)


class MinPsi(PsiFamily):
    """Levelwise minimum of two families (used for radius flooring)."""

    def __init__(self, a: PsiFamily, b: PsiFamily):
        self.a = a
        self.b = b

    def describe(self) -> str:
        return f"min({self.a.describe()}, {self.b.describe()})"

    def value_exact(self, n: int) -> Fraction | None:
        ea = self.a.value_exact(n)
        eb = self.b.value_exact(n)
        if ea is not None and eb is not None:
            return min(ea, eb)
        if ea is not None and self.b.compare_value(n, ea) >= 0:
            return ea
        if eb is not None and self.a.compare_value(n, eb) >= 0:
            return eb
        return None

    def value_bracket(self, n: int, prec: int = precision.DEFAULT_PREC) -> tuple[Fraction, Fraction]:
        v = self.value_exact(n)
        if v is not None:
            return v, v
        alo, ahi = self.a.value_bracket(n, prec)
        blo, bhi = self.b.value_bracket(n, prec)
        return min(alo, blo), min(ahi, bhi)

    def compare_value(self, n: int, x: Fraction) -> int:
        ca = self.a.compare_value(n, x)
        cb = self.b.compare_value(n, x)
        if ca < 0 or cb < 0:
            return -1
        if ca > 0 and cb > 0:
            return 1
        return 0

    def compare_pow3(self, n: int, j: int) -> int:
        ca = self.a.compare_pow3(n, j)
        cb = self.b.compare_pow3(n, j)
        if ca < 0 or cb < 0:
            return -1
        if ca > 0 and cb > 0:
            return 1
        return 0


def parse_psi(spec_str: str) -> PsiFamily:
    """CLI grammar: ``power-log:s=<decimal>`` or ``table:<csv path>``.

    Table CSV rows are ``n,value_num,value_den``.
    """
    if spec_str.startswith("power-log:"):
        body = spec_str[len("power-log:") :]
        if not body.startswith("s="):
            raise ValueError("expected power-log:s=<decimal>")
        return PowerLogPsi(Fraction(body[2:]))
    if spec_str.startswith("table:"):
        import csv as _csv

        path = spec_str[len("table:") :]
        values: dict[int, Fraction] = {}
        with open(path, newline="") as fh:
            for row in _csv.reader(fh):
                if not row or row[0].startswith("#") or row[0] == "n":
                    continue
                values[int(row[0])] = Fraction(int(row[1]), int(row[2]))
        return TablePsi(values)
    if spec_str.startswith("constant:"):
        return ConstantPsi(Fraction(spec_str[len("constant:") :]))
    raise ValueError(f"unrecognized psi spec {spec_str!r}")


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_point(seed: int, index: int, digits: int) -> DigitWord:
    """i.i.d. uniform digit word from the counter-based stream.

    The induced law of the length-n prefix is the natural measure on order-n
    cylinders (mass 2**-n each); results do not depend on how sample indices
    are distributed over workers.
    """
    if digits > MAX_SAMPLE_DIGITS:
        raise ResourceCapExceeded(f"sample length capped at {MAX_SAMPLE_DIGITS}")
    return random_word(seed, index, digits)


# ---------------------------------------------------------------------------
# Hit model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproximationHit:
    """One (prefix, period) candidate tested against a target cylinder."""

    target_id: str
    level: int  # formal l + m
    prelength: int  # formal l
    period: int  # formal m
    candidate: CantorRational
    distance_lower: Fraction
    distance_upper: Fraction
    decided: str  # "yes" | "no" | "indeterminate"
    mismatch_index: int | None  # first 1-based digit where x leaves the candidate


def _cylinder_endpoints(x: DigitWord) -> tuple[Fraction, Fraction]:
    n = len(x)
    y0 = Fraction(int3(x), 3**n)
    return y0, y0 + Fraction(1, 3**n)


def _distance_range(y0: Fraction, y2: Fraction, r: Fraction) -> tuple[Fraction, Fraction]:
    """(inf, sup) of |y - r| over the cylinder interval [y0, y2]."""
    d0, d2 = abs(y0 - r), abs(y2 - r)
    if y0 <= r <= y2:
        return Fraction(0), max(d0, d2)
    return min(d0, d2), max(d0, d2)


def psi_decision_index(psi: PsiFamily, n: int) -> int:
    """Smallest digit index that can certify a strict hit at level n:
    ceil(log3(1/psi(3**n))) + 1."""
    j = 0
    while psi.compare_pow3(n, j) < 0:  # 3**-j > psi
        j += 1
        if j > n + 4096:
            raise ArithmeticError("psi decays too fast for a decision index")
    return j + 1


def hit_scan(
    x: DigitWord,
    psi: PsiFamily,
    n_max: int,
    *,
    target_id: str = "x",
) -> list[ApproximationHit]:
    """Test every split (l >= 0, m >= 1, l + m <= n_max) of the target's own
    digits and decide |x - candidate| < psi(3**(l+m)).

    Requires len(x) >= the decision index at level n_max so that every
    comparison is certifiable; any residual borderline case is marked
    indeterminate rather than guessed.
    """
    N = len(x)
    jstar = psi_decision_index(psi, n_max)
    if N < jstar:
        raise ValueError(
            f"target has {N} digits but deciding level {n_max} needs {jstar}"
        )
    y0, y2 = _cylinder_endpoints(x)
    hits: list[ApproximationHit] = []
    for n in range(1, n_max + 1):
        for ell in range(0, n):
            m = n - ell
            # first 1-based index > l + m where x deviates from the periodic
            # continuation of its own (prefix, period) pattern
            mismatch = None
            for i in range(n + 1, N + 1):
                if x[i - 1] != x[ell + (i - ell - 1) % m]:
                    mismatch = i
                    break
            candidate = to_rational(canonicalize(x[:ell], x[ell : ell + m]))
            if mismatch is not None:
                lo_pow = Fraction(1, 3**mismatch)
                hi_pow = Fraction(1, 3 ** (mismatch - 1))
                if psi.compare_pow3(n, mismatch - 1) > 0:
                    # psi > 3**-(mismatch-1) >= sup: every point of the cylinder hits
                    hits.append(
                        ApproximationHit(
                            target_id, n, ell, m, candidate, lo_pow, hi_pow, "yes", mismatch
                        )
                    )
                    continue
                if psi.compare_pow3(n, mismatch) <= 0:
                    # psi <= 3**-mismatch <= inf: no point of the cylinder hits
                    hits.append(
                        ApproximationHit(
                            target_id, n, ell, m, candidate, lo_pow, hi_pow, "no", mismatch
                        )
                    )
                    continue
                inf, sup = _distance_range(y0, y2, candidate.value)
                if psi.compare_value(n, sup) > 0:
                    decided = "yes"
                elif psi.compare_value(n, inf) <= 0:
                    decided = "no"
                else:
                    decided = "indeterminate"
                hits.append(
                    ApproximationHit(
                        target_id, n, ell, m, candidate, inf, sup, decided, mismatch
                    )
                )
            else:
                # x follows the candidate through all N digits
                inf, sup = _distance_range(y0, y2, candidate.value)
                decided = "yes" if psi.compare_value(n, sup) > 0 else "indeterminate"
                hits.append(
                    ApproximationHit(target_id, n, ell, m, candidate, inf, sup, decided, None)
                )
    return hits


# ---------------------------------------------------------------------------
# Dichotomy series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesSum:
    """Partial sum of the dichotomy series sum_n n (3**n psi(3**n))**gamma."""

    N: int
    lower: Fraction
    upper: Fraction
    exact: Fraction | None
    prec: int

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2


def dichotomy_series(psi: PsiFamily, N: int, prec: int = precision.DEFAULT_PREC) -> SeriesSum:
    """S(N) = sum_{n <= N} n (3**n psi(3**n))**gamma as a certified bracket
    (exact when every term is exact, e.g. integer-s power-log families)."""
    lower = upper = Fraction(0)
    exact_total: Fraction | None = Fraction(0)
    for n in range(1, N + 1):
        term = psi.series_term_exact(n)
        if term is not None:
            lower += term
            upper += term
            if exact_total is not None:
                exact_total += term
        else:
            lo, hi = psi.series_term_bracket(n, prec)
            lower += lo
            upper += hi
            exact_total = None
    return SeriesSum(N=N, lower=lower, upper=upper, exact=exact_total, prec=prec)


# ---------------------------------------------------------------------------
# Monte Carlo dichotomy experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleStats:
    sample_id: int
    decided_full: int  # decided-yes hits with level <= n_max
    decided_half: int  # decided-yes hits with level <= n_max // 2
    indeterminate: int
    max_decided_level: int


@dataclass(frozen=True)
class KhintchineReport:
    psi: str
    samples: int
    digits: int
    n_max: int
    seed: int
    rows: tuple[SampleStats, ...]
    series: SeriesSum | None

    @property
    def mean_full(self) -> Fraction | None:
        if not self.rows:
            return None
        return Fraction(sum(r.decided_full for r in self.rows), len(self.rows))

    @property
    def mean_half(self) -> Fraction | None:
        if not self.rows:
            return None
        return Fraction(sum(r.decided_half for r in self.rows), len(self.rows))

    @property
    def growth(self) -> Fraction | None:
        """Relative increase of the mean hit count from n_max//2 to n_max."""
        if not self.rows or self.mean_half == 0:
            return None
        return (self.mean_full - self.mean_half) / self.mean_half

    @property
    def regime(self) -> str:
        g = self.growth
        if g is None:
            return "empty"
        if g > Fraction(1, 2):
            return "growing"
        if g < Fraction(1, 10):
            return "bounded"
        return "intermediate"

    @property
    def ratio_to_series(self) -> tuple[Fraction, Fraction] | None:
        """mean_full / S(n_max) as a bracket."""
        if not self.rows or self.series is None or self.series.lower <= 0:
            return None
        mean = self.mean_full
        return mean / self.series.upper, mean / self.series.lower


def _sample_stats(psi: PsiFamily, seed: int, index: int, digits: int, n_max: int) -> SampleStats:
    x = sample_point(seed, index, digits)
    hits = hit_scan(x, psi, n_max, target_id=f"sample-{index}")
    half = n_max // 2
    decided_full = sum(1 for h in hits if h.decided == "yes")
    decided_half = sum(1 for h in hits if h.decided == "yes" and h.level <= half)
    indeterminate = sum(1 for h in hits if h.decided == "indeterminate")
    decided_levels = [h.level for h in hits if h.decided == "yes"]
    return SampleStats(
        sample_id=index,
        decided_full=decided_full,
        decided_half=decided_half,
        indeterminate=indeterminate,
        max_decided_level=max(decided_levels, default=0),
    )


def khintchine_experiment(
    psi: PsiFamily,
    samples: int,
    digits: int,
    n_max: int,
    seed: int,
    jobs: int = 1,
) -> KhintchineReport:
    """Per-sample decided-hit counts for the hit model, plus the matching
    dichotomy partial sum.  Counter-based sampling makes the report invariant
    under the worker count; rows are merged in sample order."""
    if samples < 0:
        raise ValueError("samples must be >= 0")
    rows: list[SampleStats] = []
    if samples:
        if jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            args = [(psi, seed, i, digits, n_max) for i in range(samples)]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_sample_stats_star, args, chunksize=64))
        else:
            rows = [_sample_stats(psi, seed, i, digits, n_max) for i in range(samples)]
        rows.sort(key=lambda r: r.sample_id)
    series = dichotomy_series(psi, n_max) if samples else None
    return KhintchineReport(
        psi=psi.describe(),
        samples=samples,
        digits=digits,
        n_max=n_max,
        seed=seed,
        rows=tuple(rows),
        series=series,
    )


def _sample_stats_star(args) -> SampleStats:
    return _sample_stats(*args)


# ---------------------------------------------------------------------------
# Dirichlet-type witness search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletResult:
    status: str  # "witness" | "indeterminate" | "failure"
    witness: CantorRational | None
    Q: int
    candidates_checked: int


def _dirichlet_factor_bracket(Q: int, prec: int) -> tuple[Fraction, Fraction]:
    """Bracket of (log3 Q)**(1/gamma); exact when log3 Q is a power of 2."""
    k = precision._int_log(Q, 3)
    if k is not None:
        i = precision._int_log(k, 2) if k >= 1 else None
        if i is not None:
            v = Fraction(3) ** i  # (2**i)**(log2 3) = 3**i
            return v, v
        base = Interval.from_int(k, prec)
    else:
        base = Interval.from_int(Q, prec).log() / Interval.from_int(3, prec).log()
    return base.pow(inv_gamma_interval(prec)).as_fractions()


def dirichlet_check(
    x: DigitWord,
    Q: int,
    members: Sequence[CantorRational] | None = None,
    prec: int = precision.DEFAULT_PREC,
) -> DirichletResult:
    """Search q <= Q for a member within 1 / (q (log3 Q)**(1/gamma)) of the
    target cylinder, certifying the strict inequality for every point of the
    cylinder.  Among certified witnesses the closest one is returned (ties by
    smallest q, then p).  A certified miss on all candidates would falsify
    the Dirichlet-type bound and is reported as "failure" (expected never)."""
    if Q < 2:
        raise ValueError("Q must be >= 2 (log3 Q must be positive)")
    if Q > DIRICHLET_Q_CAP:
        raise ResourceCapExceeded(f"witness search capped at Q <= {DIRICHLET_Q_CAP}")
    if members is None:
        members = tuple(enumerate_by_denominator(Q))
    y0, y2 = _cylinder_endpoints(x)
    any_unresolved = False
    checked = 0
    best: tuple[Fraction, int, int, CantorRational] | None = None
    for r in members:
        if r.q > Q:
            continue
        checked += 1
        inf, sup = _distance_range(y0, y2, r.value)

        def bound_minus(d: Fraction, prec_: int) -> tuple[Fraction, Fraction]:
            flo, fhi = _dirichlet_factor_bracket(Q, prec_)
            return Fraction(1, r.q) / fhi - d, Fraction(1, r.q) / flo - d

        lo_s, hi_s = bound_minus(sup, prec)
        certified = lo_s > 0
        if not certified and hi_s > 0:
            # bracket straddles: escalate unless truly borderline
            try:
                certified = resolve_sign(lambda p: bound_minus(sup, p)) > 0
            except ArithmeticError:
                any_unresolved = True
        if certified:
            key = (sup, r.q, r.p, r)
            if best is None or key[:3] < best[:3]:
                best = key
            continue
        lo_i, hi_i = bound_minus(inf, prec)
        if hi_i > 0:
            # inf < bound: some tail of the cylinder may hit, some may not
            any_unresolved = True
    if best is not None:
        return DirichletResult("witness", best[3], Q, checked)
    if any_unresolved:
        return DirichletResult("indeterminate", None, Q, checked)
    return DirichletResult("failure", None, Q, checked)


# ---------------------------------------------------------------------------
# Best approximations by intrinsic height
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BestApproximation:
    rational: CantorRational
    distance_lower: Fraction
    distance_upper: Fraction
    successive_minimum: bool


def _expansions_with_height_at_most(height_max: int) -> Iterator[CantorRational]:
    m = 1
    while 3**m - 1 <= height_max:
        block = 3**m - 1
        for per_bits in iter_primitive_period_bits(m):
            per = DigitWord.from_bits(per_bits, m)
            ell = 0
            while 3**ell * block <= height_max:
                if ell == 0:
                    yield to_rational(canonicalize(DigitWord(()), per))
                else:
                    forced_bit = 1 if per[m - 1] == 0 else 0
                    for low in range(1 << (ell - 1)):
                        pre_bits = low | (forced_bit << (ell - 1))
                        pre = DigitWord.from_bits(pre_bits, ell)
                        yield to_rational(canonicalize(pre, per))
                ell += 1
        m += 1


def best_approximations(
    x: DigitWord, height_max: int, top: int | None = None
) -> list[BestApproximation]:
    """All members with intrinsic denominator <= height_max, sorted by the
    lower end of their exact distance bracket to the target cylinder.

    Successive minima are flagged against increasing intrinsic height: an
    entry is flagged iff its distance lower bound beats every entry of
    strictly smaller height.
    """
    if height_max > HEIGHT_CAP:
        raise ResourceCapExceeded(f"height capped at {HEIGHT_CAP}")
    y0, y2 = _cylinder_endpoints(x)
    entries = []
    for r in _expansions_with_height_at_most(height_max):
        inf, sup = _distance_range(y0, y2, r.value)
        entries.append((r, inf, sup))
    # successive minima: beat every entry of strictly smaller intrinsic height
    by_height = sorted(entries, key=lambda e: (e[0].q_int, e[1], e[0].value))
    flags: dict[tuple[int, int], bool] = {}
    best_smaller: Fraction | None = None
    i = 0
    while i < len(by_height):
        j = i
        while j < len(by_height) and by_height[j][0].q_int == by_height[i][0].q_int:
            r, inf, _ = by_height[j]
            flags[(r.p, r.q)] = best_smaller is None or inf < best_smaller
            j += 1
        group_best = min(e[1] for e in by_height[i:j])
        best_smaller = group_best if best_smaller is None else min(best_smaller, group_best)
        i = j
    out = [
        BestApproximation(r, inf, sup, flags[(r.p, r.q)])
        for r, inf, sup in entries
    ]
    out.sort(key=lambda b: (b.distance_lower, b.distance_upper, b.rational.q_int, b.rational.value))
    if top is not None:
        out = out[:top]
    return out
