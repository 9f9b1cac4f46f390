"""Exhaustive censuses of the rational points of the Cantor set.

Counting sets, indexed by denominator brackets (3**(n-1), 3**n]:

* level counts: canonical expansions with prelength + period == n;
* bracket counts: reduced members with denominator in the bracket;
* purely periodic bracket counts (prelength 0);
* short-period subsets of a bracket (period <= M + log2 n).

Two independent strategies are implemented and cross-validated wherever both
are feasible:

* denominator scan: walk reduced fractions p/q for q up to a cap and test
  membership by base-3 long division;
* expansion enumeration: walk period words (bit-packed, vectorized), reduce
  the purely periodic fraction by its gcd, and attach preperiod counts
  combinatorially.

The expansion route relies on the exact decomposition

    #bracket(n) = sum_j pre_count(n - j) * #purely_periodic_bracket(j)

with pre_count(0) = 1 and pre_count(l) = 2**(l-1): a canonical preperiod of
length l has its last digit forced (it must differ from the period's last
digit) and the other l-1 digits free.  Its completeness for bracket n needs
every purely periodic member with denominator <= 3**n to have period within
the enumeration cap; this is verified against the denominator scan wherever
the scan is feasible and recorded as metadata otherwise.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from pathlib import Path
from typing import Iterator

import numpy as np

from ._meta import CODE_VERSION
from .cantor_rationals import (
    CantorRational,
    PeriodicExpansion,
    expansion_of,
    to_rational,
)
from .errors import NotInCantorSet, ResourceCapExceeded
from .ternary_words import DigitWord

#: Denominator-scan cap (3**6): each test is O(q) small-integer steps.
SCAN_QMAX_CAP = 729

#: Period-word enumeration cap: 2**cap int64 rows per period length.
PERIOD_CAP_DEFAULT = 20
PERIOD_CAP_HARD = 26

#: Level cap for expansion streams.
LEVEL_CAP = 24

METHOD_SCAN = "denominator-scan"
METHOD_ENUM = "expansion-enumeration"
METHOD_FORMULA = "necklace-formula"


def bracket_of(q: int) -> int:
    """Smallest n >= 0 with q <= 3**n, i.e. the bracket (3**(n-1), 3**n] holding q."""
    if q < 1:
        raise ValueError("q must be positive")
    n = 0
    t = 1
    while t < q:
        t *= 3
        n += 1
    return n


def pre_count(ell: int) -> int:
    """Number of admissible preperiods of length ell for a fixed period word."""
    if ell < 0:
        raise ValueError("negative preperiod length")
    return 1 if ell == 0 else 1 << (ell - 1)


@dataclass(frozen=True)
class CensusRecord:
    """One exact count with its method and conjectured growth reference."""

    kind: str  # "Tn" | "Nn" | "Pm" | "Fn" | "A"
    n: int
    count: int
    method: str
    reference: Fraction | None
    m_cap: int | None = None
    M: Fraction | None = None

    @property
    def normalized(self) -> Fraction | None:
        if self.reference is None or self.reference == 0:
            return None
        return Fraction(self.count) / self.reference

    def params_key(self) -> str:
        parts = [f"n={self.n}", f"method={self.method}"]
        if self.m_cap is not None:
            parts.append(f"m_cap={self.m_cap}")
        if self.M is not None:
            parts.append(f"M={self.M}")
        return "&".join(parts)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "count": str(self.count),
            "method": self.method,
            "reference": [str(self.reference.numerator), str(self.reference.denominator)]
            if self.reference is not None
            else None,
            "m_cap": self.m_cap,
            "M": str(self.M) if self.M is not None else None,
        }


# ---------------------------------------------------------------------------
# Expansion-side machinery
# ---------------------------------------------------------------------------

def _prime_divisors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def primitive_word_count(m: int) -> int:
    """Words of length m over a binary alphabet whose minimal period is m
    (Moebius inversion of 2**m over divisors)."""
    total = 0
    for d in range(1, m + 1):
        if m % d == 0:
            total += _moebius(m // d) * (1 << d)
    return total


def _moebius(n: int) -> int:
    mu = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            mu = -mu
        d += 1
    if n > 1:
        mu = -mu
    return mu


def _minimal_period_mask(m: int, bits: np.ndarray) -> np.ndarray:
    """Boolean mask of bit-packed words of length m with minimal period m."""
    minimal = np.ones(bits.shape, dtype=bool)
    for p in _prime_divisors(m):
        d = m // p
        mask = np.int64((1 << (m - d)) - 1)
        minimal &= (bits >> np.int64(d)) != (bits & mask)
    return minimal


def iter_primitive_period_bits(m: int) -> Iterator[int]:
    """Bit patterns of length-m words with minimal period m (ascending)."""
    checks = [(m // p, (1 << (m - m // p)) - 1) for p in _prime_divisors(m)]
    for bits in range(1 << m):
        if all((bits >> d) != (bits & mask) for d, mask in checks):
            yield bits


@dataclass(frozen=True)
class PurelyPeriodicTable:
    """Histogram of purely periodic reduced members by (bracket, period).

    ``counts[(j, m)]`` is the number of purely periodic reduced members with
    denominator in (3**(j-1), 3**j] and minimal period m, for m <= period_cap.
    """

    period_cap: int
    counts: dict[tuple[int, int], int]

    def bracket_count(self, j: int) -> int:
        return sum(c for (jj, _), c in self.counts.items() if jj == j)

    def bracket_count_with_period_cap(self, j: int, max_period_check) -> int:
        """Members of bracket j whose period m satisfies max_period_check(m)."""
        return sum(
            c for (jj, m), c in self.counts.items() if jj == j and max_period_check(m)
        )

    def max_period_in_bracket(self, j: int) -> int:
        ms = [m for (jj, m) in self.counts if jj == j]
        return max(ms) if ms else 0


@lru_cache(maxsize=8)
def purely_periodic_table(period_cap: int = PERIOD_CAP_DEFAULT) -> PurelyPeriodicTable:
    """Enumerate all period words up to the cap and bucket reduced denominators."""
    if period_cap > PERIOD_CAP_HARD:
        raise ResourceCapExceeded(
            f"period enumeration capped at {PERIOD_CAP_HARD}, got {period_cap}"
        )
    counts: dict[tuple[int, int], int] = {}
    pow3 = np.array([3**i for i in range(period_cap + 1)], dtype=np.int64)
    for m in range(1, period_cap + 1):
        bits = np.arange(1 << m, dtype=np.int64)
        sel = bits[_minimal_period_mask(m, bits)]
        vals = np.zeros(sel.shape, dtype=np.int64)
        for i in range(m):
            weight = np.int64(2 * 3 ** (m - 1 - i))
            vals += ((sel >> np.int64(i)) & np.int64(1)) * weight
        q_int = np.int64(3**m - 1)
        qprime = q_int // np.gcd(vals, q_int)
        brackets = np.searchsorted(pow3, qprime, side="left")
        for j, c in zip(*np.unique(brackets, return_counts=True)):
            counts[(int(j), m)] = counts.get((int(j), m), 0) + int(c)
    return PurelyPeriodicTable(period_cap=period_cap, counts=counts)


def enumerate_expansions(
    max_total: int, cap: int = LEVEL_CAP
) -> Iterator[CantorRational]:
    """Every canonical expansion with prelength + period <= max_total, once.

    Deterministic order: by level, then period length, then period bits, then
    preperiod bits.  Canonical pairs biject with the rationals, so no
    deduplication is needed.
    """
    if max_total > cap:
        raise ResourceCapExceeded(f"expansion stream capped at level {cap}")
    for n in range(1, max_total + 1):
        yield from _expansions_at_level(n)


def _expansions_at_level(n: int) -> Iterator[CantorRational]:
    for m in range(1, n + 1):
        ell = n - m
        for per_bits in iter_primitive_period_bits(m):
            per = DigitWord.from_bits(per_bits, m)
            per_last = per[m - 1]
            if ell == 0:
                yield to_rational(PeriodicExpansion(DigitWord(()), per))
                continue
            forced_bit = 1 if per_last == 0 else 0  # last preperiod digit differs
            for low in range(1 << (ell - 1)):
                pre_bits = low | (forced_bit << (ell - 1))
                pre = DigitWord.from_bits(pre_bits, ell)
                yield to_rational(PeriodicExpansion(pre, per))


def level_count(n: int, method: str = METHOD_FORMULA) -> int:
    """Number of canonical expansions at level n (= rationals with l + m = n)."""
    if method == METHOD_FORMULA:
        return sum(
            primitive_word_count(m) * pre_count(n - m) for m in range(1, n + 1)
        )
    if method == METHOD_ENUM:
        total = 0
        for m in range(1, n + 1):
            bits = np.arange(1 << m, dtype=np.int64)
            prim = int(np.count_nonzero(_minimal_period_mask(m, bits)))
            total += prim * pre_count(n - m)
        return total
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Denominator scan
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _scan_members(q_max: int) -> tuple[CantorRational, ...]:
    if q_max > SCAN_QMAX_CAP:
        raise ResourceCapExceeded(
            f"denominator scan capped at q <= {SCAN_QMAX_CAP}, got {q_max}"
        )
    out: list[CantorRational] = []
    for q in range(1, q_max + 1):
        for p in range(0, q + 1):
            if gcd(p, q) != 1:
                continue
            try:
                e = expansion_of(p, q)
            except NotInCantorSet:
                continue
            out.append(to_rational(e))
    return tuple(out)


def enumerate_by_denominator(q_max: int) -> Iterator[CantorRational]:
    """Every reduced member with q <= q_max, in increasing (q, p) order."""
    yield from _scan_members(q_max)


# ---------------------------------------------------------------------------
# Census operations
# ---------------------------------------------------------------------------

def count_Tn(n: int, method: str = METHOD_FORMULA) -> CensusRecord:
    """Canonical expansions at level n; reference is the n * 2**n envelope."""
    if n > LEVEL_CAP and method == METHOD_ENUM:
        raise ResourceCapExceeded(f"enumeration count capped at level {LEVEL_CAP}")
    count = level_count(n, method=method)
    return CensusRecord(
        kind="Tn", n=n, count=count, method=method, reference=Fraction(n * 2**n)
    )


def count_Pm(
    m: int,
    method: str = METHOD_ENUM,
    period_cap: int = PERIOD_CAP_DEFAULT,
) -> CensusRecord:
    """Purely periodic reduced members with denominator in (3**(m-1), 3**m].

    The bracket can be populated by expansions of any period (the minimal
    period is the multiplicative order of 3 modulo the reduced denominator),
    so the enumeration walks all period lengths up to ``period_cap`` and its
    completeness is cross-validated against the scan where feasible.
    """
    if method == METHOD_ENUM:
        table = purely_periodic_table(period_cap)
        count = table.bracket_count(m)
        return CensusRecord(
            kind="Pm",
            n=m,
            count=count,
            method=method,
            reference=Fraction(2**m),
            m_cap=period_cap,
        )
    if method == METHOD_SCAN:
        lo, hi = 3 ** (m - 1) if m else 0, 3**m
        members = [
            r
            for r in _scan_members(hi)
            if lo < r.q <= hi and r.prelength == 0
        ]
        return CensusRecord(
            kind="Pm", n=m, count=len(members), method=method, reference=Fraction(2**m)
        )
    raise ValueError(f"unknown method {method!r}")


def count_Nn(
    n: int,
    method: str = METHOD_ENUM,
    period_cap: int = PERIOD_CAP_DEFAULT,
) -> CensusRecord:
    """Reduced members with denominator in (3**(n-1), 3**n]."""
    if method == METHOD_ENUM:
        table = purely_periodic_table(period_cap)
        count = sum(
            pre_count(n - j) * table.bracket_count(j) for j in range(0, n + 1)
        )
        return CensusRecord(
            kind="Nn",
            n=n,
            count=count,
            method=method,
            reference=Fraction(n * 2**n),
            m_cap=period_cap,
        )
    if method == METHOD_SCAN:
        lo, hi = 3 ** (n - 1), 3**n
        members = [r for r in _scan_members(hi) if lo < r.q <= hi]
        return CensusRecord(
            kind="Nn", n=n, count=len(members), method=method, reference=Fraction(n * 2**n)
        )
    raise ValueError(f"unknown method {method!r}")


def _period_within(m: int, M: Fraction, n: int) -> bool:
    """Exact test of m <= M + log2(n) for rational M."""
    a, b = M.numerator, M.denominator
    e = m * b - a  # compare 2**e with n**b
    if e <= 0:
        return True
    return 2**e <= n**b


def count_A(
    n: int,
    M: Fraction | int,
    method: str = METHOD_ENUM,
    period_cap: int = PERIOD_CAP_DEFAULT,
) -> CensusRecord:
    """Members of bracket n whose period is at most M + log2 n.

    Asserts the combinatorial envelope count <= 2**(M+2) * n * 2**n (exact
    comparison, valid for rational M).
    """
    M = Fraction(M)
    if M <= 0:
        raise ValueError("M must be positive")
    if method == METHOD_ENUM:
        table = purely_periodic_table(period_cap)
        count = sum(
            pre_count(n - j)
            * table.bracket_count_with_period_cap(j, lambda m: _period_within(m, M, n))
            for j in range(0, n + 1)
        )
        m_cap: int | None = period_cap
    elif method == METHOD_SCAN:
        lo, hi = 3 ** (n - 1), 3**n
        count = sum(
            1
            for r in _scan_members(hi)
            if lo < r.q <= hi and _period_within(r.period_length, M, n)
        )
        m_cap = None
    else:
        raise ValueError(f"unknown method {method!r}")
    # envelope: count <= 2**(M+2) * n * 2**n, compared exactly
    a, b = (M + 2).numerator, (M + 2).denominator
    if count > 0 and (count ** b) > (2 ** a) * ((n * 2**n) ** b):
        raise AssertionError(
            f"short-period count {count} exceeds envelope 2**(M+2)*n*2**n at n={n}, M={M}"
        )
    reference = Fraction(2) ** int(M + 2) * n * 2**n if M.denominator == 1 else None
    return CensusRecord(
        kind="A", n=n, count=count, method=method, reference=reference, m_cap=m_cap, M=M
    )


def verify_member_bounds(n: int) -> bool:
    """Memberwise prelength/period bounds on bracket n via the scan:
    every member has prelength <= n and prelength + period >= n."""
    lo, hi = 3 ** (n - 1), 3**n
    for r in _scan_members(hi):
        if lo < r.q <= hi:
            if r.prelength > n or r.prelength + r.period_length < n:
                return False
    return True


def bracket_inequality_rhs(n: int, period_cap: int = PERIOD_CAP_DEFAULT) -> int:
    """sum_{m <= n} 2**(n-m) * #purely_periodic_bracket(m) (the convolution
    envelope that dominates the bracket count)."""
    table = purely_periodic_table(period_cap)
    return sum(2 ** (n - j) * table.bracket_count(j) for j in range(0, n + 1))


@dataclass(frozen=True)
class ConjectureTable:
    """Evidence rows for the growth conjectures; no pass/fail is attached."""

    rows: list[CensusRecord]
    agreement: dict[tuple[str, int], bool] = field(default_factory=dict)


def conjecture_table(
    n_max: int,
    period_cap: int = PERIOD_CAP_DEFAULT,
    scan_qmax: int = SCAN_QMAX_CAP,
) -> ConjectureTable:
    """Emit level, bracket, and purely periodic counts with normalization
    ratios up to n_max; methods are cross-checked where both are feasible."""
    rows: list[CensusRecord] = []
    agreement: dict[tuple[str, int], bool] = {}
    scan_nmax = bracket_of(scan_qmax)
    if 3**scan_nmax > scan_qmax:
        scan_nmax -= 1
    for n in range(1, n_max + 1):
        rows.append(count_Tn(n, METHOD_FORMULA))
        rec_enum = count_Nn(n, METHOD_ENUM, period_cap)
        rows.append(rec_enum)
        if n <= scan_nmax:
            rec_scan = count_Nn(n, METHOD_SCAN)
            rows.append(rec_scan)
            agreement[("Nn", n)] = rec_scan.count == rec_enum.count
        p_enum = count_Pm(n, METHOD_ENUM, period_cap)
        rows.append(p_enum)
        if n <= scan_nmax:
            p_scan = count_Pm(n, METHOD_SCAN)
            rows.append(p_scan)
            agreement[("Pm", n)] = p_scan.count == p_enum.count
    return ConjectureTable(rows=rows, agreement=agreement)


# ---------------------------------------------------------------------------
# Versioned cache
# ---------------------------------------------------------------------------

class CensusCache:
    """Census records cached as <cache>/<kind>/<params>.json.

    Entries embed the package version and a checksum of the record payload;
    stale or corrupted entries are recomputed, never silently reused.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, kind: str, params_key: str) -> Path:
        safe = params_key.replace("/", "_")
        return self.root / kind / f"{safe}.json"

    @staticmethod
    def _checksum(record_dict: dict) -> str:
        blob = json.dumps(record_dict, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def get(self, kind: str, params_key: str) -> dict | None:
        path = self._path(kind, params_key)
        if not path.exists():
            return None
        try:
            payload = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            return None
        if payload.get("code_version") != CODE_VERSION:
            return None
        record = payload.get("record")
        if record is None or self._checksum(record) != payload.get("checksum"):
            return None
        return record

    def put(self, kind: str, params_key: str, record_dict: dict) -> None:
        path = self._path(kind, params_key)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "code_version": CODE_VERSION,
            "checksum": self._checksum(record_dict),
            "record": record_dict,
        }
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True, indent=1))
        tmp.replace(path)
