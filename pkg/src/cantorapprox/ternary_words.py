"""Words over {0, 2}, subword statistics, triadic cylinders, and Cantor measure.

The alphabet is fixed to the two digits that can occur in the base-3 expansion
of a point of the middle-thirds Cantor set.  Words double as addresses of
triadic cylinders; the natural measure gives every cylinder of order n mass
2**-n.  All geometry here is exact (fractions.Fraction end to end).

Bit-packing convention used throughout the package: a word of length n is
encoded as an integer whose bit i is 1 iff digit i (0-based, leftmost first)
is the symbol 2.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .errors import ResourceCapExceeded

ALPHABET = (0, 2)

#: Default cap on exhaustive word-space sweeps (2**24 words).
EXHAUSTIVE_CAP = 24


@dataclass(frozen=True)
class DigitWord:
    """Immutable finite word over {0, 2}."""

    digits: tuple[int, ...]

    def __post_init__(self):
        for d in self.digits:
            if d not in ALPHABET:
                raise ValueError(f"invalid digit {d!r}: alphabet is {{0, 2}}")

    @classmethod
    def from_string(cls, s: str) -> "DigitWord":
        return cls(tuple(int(c) for c in s))

    @classmethod
    def from_bits(cls, bits: int, length: int) -> "DigitWord":
        """Decode the package-wide bit packing (bit i set -> digit i is 2)."""
        return cls(tuple(2 * ((bits >> i) & 1) for i in range(length)))

    def bits(self) -> int:
        b = 0
        for i, d in enumerate(self.digits):
            if d == 2:
                b |= 1 << i
        return b

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return DigitWord(self.digits[item])
        return self.digits[item]

    def __add__(self, other: "DigitWord") -> "DigitWord":
        return DigitWord(self.digits + other.digits)

    def __str__(self) -> str:
        return "".join(str(d) for d in self.digits)

    def __repr__(self) -> str:
        return f"DigitWord({str(self)!r})"


EMPTY_WORD = DigitWord(())


def all_words(n: int) -> Iterator[DigitWord]:
    """All 2**n words of length n, in bit-packed order."""
    for bits in range(1 << n):
        yield DigitWord.from_bits(bits, n)


def subword_length(n: int) -> int:
    """floor(log2 n): the subword length paired with words of length n >= 2
    by the richness filter ``fn_membership``."""
    if n < 1:
        raise ValueError("n must be positive")
    return n.bit_length() - 1


def complexity(w: DigitWord, t: int) -> int:
    """Number of distinct contiguous subwords of length t occurring in w."""
    n = len(w)
    if not 1 <= t <= n:
        raise ValueError(f"subword length {t} out of range [1, {n}]")
    return len({w.digits[i : i + t] for i in range(n - t + 1)})


def pair_statistic(w: DigitWord, k: int) -> int:
    """Sum over all length-k patterns of the squared occurrence count in w."""
    n = len(w)
    if not 1 <= k <= n:
        raise ValueError(f"subword length {k} out of range [1, {n}]")
    counts = Counter(w.digits[i : i + k] for i in range(n - k + 1))
    return sum(c * c for c in counts.values())


def expected_pair_statistic(n: int, k: int) -> Fraction:
    """Exact average of ``pair_statistic`` over all 2**n words of length n:
    (n-k+1) + (n-k)(n-k+1) * 2**-k."""
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range [1, {n}]")
    return Fraction(n - k + 1) + Fraction((n - k) * (n - k + 1), 2**k)


def fn_membership(w: DigitWord, k: int | None = None) -> bool:
    """Richness filter: does w of length n have at least n/4 distinct subwords
    of length floor(log2 n)?

    Words passing the filter generate well-spaced rational families.  The
    comparison is the exact real one (4 * C >= n).  ``k`` may override the
    default subword length for experiments.
    """
    n = len(w)
    if n < 2:
        raise ValueError("richness filter requires words of length >= 2")
    if k is None:
        k = subword_length(n)
    return 4 * complexity(w, k) >= n


def required_positions(n: int) -> int:
    """ceil(n/4): the number of planting positions a rich word must supply."""
    return -(-n // 4)


def distinct_subword_positions(
    w: DigitWord, k: int | None = None
) -> list[tuple[int, DigitWord]]:
    """First-occurrence offsets of ceil(n/4) pairwise distinct length-k subwords.

    Scans left to right and keeps the first offset of each new subword, so the
    output is deterministic.  Requires ``fn_membership(w)``.
    """
    n = len(w)
    if k is None:
        k = subword_length(n)
    if not fn_membership(w, k):
        raise ValueError("word fails the richness filter; no position set exists")
    need = required_positions(n)
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, DigitWord]] = []
    for off in range(n - k + 1):
        sub = w.digits[off : off + k]
        if sub not in seen:
            seen.add(sub)
            out.append((off, DigitWord(sub)))
            if len(out) == need:
                break
    return out


# ---------------------------------------------------------------------------
# Richness census (exhaustive via bit tricks, or sampled)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FnCensus:
    """Count (or estimate) of rich words of length n."""

    n: int
    k: int
    mode: str  # "exhaustive" | "sampled"
    total: int  # 2**n
    count: int | None = None  # exhaustive
    estimate: float | None = None  # sampled
    std_error: float | None = None
    sample_count: int | None = None
    seed: int | None = None


def _exhaustive_fn_count_chunk(n: int, k: int, start: int, stop: int) -> int:
    """Rich words with bit patterns in [start, stop), counted via a per-word
    bitset of observed subword codes.  Needs k <= 6 so the bitset fits uint64."""
    words = np.arange(start, stop, dtype=np.uint64)
    seen = np.zeros(words.shape, dtype=np.uint64)
    mask = np.uint64((1 << k) - 1)
    one = np.uint64(1)
    for off in range(n - k + 1):
        sub = (words >> np.uint64(off)) & mask
        seen |= np.left_shift(one, sub)
    distinct = np.bitwise_count(seen)
    return int(np.count_nonzero(4 * distinct.astype(np.int64) >= n))


def census_fn(
    n: int,
    mode: str = "exhaustive",
    *,
    k: int | None = None,
    sample_count: int | None = None,
    seed: int | None = None,
    cap: int = EXHAUSTIVE_CAP,
    chunk_bits: int = 20,
) -> FnCensus:
    """Count rich words of length n.

    Exhaustive mode sweeps all 2**n words (n capped), partitioned by bit
    prefix into chunks whose counts merge by addition, so the result does not
    depend on the partitioning.  Sampled mode draws ``sample_count`` words
    from the counter-based stream keyed by ``seed`` and returns an unbiased
    estimate with its standard error.
    """
    if n < 2:
        raise ValueError("richness census requires n >= 2")
    if k is None:
        k = subword_length(n)
    total = 1 << n
    if mode == "exhaustive":
        if n > cap:
            raise ResourceCapExceeded(
                f"exhaustive richness census capped at n <= {cap}, got {n}"
            )
        if k <= 6:
            count = 0
            step = 1 << min(chunk_bits, n)
            for start in range(0, total, step):
                count += _exhaustive_fn_count_chunk(n, k, start, min(start + step, total))
        else:
            count = sum(
                1 for w in all_words(n) if fn_membership(w, k)
            )
        return FnCensus(n=n, k=k, mode=mode, total=total, count=count)
    if mode == "sampled":
        if sample_count is None or seed is None:
            raise ValueError("sampled mode requires sample_count and seed")
        hits = 0
        for i in range(sample_count):
            w = random_word(seed, i, n)
            if fn_membership(w, k):
                hits += 1
        p_hat = hits / sample_count
        est = total * p_hat
        se = total * math.sqrt(max(p_hat * (1 - p_hat), 0.0) / sample_count)
        return FnCensus(
            n=n,
            k=k,
            mode=mode,
            total=total,
            estimate=est,
            std_error=se,
            sample_count=sample_count,
            seed=seed,
        )
    raise ValueError(f"unknown mode {mode!r}")


def pair_statistic_exhaustive_total(n: int, k: int, chunk_bits: int = 18) -> int:
    """Sum of ``pair_statistic(w, k)`` over all 2**n words, by enumeration.

    Uses the identity pair_statistic(w, k) == #{(i, j): w[i:i+k] == w[j:j+k]}
    (ordered offset pairs) and counts equal-subword coincidences across the
    whole word space, chunked by bit prefix.  Independent of the closed-form
    expectation, so it serves as its oracle.
    """
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range [1, {n}]")
    if n > EXHAUSTIVE_CAP:
        raise ResourceCapExceeded(f"exhaustive sweep capped at n <= {EXHAUSTIVE_CAP}")
    offsets = n - k + 1
    mask = np.uint64((1 << k) - 1)
    total = (1 << n) * offsets  # diagonal pairs i == j
    step = 1 << min(chunk_bits, n)
    for start in range(0, 1 << n, step):
        words = np.arange(start, min(start + step, 1 << n), dtype=np.uint64)
        subs = [(words >> np.uint64(i)) & mask for i in range(offsets)]
        for i in range(offsets):
            for j in range(i + 1, offsets):
                total += 2 * int(np.count_nonzero(subs[i] == subs[j]))
    return total


# ---------------------------------------------------------------------------
# Counter-based reproducible word stream
# ---------------------------------------------------------------------------

def _stream_block(seed: int, index: int, block: int) -> bytes:
    msg = f"cantorapprox:{seed}:{index}:{block}".encode()
    return hashlib.sha256(msg).digest()


def random_word(seed: int, index: int, length: int) -> DigitWord:
    """Word of i.i.d. uniform digits from a counter-based stream.

    The digit at position p depends only on (seed, index, p), so results are
    identical however samples are distributed over workers.
    """
    digits = []
    for block in range(-(-length // 256)):
        raw = _stream_block(seed, index, block)
        for byte in raw:
            for bit in range(8):
                digits.append(2 * ((byte >> bit) & 1))
                if len(digits) == length:
                    return DigitWord(tuple(digits))
    return DigitWord(tuple(digits[:length]))


# ---------------------------------------------------------------------------
# Cylinders and measure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    """Order-n triadic cylinder: the points whose expansion starts with ``word``.

    As an interval it is [left_endpoint, left_endpoint + 3**-n]; its Cantor
    measure is 2**-n.
    """

    word: DigitWord

    @property
    def order(self) -> int:
        return len(self.word)

    @property
    def left_endpoint(self) -> Fraction:
        x = Fraction(0)
        for i, d in enumerate(self.word, start=1):
            if d:
                x += Fraction(d, 3**i)
        return x

    @property
    def length(self) -> Fraction:
        return Fraction(1, 3**self.order)

    @property
    def measure(self) -> Fraction:
        return Fraction(1, 2**self.order)

    def interval(self) -> tuple[Fraction, Fraction]:
        left = self.left_endpoint
        return left, left + self.length


@dataclass(frozen=True)
class MeasureBound:
    """Certified two-sided bound on the Cantor measure of an interval.

    ``lower`` counts depth-cylinders fully inside, ``upper`` those meeting the
    interval; the gap is at most the mass of the two cylinders straddling the
    interval's endpoints.
    """

    lower: Fraction
    upper: Fraction
    depth: int

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper <= 1):
            raise ValueError("bounds must satisfy 0 <= lower <= upper <= 1")
        if self.upper - self.lower > Fraction(2, 2**self.depth):
            raise ValueError("bound width exceeds 2 * 2**-depth")


def measure_interval(a: Fraction, b: Fraction, depth: int) -> MeasureBound:
    """Cantor measure of [a, b] bracketed by a depth-``depth`` cylinder cover.

    Descends the cylinder tree, pruning subtrees that are entirely inside or
    entirely outside [a, b]; only the at-most-two boundary chains are refined
    to full depth, so the cost is linear in ``depth``.
    """
    a, b = Fraction(a), Fraction(b)
    if a > b:
        raise ValueError("need a <= b")
    if depth < 1:
        raise ValueError("depth must be positive")
    lower = Fraction(0)
    upper = Fraction(0)
    # stack entries: (order d, left endpoint); mass of the node is 2**-d
    stack: list[tuple[int, Fraction]] = [(0, Fraction(0))]
    while stack:
        d, left = stack.pop()
        right = left + Fraction(1, 3**d)
        if left > b or right < a:
            continue
        if a <= left and right <= b:
            mass = Fraction(1, 2**d)
            lower += mass
            upper += mass
            continue
        if d == depth:
            upper += Fraction(1, 2**d)
            continue
        third = Fraction(1, 3 ** (d + 1))
        stack.append((d + 1, left))
        stack.append((d + 1, left + 2 * third))
    return MeasureBound(lower=lower, upper=upper, depth=depth)
