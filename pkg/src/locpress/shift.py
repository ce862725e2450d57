"""Subshifts of finite type: transition systems, finite words, periodic
orbits, the word metric, and maximal separated families of cylinders.

A one-sided subshift is described by a 0/1 transition table: a word
``x_1 x_2 ... x_n`` is admissible when every consecutive pair is an
allowed transition.  Finite words double as cylinder representatives;
statistical data attached to a word always uses its cyclic extension,
which matches the periodic-orbit decomposition used everywhere else in
this package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

Word = tuple[int, ...]

_PRESET_TABLES = {
    "full2": ((1, 1), (1, 1)),
    "full4": ((1, 1, 1, 1),) * 4,
    "golden": ((1, 1), (1, 0)),
    "fishA": (
        (1, 1, 0, 0),
        (1, 1, 0, 0),
        (0, 0, 1, 1),
        (0, 0, 1, 1),
    ),
}


class SymbolRangeError(ValueError):
    """A word contains a symbol outside the alphabet."""


class WordLengthError(ValueError):
    """A word is too short for the requested operation."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


@dataclass(frozen=True)
class TransitionSystem:
    """Alphabet size plus a 0/1 transition table.

    Every row and every column must contain at least one 1, so every
    symbol extends forward and backward to an infinite sequence.
    """

    alphabet_size: int
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        d = self.alphabet_size
        if d < 1:
            raise ValueError("alphabet size must be >= 1")
        if len(self.table) != d or any(len(row) != d for row in self.table):
            raise ValueError("transition table must be d x d")
        for row in self.table:
            for entry in row:
                if entry not in (0, 1):
                    raise ValueError("transition entries must be 0 or 1")
        if any(sum(row) == 0 for row in self.table):
            raise ValueError("every symbol needs an outgoing transition")
        if any(sum(self.table[a][b] for a in range(d)) == 0 for b in range(d)):
            raise ValueError("every symbol needs an incoming transition")

    @classmethod
    def preset(cls, name: str) -> "TransitionSystem":
        try:
            table = _PRESET_TABLES[name]
        except KeyError:
            raise ValueError(
                f"unknown preset {name!r}; known: {sorted(_PRESET_TABLES)}"
            ) from None
        return cls(len(table), table)

    @classmethod
    def parse(cls, text: str) -> "TransitionSystem":
        """Parse the plain-text block format: first line d, then d rows
        of d space-separated 0/1 digits."""
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty transition-system block")
        try:
            d = int(lines[0])
        except ValueError:
            raise ValueError(f"first line must be the alphabet size, got {lines[0]!r}")
        if len(lines) != d + 1:
            raise ValueError(f"expected {d} matrix rows, got {len(lines) - 1}")
        table = []
        for i, ln in enumerate(lines[1:]):
            entries = ln.split()
            if len(entries) != d:
                raise ValueError(f"row {i + 1}: expected {d} entries, got {len(entries)}")
            try:
                table.append(tuple(int(e) for e in entries))
            except ValueError:
                raise ValueError(f"row {i + 1}: entries must be integers") from None
        return cls(d, tuple(table))

    def allows(self, a: int, b: int) -> bool:
        return self.table[a][b] == 1

    def successors(self, a: int) -> tuple[int, ...]:
        return tuple(b for b in range(self.alphabet_size) if self.table[a][b])

    @property
    def is_full_shift(self) -> bool:
        return all(all(e == 1 for e in row) for row in self.table)

    def check_symbols(self, word: Sequence[int]) -> None:
        for s in word:
            if not (0 <= s < self.alphabet_size):
                raise SymbolRangeError(
                    f"symbol {s} outside alphabet of size {self.alphabet_size}"
                )


def is_admissible(word: Sequence[int], ts: TransitionSystem) -> bool:
    """True iff every consecutive transition of the word is allowed."""
    ts.check_symbols(word)
    return all(ts.allows(word[i], word[i + 1]) for i in range(len(word) - 1))


def is_cyclically_admissible(word: Sequence[int], ts: TransitionSystem) -> bool:
    """Admissible including the wrap-around transition last -> first."""
    return is_admissible(word, ts) and (
        len(word) == 0 or ts.allows(word[-1], word[0])
    )


def _int_matmul(A, B):
    n = len(A)
    return [
        [sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]


def count_admissible_words(ts: TransitionSystem, n: int) -> int:
    """Exact number of admissible words of length n.

    Equals the sum of all entries of the (n-1)-th power of the
    transition table; computed in unbounded integer arithmetic so large
    counts cannot silently overflow.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    counts = [1] * ts.alphabet_size  # words ending at each symbol
    for _ in range(n - 1):
        counts = [
            sum(counts[a] for a in range(ts.alphabet_size) if ts.table[a][b])
            for b in range(ts.alphabet_size)
        ]
    return sum(counts)


def enumerate_admissible_words(ts: TransitionSystem, length: int) -> Iterator[Word]:
    """Yield all admissible words of the given length, lexicographically."""
    if length < 1:
        raise ValueError("word length must be >= 1")
    d = ts.alphabet_size
    word: list[int] = []

    def rec() -> Iterator[Word]:
        if len(word) == length:
            yield tuple(word)
            return
        for a in range(d):
            if word and not ts.allows(word[-1], a):
                continue
            word.append(a)
            yield from rec()
            word.pop()

    yield from rec()


@dataclass(frozen=True)
class PeriodicOrbit:
    """A primitive periodic orbit, stored via its lexicographically
    minimal generator (an aperiodic word, admissible cyclically)."""

    generator: Word

    def __post_init__(self):
        g = self.generator
        if len(g) == 0:
            raise ValueError("empty generator")
        p = len(g)
        for r in range(1, p):
            rot = g[r:] + g[:r]
            if rot < g:
                raise ValueError("generator is not minimal among its rotations")
            if rot == g:
                raise ValueError("generator is a power of a shorter word")

    @property
    def period(self) -> int:
        return len(self.generator)

    def symbol(self, j: int) -> int:
        return self.generator[j % self.period]

    def window(self, start: int, length: int) -> Word:
        return tuple(self.symbol(start + i) for i in range(length))

    def label(self) -> str:
        if max(self.generator) < 10:
            return "".join(str(s) for s in self.generator)
        return ".".join(str(s) for s in self.generator)


def enumerate_periodic_orbits(
    ts: TransitionSystem, max_period: int
) -> Iterator[PeriodicOrbit]:
    """Stream every primitive cyclically-admissible necklace of period
    <= max_period, exactly once each.

    Uses the recursive pre-necklace successor scheme (aperiodic prefixes
    are emitted as soon as they appear) with transition-pruned branches,
    so reducible systems never pay for the full alphabet tree.
    """
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    d = ts.alphabet_size
    w = [0] * (max_period + 1)  # 1-indexed scratch

    def rec(t: int, p: int) -> Iterator[PeriodicOrbit]:
        # w[1..t-1] is a fixed pre-necklace whose longest aperiodic
        # prefix has length p; we extend position t.
        if t > max_period:
            return
        lo = w[t - p] if t > p else 0
        for a in range(lo, d):
            if t > 1 and not ts.allows(w[t - 1], a):
                continue
            w[t] = a
            new_p = p if a == lo else t
            if new_p == t and ts.allows(a, w[1]):
                yield PeriodicOrbit(tuple(w[1 : t + 1]))
            yield from rec(t + 1, new_p)

    yield from rec(1, 1)


def _mobius(n: int) -> int:
    result, m = 1, n
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def trace_power(ts: TransitionSystem, p: int) -> int:
    """Trace of the p-th power of the transition table (number of
    cyclically admissible words of length p), exact."""
    M = [list(row) for row in ts.table]
    P = M
    for _ in range(p - 1):
        P = _int_matmul(P, M)
    return sum(P[i][i] for i in range(ts.alphabet_size))


def primitive_orbit_count(ts: TransitionSystem, p: int) -> int:
    """Number of primitive orbits of period exactly p, from the cyclic
    word counts by Mobius inversion."""
    total = 0
    for e in range(1, p + 1):
        if p % e == 0:
            total += _mobius(p // e) * trace_power(ts, e)
    assert total % p == 0
    return total // p


@dataclass(frozen=True)
class BowenParams:
    """Parameters of the dynamical metric: base of the word metric, a
    time horizon n, and a depth k giving the separation scale base**k.

    The metric base here is the base of the product-topology metric and
    is unrelated to the run-length parameter of the fish potential.
    """

    horizon: int
    depth: int
    metric_base: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if not (0 < self.metric_base < 1):
            raise ValueError("metric base must lie in (0,1)")
        if self.horizon < 1 or self.depth < 1:
            raise ValueError("horizon and depth must be >= 1")

    @property
    def epsilon(self) -> Fraction:
        return self.metric_base**self.depth


def word_metric(x: Sequence[int], y: Sequence[int], base: Fraction) -> Fraction:
    """base ** (index of the first disagreement, 1-based); 0 when the
    words agree on their whole common range."""
    for i in range(min(len(x), len(y))):
        if x[i] != y[i]:
            return base ** (i + 1)
    return Fraction(0)


def bowen_distance(x: Sequence[int], y: Sequence[int], params: BowenParams) -> Fraction:
    """Dynamical distance over the horizon: max over shifts j < n of the
    word metric of the shifted pair."""
    n = params.horizon
    if min(len(x), len(y)) < n:
        raise WordLengthError(
            f"words must have length >= horizon {n}", required=n
        )
    best = Fraction(0)
    for j in range(n):
        d = word_metric(x[j:], y[j:], params.metric_base)
        if d > best:
            best = d
    return best


def separated_cylinder_family(
    ts: TransitionSystem, n: int, k: int
) -> list[Word]:
    """The maximal family of pairwise (n, base**k)-separated cylinder
    representatives: all admissible words of length n + k - 1.

    Distinct members differ somewhere in the first n + k - 1 symbols, so
    some shift j < n sees the disagreement within its first k symbols,
    giving dynamical distance >= base**k.  Two extensions of the same
    length-(n+k-1) word are never separated at that scale, hence
    maximality.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be >= 1")
    return list(enumerate_admissible_words(ts, n + k - 1))


@lru_cache(maxsize=None)
def _is_mixing_cached(table: tuple[tuple[int, ...], ...]) -> bool:
    d = len(table)
    bound = (d - 1) ** 2 + 1
    cur = [[bool(e) for e in row] for row in table]
    base = cur
    for _ in range(bound):
        if all(all(row) for row in cur):
            return True
        cur = [
            [any(cur[i][k] and base[k][j] for k in range(d)) for j in range(d)]
            for i in range(d)
        ]
    return all(all(row) for row in cur)


def is_mixing(ts: TransitionSystem) -> bool:
    """True iff some power of the transition table is strictly positive
    (search bounded by the Wielandt exponent (d-1)**2 + 1)."""
    return _is_mixing_cached(ts.table)
