"""Finite stages of the back-and-forth matching of countable dense sets.

Each oracle enumerates a countable dense subset of (0, 1) and compares its
elements exactly.  Stage 1 pairs the first elements; even stages take the
first unmatched element of B and find a partner in A, odd stages the
reverse.  Wherever a free choice is allowed, the enumeration-first
admissible element is taken.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

from .algver import ZPoly
from .cfseq import Quotients, classify_terminal
from .chorus import PWLHomeo
from .engine import euclid_cf
from .realkernel import DomainError, QuadIrr

Handle = Union[Fraction, QuadIrr]

SEARCH_LIMIT = 2_000_000


class OracleExhausted(RuntimeError):
    pass


def compare(a: Handle, b: Handle) -> int:
    return (a > b) - (a < b)


class DenseOracle:
    """A lazily enumerated countable dense subset of (0, 1)."""

    def __init__(self, name: str, source: Callable[[], Iterator[Handle]]):
        self.name = name
        self._source = source
        self._it = source()
        self._cache: list[Handle] = []

    def enumerate(self, i: int) -> Handle:
        while len(self._cache) <= i:
            try:
                self._cache.append(next(self._it))
            except StopIteration:
                raise OracleExhausted(f"oracle {self.name} ended after {len(self._cache)} elements")
        return self._cache[i]

    def first(self, n: int) -> list[Handle]:
        return [self.enumerate(i) for i in range(n)]

    def __iter__(self):
        for i in itertools.count():
            yield self.enumerate(i)

    def __repr__(self):
        return f"DenseOracle({self.name})"


def calkin_wilf() -> Iterator[Fraction]:
    """Every positive rational once: q -> 1 / (2 floor(q) - q + 1)."""
    q = Fraction(1)
    while True:
        yield q
        q = 1 / (2 * math.floor(q) - q + 1)


def _rationals() -> Iterator[Fraction]:
    return (q for q in calkin_wilf() if q < 1)


def _dyadics() -> Iterator[Fraction]:
    for k in itertools.count(1):
        for m in range(1, 1 << k, 2):
            yield Fraction(m, 1 << k)


def _quadirrs() -> Iterator[QuadIrr]:
    """Canonical (p, q, D, r) in (0, 1) ordered by height max(|p|, |q|, D, r)."""
    for h in itertools.count(2):
        for p, q, D, r in itertools.product(range(-h, h + 1), range(-h, h + 1), range(2, h + 1), range(1, h + 1)):
            if max(abs(p), abs(q), D, r) != h or q == 0:
                continue
            try:
                x = QuadIrr(p, q, D, r)
            except DomainError:
                continue
            if (x.p, x.q, x.D, x.r) != (p, q, D, r):
                continue  # not canonical; the canonical tuple is listed elsewhere
            if x > 0 and x < 1:
                yield x


def oracle_rationals() -> DenseOracle:
    return DenseOracle("rationals", _rationals)


def oracle_dyadics() -> DenseOracle:
    return DenseOracle("dyadics", _dyadics)


def oracle_quadirr() -> DenseOracle:
    return DenseOracle("quadirr", _quadirrs)


def oracle_Q1d(d: int) -> DenseOracle:
    """Rationals whose continued fraction ends in d + 1."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return DenseOracle(f"Q1d({d})", lambda: (q for q in _rationals() if classify_terminal(euclid_cf(q)) == d))


BUILTIN_ORACLES: dict[str, Callable[[], DenseOracle]] = {
    "rationals": oracle_rationals,
    "dyadics": oracle_dyadics,
    "quadirr": oracle_quadirr,
    "q1d1": lambda: oracle_Q1d(1),
    "q1d2": lambda: oracle_Q1d(2),
}


def oracle_by_name(name: str) -> DenseOracle:
    name = name.lower()
    if name.startswith("q1d") and name[3:].isdigit():
        return oracle_Q1d(int(name[3:]))
    try:
        return BUILTIN_ORACLES[name]()
    except KeyError:
        raise ValueError(f"unknown oracle {name!r}; choose from {sorted(BUILTIN_ORACLES)} or q1d<d>")


# ---------------------------------------------------------------------------
# Partial isomorphisms


@dataclass
class PartialIso:
    pairs: list[tuple[Handle, Handle]] = field(default_factory=list)
    stage: int = 0
    log: list[tuple[int, Handle, Handle]] = field(default_factory=list)

    def add(self, a: Handle, b: Handle):
        self.stage += 1
        self.pairs.append((a, b))
        self.log.append((self.stage, a, b))

    def domain(self) -> list[Handle]:
        return [a for a, _ in self.pairs]

    def image(self) -> list[Handle]:
        return [b for _, b in self.pairs]

    def order_preserving(self) -> bool:
        for (a, b), (c, d) in itertools.combinations(self.pairs, 2):
            if compare(a, c) != compare(b, d):
                return False
        return True

    def to_tsv(self) -> str:
        return "stage\ta\tb\n" + "".join(f"{s}\t{a}\t{b}\n" for s, a, b in self.log)


def _neighbours(x: Handle, matched: list[tuple[Handle, Handle]]) -> tuple[Optional[Handle], Optional[Handle]]:
    """Partners of the nearest matched elements below and above x (on the source side)."""
    below = [p for p in matched if p[0] < x]
    above = [p for p in matched if p[0] > x]
    lo = max(below, key=lambda p: _Key(p[0]))[1] if below else None
    hi = min(above, key=lambda p: _Key(p[0]))[1] if above else None
    return lo, hi


class _Key:
    # total-order wrapper so max/min work across Fraction and QuadIrr
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v < other.v


def _first_admissible(oracle: DenseOracle, used: set, lo: Optional[Handle], hi: Optional[Handle]) -> Handle:
    for i in range(SEARCH_LIMIT):
        e = oracle.enumerate(i)
        if e in used:
            continue
        if lo is not None and not e > lo:
            continue
        if hi is not None and not e < hi:
            continue
        return e
    raise OracleExhausted(f"no admissible element of {oracle.name} within {SEARCH_LIMIT} entries")


def _first_unmatched(oracle: DenseOracle, used: set) -> Handle:
    for i in range(SEARCH_LIMIT):
        e = oracle.enumerate(i)
        if e not in used:
            return e
    raise OracleExhausted(f"{oracle.name} has no unmatched element within {SEARCH_LIMIT} entries")


def _forth(iso: PartialIso, A: DenseOracle, B: DenseOracle, used_a: set, used_b: set):
    # pull the first unmatched a; place b between the images of a's neighbours
    a = _first_unmatched(A, used_a)
    lo, hi = _neighbours(a, iso.pairs)
    b = _first_admissible(B, used_b, lo, hi)
    return a, b


def _back(iso: PartialIso, A: DenseOracle, B: DenseOracle, used_a: set, used_b: set):
    b = _first_unmatched(B, used_b)
    flipped = [(y, x) for x, y in iso.pairs]
    lo, hi = _neighbours(b, flipped)
    a = _first_admissible(A, used_a, lo, hi)
    return a, b


def back_and_forth(A: DenseOracle, B: DenseOracle, stages: int) -> PartialIso:
    """Run ``stages`` stages; odd stages pull from A, even stages from B."""
    if stages < 1:
        raise ValueError("stages must be >= 1")
    iso = PartialIso()
    used_a: set = set()
    used_b: set = set()
    for n in range(1, stages + 1):
        if n == 1:
            a, b = A.enumerate(0), B.enumerate(0)
        elif n % 2 == 0:
            a, b = _back(iso, A, B, used_a, used_b)
        else:
            a, b = _forth(iso, A, B, used_a, used_b)
        used_a.add(a)
        used_b.add(b)
        iso.add(a, b)
    return iso


def back_and_forth_multi(
    pairs: Sequence[tuple[DenseOracle, DenseOracle]], stages: int
) -> tuple[PartialIso, list[int]]:
    """One order-preserving matching of several disjoint set pairs at once.

    Stages cycle through the set pairs; within pair i the stages alternate
    forth and back as in the single-pair construction.  The order constraint
    is taken against the matches of all pairs together, so the union stays
    order-preserving and each A_i is matched into B_i.  Returns the matching
    and the pair index of every stage.
    """
    if stages < 1:
        raise ValueError("stages must be >= 1")
    k = len(pairs)
    iso = PartialIso()
    used_a: set = set()
    used_b: set = set()
    owner: list[int] = []
    turns = [0] * k
    for n in range(stages):
        i = n % k
        A, B = pairs[i]
        turns[i] += 1
        if turns[i] % 2 == 1:
            a = _first_unmatched(A, used_a)
            lo, hi = _neighbours(a, iso.pairs)
            b = _first_admissible(B, used_b, lo, hi)
        else:
            b = _first_unmatched(B, used_b)
            lo, hi = _neighbours(b, [(y, x) for x, y in iso.pairs])
            a = _first_admissible(A, used_a, lo, hi)
        used_a.add(a)
        used_b.add(b)
        iso.add(a, b)
        owner.append(i)
    return iso, owner


def _rational_near(h: Handle, k: int) -> Fraction:
    if isinstance(h, QuadIrr):
        lo, hi = h.bounds(k)
        return (lo + hi) / 2
    return Fraction(h)


def extend_to_pwl(iso: PartialIso) -> PWLHomeo:
    """Piecewise-linear interpolant through the matched pairs.

    Irrational handles are replaced by rationals close enough that the
    strict order of both coordinates is unchanged.
    """
    pairs = sorted(iso.pairs, key=lambda p: _Key(p[0]))
    for k in itertools.count(16, 16):
        nodes = [(_rational_near(a, k), _rational_near(b, k)) for a, b in pairs]
        us = [u for u, _ in nodes]
        vs = [v for _, v in nodes]
        ok = all(0 < u < 1 for u in us) and all(0 < v < 1 for v in vs)
        ok = ok and all(x < y for x, y in zip(us, us[1:])) and all(x < y for x, y in zip(vs, vs[1:]))
        if ok:
            return PWLHomeo(tuple(nodes))
        if k > 4096:
            raise DomainError("could not separate the matched handles")


# ---------------------------------------------------------------------------
# Integer encoding of minimal polynomials


def eta(k: int) -> int:
    """Bijection Z -> Z+: 0, 1, -1, 2, -2, ... -> 1, 2, 3, 4, 5, ..."""
    return 2 * k if k > 0 else 2 * (-k) + 1


def delta(k: int) -> int:
    """Inverse of eta: (-1)**k * floor(k / 2)."""
    if k < 1:
        raise ValueError("delta is defined on positive integers")
    return (-1) ** k * (k // 2)


def encode_minpoly(coeffs: Sequence[int]) -> tuple[int, ...]:
    """(eta(c0), ..., eta(cd), d + 1) for c0 + c1 t + ... + cd t**d."""
    cs = [int(c) for c in coeffs]
    d = len(cs) - 1
    if d < 1 or cs[-1] == 0:
        raise ValueError("need degree >= 1 with a nonzero leading coefficient")
    if math.gcd(*cs) != 1:
        raise ValueError("coefficients must be primitive")
    return tuple(eta(c) for c in cs) + (d + 1,)


def decode_tail(q: Quotients) -> ZPoly:
    """delta(a_{n-1}) t**(a_n - 1) + ... + delta(a_{n - a_n}) from a terminated sequence."""
    if not q.terminated or q.head != 0 or not q.tail:
        raise ValueError("need a terminated sequence with head 0")
    t = q.tail
    an = t[-1]
    if an < 2:
        raise ValueError("last entry must be >= 2")
    if len(t) - 1 < an:
        raise ValueError(f"need {an} entries before the final {an}")
    body = t[len(t) - 1 - an : len(t) - 1]
    return ZPoly([delta(a) for a in body])
