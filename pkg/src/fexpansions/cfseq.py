"""Formal quotient sequences [a0; a1, a2, ...] and the alternating lexicographic order."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Optional


class Status(enum.Enum):
    TERMINATED = "terminated"
    TRUNCATED = "truncated"


class Order(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNKNOWN = None


class SequenceSyntaxError(ValueError):
    pass


class SequenceValidityError(ValueError):
    pass


@dataclass(frozen=True)
class Quotients:
    """A terminating sequence, or a known prefix of a longer one.

    Tail entries are >= 1; a terminated sequence with a nonempty tail ends in
    an entry >= 2.  A truncated prefix may end anywhere.
    """

    head: int
    tail: tuple[int, ...] = ()
    status: Status = Status.TERMINATED

    def __post_init__(self):
        object.__setattr__(self, "head", int(self.head))
        object.__setattr__(self, "tail", tuple(int(a) for a in self.tail))
        if any(a < 1 for a in self.tail):
            raise SequenceValidityError(f"tail entries must be >= 1: {self.tail}")
        if self.status is Status.TERMINATED and self.tail and self.tail[-1] < 2:
            raise SequenceValidityError("a terminated sequence cannot end in 1")

    @classmethod
    def _endpoint(cls, head: int, tail: tuple[int, ...]) -> "Quotients":
        # order-theoretic endpoint; may end in 1, which C_t forbids
        q = object.__new__(cls)
        object.__setattr__(q, "head", int(head))
        object.__setattr__(q, "tail", tuple(tail))
        object.__setattr__(q, "status", Status.TERMINATED)
        return q

    @property
    def terminated(self) -> bool:
        return self.status is Status.TERMINATED

    @property
    def terms(self) -> tuple[int, ...]:
        return (self.head,) + self.tail

    def __len__(self):
        return 1 + len(self.tail)

    def __getitem__(self, i: int) -> int:
        return self.terms[i]

    def prefix(self, n: int) -> "Quotients":
        """The first ``n`` tail entries as a truncated prefix."""
        if n >= len(self.tail) and self.terminated:
            return self
        return Quotients(self.head, self.tail[:n], Status.TRUNCATED)

    def __str__(self):
        return format_quotients(self)


_NUM = re.compile(r"\s*(-?\d+)\s*")


def parse(text: str) -> Quotients:
    """Parse ``"[a0; a1, a2]"``; a trailing ``", ..."`` marks a truncated prefix."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise SequenceSyntaxError(f"expected brackets: {text!r}")
    body = s[1:-1].strip()
    status = Status.TERMINATED
    if body.endswith("..."):
        status = Status.TRUNCATED
        body = body[:-3].rstrip()
        if body.endswith(",") or body.endswith(";"):
            body = body[:-1]
        else:
            raise SequenceSyntaxError(f"ellipsis must follow a separator: {text!r}")
    if ";" in body:
        head_text, tail_text = body.split(";", 1)
        parts = tail_text.split(",")
        if tail_text.strip() == "":
            if status is Status.TERMINATED:
                raise SequenceSyntaxError(f"empty tail after ';': {text!r}")
            parts = []
    else:
        head_text, parts = body, []
    m = _NUM.fullmatch(head_text)
    if not m:
        raise SequenceSyntaxError(f"bad head in {text!r}")
    tail = []
    for part in parts:
        m2 = _NUM.fullmatch(part)
        if not m2:
            raise SequenceSyntaxError(f"bad entry {part!r} in {text!r}")
        tail.append(int(m2.group(1)))
    return Quotients(int(m.group(1)), tuple(tail), status)


def format_quotients(q: Quotients) -> str:
    if q.tail:
        body = f"{q.head}; " + ", ".join(str(a) for a in q.tail)
        if not q.terminated:
            body += ", ..."
    else:
        body = f"{q.head}" if q.terminated else f"{q.head}; ..."
    return f"[{body}]"


def altlex_compare(a: Quotients, b: Quotients) -> Order:
    """Alternating lexicographic comparison.

    Even positions compare normally and odd positions reversed; a terminated
    sequence behaves as if +infinity followed its last entry.  Returns
    UNKNOWN when a truncated prefix runs out before the order is decided.
    """
    ta, tb = a.terms, b.terms
    i = 0
    while True:
        ea = ta[i] if i < len(ta) else (None if not a.terminated else float("inf"))
        eb = tb[i] if i < len(tb) else (None if not b.terminated else float("inf"))
        if ea is None or eb is None:
            return Order.UNKNOWN
        if ea == eb:
            if ea == float("inf"):
                return Order.EQUAL
            i += 1
            continue
        less = ea < eb if i % 2 == 0 else ea > eb
        return Order.LESS if less else Order.GREATER


@dataclass(frozen=True)
class PrefixInterval:
    """All sequences whose first n+1 entries equal a given prefix.

    ``lo`` and ``hi`` are the altlex endpoints; exactly one of them belongs to
    the set, as flagged by ``lo_closed``/``hi_closed``.
    """

    lo: Quotients
    hi: Quotients
    lo_closed: bool
    hi_closed: bool

    def contains(self, q: Quotients) -> Optional[bool]:
        c_lo = altlex_compare(self.lo, q)
        c_hi = altlex_compare(q, self.hi)
        if Order.UNKNOWN in (c_lo, c_hi):
            return None
        ok_lo = c_lo is Order.LESS or (c_lo is Order.EQUAL and self.lo_closed)
        ok_hi = c_hi is Order.LESS or (c_hi is Order.EQUAL and self.hi_closed)
        return ok_lo and ok_hi


def prefix_interval(p: Quotients) -> PrefixInterval:
    n = len(p.tail)
    terms = p.terms
    bumped = terms[:-1] + (terms[-1] + 1,)
    same = Quotients._endpoint(terms[0], terms[1:])
    plus = Quotients._endpoint(bumped[0], bumped[1:])
    if n % 2 == 1:
        return PrefixInterval(plus, same, lo_closed=False, hi_closed=True)
    return PrefixInterval(same, plus, lo_closed=True, hi_closed=False)


def classify_terminal(q: Quotients) -> Optional[int]:
    """d such that q lies in C_t(d): head 0, terminated, last entry d + 1."""
    if q.terminated and q.head == 0 and q.tail and q.tail[-1] >= 2:
        return q.tail[-1] - 1
    return None


def _primitive_block(block: tuple[int, ...]) -> tuple[int, ...]:
    n = len(block)
    for k in range(1, n + 1):
        if n % k == 0 and block[:k] * (n // k) == block:
            return block[:k]
    return block


@dataclass(frozen=True)
class PeriodicSpec:
    """[head; preperiod, period, period, ...] stored in canonical form."""

    head: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        pre = tuple(int(a) for a in self.preperiod)
        per = tuple(int(a) for a in self.period)
        if not per:
            raise SequenceValidityError("period must be nonempty")
        if any(a < 1 for a in pre + per):
            raise SequenceValidityError("entries must be >= 1")
        per = _primitive_block(per)
        # fold the preperiod into the cycle where possible
        while pre and pre[-1] == per[-1]:
            per = (per[-1],) + per[:-1]
            pre = pre[:-1]
        object.__setattr__(self, "head", int(self.head))
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def tail_terms(self) -> Iterator[int]:
        yield from self.preperiod
        while True:
            yield from self.period

    def prefix(self, n: int) -> Quotients:
        it = self.tail_terms()
        return Quotients(self.head, tuple(next(it) for _ in range(n)), Status.TRUNCATED)

    def __str__(self):
        parts = [str(a) for a in self.preperiod]
        parts.append("(" + ", ".join(str(a) for a in self.period) + ")*")
        return f"[{self.head}; " + ", ".join(parts) + "]"
