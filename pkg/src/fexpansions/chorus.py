"""Piecewise-linear homeomorphisms g of (0, 1) and the conjugate generators f_g.

The chorus-line extension of g acts on the whole line by
g_bar(x) = floor(x) + g({x}), fixing the integers.  Conjugating the
reciprocal by it gives f_g = g^-1 o r o g_bar, whose expansion is the
ordinary continued fraction of g_bar(x).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .cfseq import Quotients, Status
from .engine import (
    DEFAULT_BIT_CAP,
    ExpansionResult,
    Generator,
    Outcome,
    Reciprocal,
    Step,
    cf_value,
    euclid_cf,
    expand,
)
from .realkernel import DomainError, RealExpr, eval_expr, to_fraction


@dataclass(frozen=True)
class PWLHomeo:
    """Increasing piecewise-linear bijection of (0, 1) through rational nodes.

    The implied end nodes (0, 0) and (1, 1) are not stored.
    """

    nodes: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        nodes = tuple((Fraction(u), Fraction(v)) for u, v in self.nodes)
        full = ((Fraction(0), Fraction(0)),) + nodes + ((Fraction(1), Fraction(1)),)
        for (u0, v0), (u1, v1) in zip(full, full[1:]):
            if not (u0 < u1 and v0 < v1):
                raise DomainError("nodes must increase strictly inside (0, 1)")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_us", tuple(u for u, _ in full))
        object.__setattr__(self, "_vs", tuple(v for _, v in full))

    @classmethod
    def identity(cls) -> "PWLHomeo":
        return cls(())

    @classmethod
    def parse(cls, text: str) -> "PWLHomeo":
        """``"1/2:1/3,3/4:4/5"``; an empty string is the identity."""
        text = text.strip()
        if not text:
            return cls(())
        pairs = []
        for item in text.split(","):
            u, v = item.split(":")
            pairs.append((Fraction(u.strip()), Fraction(v.strip())))
        return cls(tuple(pairs))

    @classmethod
    def from_file(cls, path) -> "PWLHomeo":
        pairs = []
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                u, v = line.split()
                pairs.append((Fraction(u), Fraction(v)))
        return cls(tuple(pairs))

    def to_text(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.nodes)

    def __str__(self):
        return ",".join(f"{u}:{v}" for u, v in self.nodes) or "identity"

    @staticmethod
    def _interp(xs, ys, t: Fraction) -> Fraction:
        i = bisect.bisect_right(xs, t) - 1
        i = min(i, len(xs) - 2)
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        return y0 + (y1 - y0) * (t - x0) / (x1 - x0)

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        if not 0 < x < 1:
            raise DomainError(f"g is defined on (0, 1), got {x}")
        return self._interp(self._us, self._vs, x)

    def inverse(self, y) -> Fraction:
        y = Fraction(y)
        if not 0 < y < 1:
            raise DomainError(f"g^-1 is defined on (0, 1), got {y}")
        return self._interp(self._vs, self._us, y)


def eval_g(g: PWLHomeo, x) -> Fraction:
    return g(x)


def eval_g_inv(g: PWLHomeo, y) -> Fraction:
    return g.inverse(y)


def gbar(g: PWLHomeo, x) -> Fraction:
    """Chorus-line extension floor(x) + g({x}); integers are fixed."""
    x = Fraction(x)
    n = math.floor(x)
    return x if x == n else n + g(x - n)


def gbar_inv(g: PWLHomeo, y) -> Fraction:
    y = Fraction(y)
    n = math.floor(y)
    return y if y == n else n + g.inverse(y - n)


def fg_eval(g: PWLHomeo, x) -> Fraction:
    """f_g(x) = g^-1(1 / g_bar(x)) for x > 1."""
    x = Fraction(x)
    if not x > 1:
        raise DomainError("f_g is defined on (1, inf)")
    return g.inverse(1 / gbar(g, x))


def phig_eval(g: PWLHomeo, y) -> Fraction:
    """phi_g(y) = g_bar^-1(1 / g(y)) for y in (0, 1)."""
    y = Fraction(y)
    if not 0 < y < 1:
        raise DomainError("phi_g is defined on (0, 1)")
    return gbar_inv(g, 1 / g(y))


class ChorusConjugate(Generator):
    exact_on_rationals = True

    def __init__(self, g: PWLHomeo):
        self.g = g
        self.name = f"chorus:{g}"

    def f_exact(self, x):
        return fg_eval(self.g, x)

    def phi_exact(self, y):
        return phig_eval(self.g, y)

    def __eq__(self, other):
        return isinstance(other, ChorusConjugate) and other.g == self.g

    def __hash__(self):
        return hash(("chorus", self.g))


def _common_cf_prefix(lo: Fraction, hi: Fraction, limit: int) -> list[int]:
    """CF terms shared by every real in [lo, hi].

    Reals with a given CF prefix form an interval, so agreement of the two
    endpoints on non-final terms certifies the whole range.
    """
    a, b = euclid_cf(lo).terms, euclid_cf(hi).terms
    out = []
    for i in range(min(len(a), len(b)) - 1):
        if a[i] != b[i] or len(out) >= limit:
            break
        out.append(a[i])
    return out


def expand_conjugate(
    g: PWLHomeo, x: RealExpr, max_terms: int = 64, bit_cap: int = DEFAULT_BIT_CAP
) -> ExpansionResult:
    """E_{f_g}(x) computed as the continued fraction of g_bar(x)."""
    if isinstance(x, (int, Fraction)):
        q = euclid_cf(gbar(g, x))
        steps = [Step(i, 0, True) for i in range(len(q))]
        if len(q.tail) > max_terms:
            return ExpansionResult(q.prefix(max_terms), Outcome.REACHED_MAX_TERMS, steps[: max_terms + 1])
        return ExpansionResult(q, Outcome.TERMINATED, steps)
    bits = 128
    terms: list[int] = []
    while bits <= bit_cap:
        e = eval_expr(x, bits)
        lo, hi = to_fraction(e.lo), to_fraction(e.hi)
        terms = _common_cf_prefix(gbar(g, lo), gbar(g, hi), max_terms + 1)
        if len(terms) >= max_terms + 1:
            steps = [Step(i, bits, False) for i in range(len(terms))]
            return ExpansionResult(
                Quotients(terms[0], tuple(terms[1:]), Status.TRUNCATED), Outcome.REACHED_MAX_TERMS, steps
            )
        bits *= 2
    if not terms:
        raise DomainError("integer part undecided within the precision cap")
    return ExpansionResult(
        Quotients(terms[0], tuple(terms[1:]), Status.TRUNCATED),
        Outcome.UNDECIDED_INTEGER,
        [Step(i, bits // 2, False) for i in range(len(terms))],
        undecided_at=(len(terms), bits // 2),
    )


def recover_g(f: Generator, samples: Iterable, max_terms: int = 4096) -> list[tuple[Fraction, Fraction]]:
    """(x, V_r(E_f(x))) for rational samples in (0, 1).

    For a faithful f = f_g this reproduces g on the samples.
    """
    if not isinstance(f, (ChorusConjugate, Reciprocal)):
        raise DomainError("recovery is only defined for conjugates of the reciprocal")
    out = []
    for x in samples:
        x = Fraction(x)
        if not 0 < x < 1:
            raise DomainError("samples must lie in (0, 1)")
        res = expand(f, x, max_terms)
        if not res.terminated:
            raise DomainError(f"expansion of {x} did not terminate within {max_terms} terms")
        out.append((x, cf_value(res.quotients)))
    return out


def theorem1_demo(x, y) -> tuple[PWLHomeo, ExpansionResult]:
    """A g through (x, y) whose f_g-expansion of x is the continued fraction of y."""
    x, y = Fraction(x), Fraction(y)
    if not (0 < x < 1 and 0 < y < 1):
        raise DomainError("x and y must lie in (0, 1)")
    g = PWLHomeo(()) if x == y else PWLHomeo(((x, y),))
    return g, expand(ChorusConjugate(g), x, 4096)


def expansions_agree(f1: Generator, f2: Generator, samples: Sequence, max_terms: int = 4096) -> bool:
    return all(expand(f1, s, max_terms).quotients == expand(f2, s, max_terms).quotients for s in samples)
