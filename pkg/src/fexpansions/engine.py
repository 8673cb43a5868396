"""Expansion E_f and evaluation V_f over a pluggable generating function.

A generator supplies the decreasing map f : (1, inf) -> (0, 1) and its inverse
phi.  Expansion iterates x_{j+1} = phi({x_j}), a_j = floor(x_j).  Exact
rational arithmetic is used whenever the generator keeps rationals rational;
otherwise the orbit is followed with certified intervals, restarting the
whole orbit at doubled precision when a floor cannot be decided.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
from gmpy2 import mpz

from .cfseq import PeriodicSpec, Quotients, Status
from .realkernel import (
    DEFAULT_BIT_CAP,
    DEFAULT_START_BITS,
    CertifiedReal,
    DomainError,
    QuadIrr,
    RealExpr,
    certified_floor,
    down,
    eval_expr,
    iv_abs,
    pow_rational,
    rational_power,
    to_fraction,
    up,
)

Pair = tuple[int, int]


# ---------------------------------------------------------------------------
# Generating functions


class Generator:
    """A decreasing homeomorphism f : (1, inf) -> (0, 1) with inverse phi.

    Subclasses implement exact evaluation on rationals where possible
    (returning None when the image is irrational) and certified interval
    evaluation.  The default interval versions evaluate the exact maps at the
    dyadic endpoints, which is sound because both maps are decreasing.
    """

    name = "generator"
    exact_on_rationals = False
    exact_on_quadratics = False

    def f_exact(self, x: Fraction) -> Optional[Fraction]:
        return None

    def phi_exact(self, y: Fraction) -> Optional[Fraction]:
        return None

    def phi_pair(self, n: int, d: int) -> Optional[Pair]:
        """phi(n/d) as a coprime pair; the hot loop of exact expansion."""
        v = self.phi_exact(Fraction(int(n), int(d)))
        return None if v is None else (v.numerator, v.denominator)

    def _endpoint_map(self, x: CertifiedReal, fn) -> CertifiedReal:
        lo = fn(to_fraction(x.hi))
        hi = fn(to_fraction(x.lo))
        if lo is None or hi is None:
            raise NotImplementedError(f"{self.name} has no interval evaluation")
        return CertifiedReal(down(lo, x.bits), up(hi, x.bits), x.bits)

    def f(self, x: CertifiedReal) -> CertifiedReal:
        if isinstance(x.exact, Fraction):
            v = self.f_exact(x.exact)
            if v is not None:
                return CertifiedReal.from_rational(v, x.bits)
        return self._endpoint_map(x, self.f_exact)

    def phi(self, y: CertifiedReal) -> CertifiedReal:
        if isinstance(y.exact, Fraction):
            v = self.phi_exact(y.exact)
            if v is not None:
                return CertifiedReal.from_rational(v, y.bits)
        return self._endpoint_map(y, self.phi_exact)

    def shortcut(self, x: RealExpr, max_terms: int) -> Optional["ExpansionResult"]:
        """An exact expansion route that bypasses the orbit, if one exists."""
        return None

    def __str__(self):
        return self.name


class Reciprocal(Generator):
    name = "reciprocal"
    exact_on_rationals = True
    exact_on_quadratics = True

    def f_exact(self, x):
        return 1 / Fraction(x)

    def phi_exact(self, y):
        return 1 / Fraction(y)

    def phi_pair(self, n, d):
        return d, n

    def f(self, x):
        return x.reciprocal()

    def phi(self, y):
        return y.reciprocal()

    def shortcut(self, x, max_terms):
        if isinstance(x, QuadIrr):
            head, pre, per = x.continued_fraction()
            spec = PeriodicSpec(head, pre, per)
            q = spec.prefix(max_terms)
            steps = [Step(i, 0, True) for i in range(max_terms + 1)]
            return ExpansionResult(q, Outcome.REACHED_MAX_TERMS, steps, periodic=spec)
        return None


class Power(Generator):
    """f(x) = x**(-alpha) with phi(y) = y**(-1/alpha), alpha = a/b > 0."""

    def __init__(self, alpha):
        alpha = Fraction(alpha)
        if alpha <= 0:
            raise DomainError("alpha must be positive")
        self.alpha = alpha
        self.name = f"power:{alpha}"
        # alpha = 1/m sends rationals to rationals under phi
        self.exact_on_rationals = alpha.numerator == 1

    def f_exact(self, x):
        x = Fraction(x)
        r = rational_power(x.numerator, x.denominator, -self.alpha.numerator, self.alpha.denominator)
        return None if r is None else Fraction(int(r[0]), int(r[1]))

    def phi_exact(self, y):
        y = Fraction(y)
        r = rational_power(y.numerator, y.denominator, -self.alpha.denominator, self.alpha.numerator)
        return None if r is None else Fraction(int(r[0]), int(r[1]))

    def phi_pair(self, n, d):
        a, b = self.alpha.numerator, self.alpha.denominator
        if a == 1:
            return mpz(d) ** b, mpz(n) ** b
        r = rational_power(n, d, -b, a)
        return None if r is None else (r[0], r[1])

    def f(self, x):
        a, b = self.alpha.numerator, self.alpha.denominator
        return pow_rational(x, -a, b)

    def phi(self, y):
        a, b = self.alpha.numerator, self.alpha.denominator
        return pow_rational(y, -b, a)

    def __eq__(self, other):
        return isinstance(other, Power) and other.alpha == self.alpha

    def __hash__(self):
        return hash(("power", self.alpha))


def generator_sanity(g: Generator, samples: Sequence[Fraction], bits: int = 128) -> bool:
    """Spot-check that f decreases and that phi(f(x)) encloses x."""
    xs = sorted(Fraction(s) for s in samples)
    vals = [g.f(CertifiedReal.from_rational(x, bits)) for x in xs]
    for u, v in zip(vals, vals[1:]):
        if not u.lo > v.hi:
            return False
    for x, v in zip(xs, vals):
        if not (0 < v.lo and v.hi < 1):
            return False
        if not g.phi(v).contains(x):
            return False
    return True


# ---------------------------------------------------------------------------
# Expansion


class Outcome(enum.Enum):
    TERMINATED = "terminated"
    REACHED_MAX_TERMS = "reached_max_terms"
    UNDECIDED_INTEGER = "undecided_integer"


@dataclass(frozen=True)
class Step:
    index: int
    precision_bits: int
    exact: bool

    def as_dict(self):
        return {"index": self.index, "precision_bits": self.precision_bits, "exact": self.exact}


@dataclass
class ExpansionResult:
    quotients: Quotients
    outcome: Outcome
    steps: list[Step] = field(default_factory=list)
    undecided_at: Optional[tuple[int, int]] = None  # (step index, bits tried)
    periodic: Optional[PeriodicSpec] = None

    @property
    def terminated(self) -> bool:
        return self.outcome is Outcome.TERMINATED

    def as_dict(self) -> dict:
        d = {
            "quotients": str(self.quotients),
            "outcome": self.outcome.value,
            "steps": [s.as_dict() for s in self.steps],
        }
        if self.undecided_at is not None:
            d["undecided_at"] = {"index": self.undecided_at[0], "precision_bits": self.undecided_at[1]}
        if self.periodic is not None:
            d["periodic"] = str(self.periodic)
        return d


def _exact_orbit(g: Generator, n: int, d: int, max_terms: int):
    """Follow the orbit in exact rationals as far as g allows.

    Returns (terms, finished, state): ``finished`` is True when the orbit hit
    an integer; otherwise ``state`` is the pending fractional part (n, d) that
    phi could not map to a rational, or None when max_terms was reached.
    """
    n, d = mpz(n), mpz(d)
    terms: list[int] = []
    while True:
        a = n // d
        terms.append(int(a))
        r = n - a * d
        if r == 0:
            return terms, True, None
        if len(terms) > max_terms:
            return terms, False, None
        nxt = g.phi_pair(r, d)
        if nxt is None:
            return terms, False, (r, d)
        n, d = mpz(nxt[0]), mpz(nxt[1])


def _interval_orbit(g: Generator, start, first_index: int, limit: int, bits: int):
    """Certified floors from ``start`` until ``limit`` terms or an undecided floor.

    ``start`` is either a RealExpr to evaluate or an exact fractional part
    (as a Fraction) to which phi is applied first.
    """
    out: list[int] = []
    try:
        if isinstance(start, tuple):
            x = g.phi(CertifiedReal.from_rational(Fraction(int(start[0]), int(start[1])), bits))
        else:
            x = eval_expr(start, bits)
        index = first_index
        while index < limit:
            fl = certified_floor(x)
            if not fl.decided:
                return out, False
            out.append(fl.value)
            index += 1
            if fl.integral:
                return out, True
            if index >= limit:
                break
            frac = x - fl.value
            if not frac.lo > 0:
                return out, False
            x = g.phi(frac)
    except (DomainError, ZeroDivisionError):
        return out, False
    return out, False


def expand(
    g: Generator,
    x: RealExpr,
    max_terms: int,
    bit_cap: int = DEFAULT_BIT_CAP,
    start_bits: int = DEFAULT_START_BITS,
) -> ExpansionResult:
    """Compute E_g(x) up to ``max_terms`` tail entries.

    Integer hits (termination) are only declared on an exact path.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    sc = g.shortcut(x, max_terms)
    if sc is not None:
        return sc
    limit = max_terms + 1  # head plus max_terms tail entries

    exact_terms: list[int] = []
    pending = None
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        terms, finished, pending = _exact_orbit(g, x.numerator, x.denominator, max_terms)
        exact_terms = terms[:limit]
        steps = [Step(i, 0, True) for i in range(len(exact_terms))]
        if finished and len(terms) <= limit:
            return ExpansionResult(
                Quotients(exact_terms[0], tuple(exact_terms[1:])), Outcome.TERMINATED, steps
            )
        if pending is None:
            return ExpansionResult(
                Quotients(exact_terms[0], tuple(exact_terms[1:]), Status.TRUNCATED),
                Outcome.REACHED_MAX_TERMS,
                steps,
            )
        start = pending
    else:
        start = x

    known = list(exact_terms)
    steps = [Step(i, 0, True) for i in range(len(known))]
    bits = start_bits
    last_bits = bits
    while bits <= bit_cap:
        last_bits = bits
        got, hit = _interval_orbit(g, start, len(exact_terms), limit, bits)
        full = exact_terms + got
        for i in range(len(known), len(full)):
            steps.append(Step(i, bits, False))
        if len(full) > len(known):
            # a later run only extends the earlier certified prefix
            known = full
        if hit:
            # an interval collapsed to a certified integer point
            return ExpansionResult(Quotients(known[0], tuple(known[1:])), Outcome.TERMINATED, steps)
        if len(known) >= limit:
            return ExpansionResult(
                Quotients(known[0], tuple(known[1:limit]), Status.TRUNCATED),
                Outcome.REACHED_MAX_TERMS,
                steps[:limit],
            )
        bits *= 2
    if not known:
        raise DomainError("could not determine the integer part within the precision cap")
    return ExpansionResult(
        Quotients(known[0], tuple(known[1:]), Status.TRUNCATED),
        Outcome.UNDECIDED_INTEGER,
        steps,
        undecided_at=(len(known), last_bits),
    )


# ---------------------------------------------------------------------------
# Evaluation


def eval_fold(
    g: Generator, terms: Sequence[int], bits: int = DEFAULT_START_BITS, exact: bool = True
) -> CertifiedReal:
    """a0 + f(a1 + f(a2 + ... + f(an))) folded right to left.

    With ``exact=False`` the fold stays in intervals even where f maps
    rationals to rationals (f_5 would otherwise grow 5**n-digit numbers).
    """
    v = CertifiedReal.from_rational(terms[-1], bits)
    if not exact:
        v = CertifiedReal(v.lo, v.hi, bits)
    for a in reversed(terms[:-1]):
        v = g.f(v) + a
    return v


def eval_finite(g: Generator, q: Quotients, bits: int = DEFAULT_START_BITS) -> CertifiedReal:
    if not q.terminated:
        raise ValueError("eval_finite needs a terminated sequence")
    return eval_fold(g, q.terms, bits)


@dataclass(frozen=True)
class Converged:
    value: CertifiedReal


@dataclass(frozen=True)
class Oscillating:
    clusters: tuple[CertifiedReal, ...]


@dataclass(frozen=True)
class Inconclusive:
    values: tuple[CertifiedReal, ...]


EvalOutcome = Converged | Oscillating | Inconclusive


def _spread(vals: Sequence[CertifiedReal]) -> Fraction:
    lo = min(to_fraction(v.lo) for v in vals)
    hi = max(to_fraction(v.hi) for v in vals)
    return hi - lo


def eval_infinite(
    g: Generator, s: PeriodicSpec, n_max: int, tol, bits: int = DEFAULT_START_BITS
) -> EvalOutcome:
    """Limit behaviour of V_g on truncations of a periodic sequence.

    Truncation values are grouped by length modulo twice the period; each
    group must settle within ``tol``.  One settled value means convergence,
    well separated settled values mean oscillation.
    """
    tol = Fraction(tol)
    L = len(s.period)
    if n_max < 4 * L:
        raise ValueError("n_max must be at least four periods")
    it = s.tail_terms()
    tail = [next(it) for _ in range(n_max)]
    values = [eval_fold(g, [s.head] + tail[:n], bits, exact=False) for n in range(1, n_max + 1)]
    m = 2 * L
    start = len(s.preperiod)
    groups: dict[int, list[CertifiedReal]] = {}
    for n, v in enumerate(values, start=1):
        if n > start:
            groups.setdefault(n % m, []).append(v)
    settled = []
    for r in sorted(groups):
        g_vals = groups[r]
        if len(g_vals) < 2 or _spread(g_vals[-2:]) > tol:
            return Inconclusive(tuple(values[-m:]))
        settled.append(g_vals[-1])
    # cluster the settled values
    settled.sort(key=lambda v: v.lo)
    clusters: list[list[CertifiedReal]] = [[settled[0]]]
    for v in settled[1:]:
        if to_fraction(v.lo) - to_fraction(clusters[-1][-1].hi) > tol:
            clusters.append([v])
        else:
            clusters[-1].append(v)
    hulls = tuple(CertifiedReal.hull(c).widen(tol) for c in clusters)
    if len(hulls) == 1:
        return Converged(hulls[0])
    gaps = [to_fraction(b.lo) - to_fraction(a.hi) for a, b in zip(hulls, hulls[1:])]
    if min(gaps) > 1000 * tol:
        return Oscillating(hulls)
    return Inconclusive(tuple(values[-m:]))


# ---------------------------------------------------------------------------
# Period detection and round trips


def detect_period(q: Quotients) -> Optional[tuple[int, int]]:
    """Shortest (preperiod, period) fitting the tail with two full repetitions.

    Candidates are ranked by preperiod + period, so a long preperiod with a
    tiny period never shadows a short exact cycle.

    A heuristic candidate only; a finite prefix proves nothing.
    """
    t = q.tail
    n = len(t)
    if n + 1 < 8:
        raise ValueError("need at least 8 entries")
    # shortest description first: preperiod + period, then the smaller period
    for total in range(1, n):
        for per in range(1, total + 1):
            pre = total - per
            if pre + 2 * per > n:
                continue
            if all(t[i] == t[i - per] for i in range(pre + per, n)):
                return pre, per
    return None


@dataclass(frozen=True)
class RoundTrip:
    expansion: ExpansionResult
    value: CertifiedReal
    gap: CertifiedReal

    @property
    def exact_zero(self) -> bool:
        return self.gap.exact == 0


def roundtrip_check(
    g: Generator, x: RealExpr, terms: int, bits: int = DEFAULT_START_BITS
) -> RoundTrip:
    """|x - V_g(E_g(x))|, with V_g applied to the computed prefix."""
    res = expand(g, x, terms)
    if res.outcome is Outcome.UNDECIDED_INTEGER:
        raise DomainError(f"expansion undecided at step {res.undecided_at}")
    v = eval_fold(g, res.quotients.terms, bits, exact=res.terminated)
    xv = eval_expr(x, bits) if not isinstance(x, (int, Fraction)) else CertifiedReal.from_rational(x, bits)
    if isinstance(v.exact, Fraction) and isinstance(xv.exact, Fraction):
        gap = CertifiedReal.from_rational(abs(xv.exact - v.exact), bits)
    else:
        gap = iv_abs(xv - v)
    return RoundTrip(res, v, gap)


def euclid_cf(x: Fraction) -> Quotients:
    """Canonical continued fraction of a rational (last tail entry >= 2)."""
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    terms = []
    while True:
        a = n // d
        terms.append(a)
        n, d = d, n - a * d
        if d == 0:
            break
    return Quotients(terms[0], tuple(terms[1:]))


def cf_value(q: Quotients) -> Fraction:
    v = Fraction(q.terms[-1])
    for a in reversed(q.terms[:-1]):
        v = a + 1 / v
    return v
