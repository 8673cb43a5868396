"""Exact rationals, exact quadratic irrationals and certified interval reals.

Interval endpoints are MPFR floats (dyadic rationals) produced with directed
rounding, so every enclosure is sound at the working precision it reports.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

import gmpy2
from gmpy2 import mpfr, mpq, mpz

Rat = Fraction

DEFAULT_START_BITS = 128
DEFAULT_BIT_CAP = 1 << 23
_GUARD = 8


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class PrecisionExhausted(RuntimeError):
    def __init__(self, message: str, bits: int):
        super().__init__(message)
        self.bits = bits


@functools.lru_cache(maxsize=256)
def _ctx(bits: int, up: bool) -> gmpy2.context:
    return gmpy2.context(precision=bits, round=gmpy2.RoundUp if up else gmpy2.RoundDown)


def down(x, bits: int) -> mpfr:
    """Largest ``bits``-bit float not above ``x`` (int, Fraction, mpq or mpfr)."""
    if isinstance(x, Fraction):
        x = mpq(x.numerator, x.denominator)
    return mpfr(x, bits, _ctx(bits, False))


def up(x, bits: int) -> mpfr:
    if isinstance(x, Fraction):
        x = mpq(x.numerator, x.denominator)
    return mpfr(x, bits, _ctx(bits, True))


def _neg(x: mpfr) -> mpfr:
    # bare unary minus would round to the global 53-bit context
    return _ctx(max(x.precision, 2), False).minus(x)


def to_fraction(x: mpfr) -> Fraction:
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def _isqrt(n: int) -> int:
    return int(gmpy2.isqrt(n))


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, m) with n = s*s*m and m squarefree (trial division)."""
    s = 1
    m = n
    p = 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            s *= p
        p += 1 if p == 2 else 2
    return s, m


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


def sign_sqrt_sum(x: int, y: int, d: int) -> int:
    """Exact sign of x + y*sqrt(d) for integers x, y and d >= 0."""
    sx, sy = _sign(x), _sign(y)
    if sy == 0 or d == 0:
        return sx
    if sx == 0:
        return sy
    if sx == sy:
        return sx
    # opposite signs: compare magnitudes squared
    return sx * _sign(x * x - y * y * d)


def rational_power(num: int, den: int, p: int, q: int) -> Optional[tuple[int, int]]:
    """(num/den)**(p/q) as a coprime pair when it is rational, else None.

    num/den > 0 must be coprime with den > 0; p is any integer, q >= 1.
    """
    if q != 1:
        rn, ok_n = gmpy2.iroot(mpz(num), q)
        if not ok_n:
            return None
        rd, ok_d = gmpy2.iroot(mpz(den), q)
        if not ok_d:
            return None
        num, den = rn, rd
    if p < 0:
        num, den, p = den, num, -p
    return (mpz(num) ** p, mpz(den) ** p)


# ---------------------------------------------------------------------------
# Quadratic irrationals


@dataclass(frozen=True, eq=False)
class QuadIrr:
    """The real number (p + q*sqrt(D)) / r in canonical form.

    D is squarefree and > 1, q != 0, r > 0 and gcd(p, q, r) = 1.
    """

    p: int
    q: int
    D: int
    r: int = 1

    def __post_init__(self):
        p, q, D, r = int(self.p), int(self.q), int(self.D), int(self.r)
        if r == 0:
            raise ZeroDivisionError("QuadIrr denominator is zero")
        if D <= 0:
            raise DomainError("QuadIrr radicand must be positive")
        s, D = _squarefree_split(D)
        q *= s
        if D == 1 or q == 0:
            raise DomainError("value is rational, not a quadratic irrational")
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "r", r // g)

    # -- exact arithmetic with rationals -------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            n, d = other.numerator, other.denominator
            return QuadIrr(self.p * d + n * self.r, self.q * d, self.D, self.r * d)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QuadIrr(-self.p, -self.q, self.D, self.r)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-Fraction(other))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                return Fraction(0)
            n, d = other.numerator, other.denominator
            return QuadIrr(self.p * n, self.q * n, self.D, self.r * d)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "QuadIrr":
        # r / (p + q√D) = r (p - q√D) / (p² - q² D); the denominator is nonzero
        den = self.p * self.p - self.q * self.q * self.D
        return QuadIrr(self.r * self.p, -self.r * self.q, self.D, den)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.reciprocal() * other
        return NotImplemented

    # -- order ----------------------------------------------------------------
    def _cmp(self, other) -> int:
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            a, b = other.numerator, other.denominator
            # sign of (p + q√D)/r - a/b with r, b > 0
            return sign_sqrt_sum(b * self.p - a * self.r, b * self.q, self.D)
        if isinstance(other, QuadIrr):
            if self.D == other.D:
                return sign_sqrt_sum(
                    self.p * other.r - other.p * self.r,
                    self.q * other.r - other.q * self.r,
                    self.D,
                )
            # sign of A + B√D1 + C√D2 with distinct squarefree D1, D2
            A = self.p * other.r - other.p * self.r
            B = self.q * other.r
            C = -other.q * self.r
            u = sign_sqrt_sum(A, B, self.D)
            v = -_sign(C)  # sign of -C√D2
            if u != v:
                return 1 if u > v else -1
            # same sign: compare |u| with |v| via squares
            s = sign_sqrt_sum(A * A + B * B * self.D - C * C * other.D, 2 * A * B, self.D)
            return u * s if u != 0 else 0
        raise TypeError(f"cannot compare QuadIrr with {type(other).__name__}")

    def __eq__(self, other):
        if isinstance(other, QuadIrr):
            return (self.p, self.q, self.D, self.r) == (other.p, other.q, other.D, other.r)
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.q, self.D, self.r))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- floors and approximations -------------------------------------------
    def floor(self) -> int:
        n = self.q * self.q * self.D
        s = _isqrt(n)
        if self.q > 0:
            return (self.p + s) // self.r
        return (self.p - s - 1) // self.r

    def frac(self) -> "QuadIrr":
        return self - self.floor()

    def bounds(self, k: int) -> tuple[Fraction, Fraction]:
        """Rational bounds lo < value < hi of width about 2**-k * |q| / r."""
        s = _isqrt(self.D << (2 * k))
        lo_root = Fraction(s, 1 << k)
        hi_root = Fraction(s + 1, 1 << k)
        a = (self.p + self.q * lo_root) / self.r
        b = (self.p + self.q * hi_root) / self.r
        return (a, b) if a < b else (b, a)

    def enclosure(self, bits: int) -> "CertifiedReal":
        k = bits + _GUARD + abs(self.q).bit_length() + 2
        lo, hi = self.bounds(k)
        return CertifiedReal(down(lo, bits), up(hi, bits), bits, self)

    def __float__(self):
        return (self.p + self.q * math.sqrt(self.D)) / self.r

    def continued_fraction(self) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
        """Exact eventually periodic expansion as (head, preperiod, period).

        Uses the classical (P, Q, N) recurrence on (P + sqrt(N)) / Q with
        Q | N - P**2; the period starts at the first repeated (P, Q) state.
        """
        N = self.q * self.q * self.D
        if self.q > 0:
            P, Q = self.p, self.r
        else:
            P, Q = -self.p, -self.r
        if (N - P * P) % Q:
            P, N, Q = P * abs(Q), N * Q * Q, Q * abs(Q)
        s = _isqrt(N)
        seen: dict[tuple[int, int], int] = {}
        terms: list[int] = []
        while (P, Q) not in seen:
            seen[(P, Q)] = len(terms)
            if Q > 0:
                a = (P + s) // Q
            else:
                a = -((P + s) // -Q) - 1
            terms.append(a)
            P = a * Q - P
            Q = (N - P * P) // Q
        start = seen[(P, Q)]
        head = terms[0]
        if start == 0:
            # purely periodic including the head; the head belongs to the cycle
            return head, (), tuple(terms[1:]) + (terms[0],)
        return head, tuple(terms[1:start]), tuple(terms[start:])

    def __repr__(self):
        return f"QuadIrr({self.p}, {self.q}, {self.D}, {self.r})"

    def __str__(self):
        return f"quad({self.p},{self.q},{self.D},{self.r})"


# ---------------------------------------------------------------------------
# Certified reals


Exact = Union[Fraction, QuadIrr]


@dataclass(frozen=True)
class CertifiedReal:
    """A closed interval [lo, hi] known to contain a real number.

    ``exact`` carries the value itself when it is known exactly.
    """

    lo: mpfr
    hi: mpfr
    bits: int
    exact: Optional[Exact] = None

    @classmethod
    def from_rational(cls, value, bits: int) -> "CertifiedReal":
        value = Fraction(value)
        return cls(down(value, bits), up(value, bits), bits, value)

    @classmethod
    def hull(cls, values: Iterable["CertifiedReal"]) -> "CertifiedReal":
        values = list(values)
        bits = max(v.bits for v in values)
        return cls(min(v.lo for v in values), max(v.hi for v in values), bits)

    @property
    def width(self) -> mpfr:
        return _ctx(self.bits, True).sub(self.hi, self.lo)

    @property
    def mid(self) -> mpfr:
        c = _ctx(self.bits + 1, False)
        return c.div(c.add(self.lo, self.hi), 2)

    @property
    def magnitude(self) -> mpfr:
        c = _ctx(self.bits, True)
        return max(c.abs(self.lo), c.abs(self.hi))

    def __float__(self):
        if isinstance(self.exact, Fraction):
            return float(self.exact)
        return float(self.mid)

    def contains(self, value) -> bool:
        if isinstance(value, CertifiedReal):
            return self.lo <= value.lo and value.hi <= self.hi
        if isinstance(value, QuadIrr):
            return value >= to_fraction(self.lo) and value <= to_fraction(self.hi)
        if isinstance(value, float):
            value = Fraction(value)
        return self.lo <= value <= self.hi

    def disjoint(self, other: "CertifiedReal") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def intersect(self, other: "CertifiedReal") -> Optional["CertifiedReal"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return None
        return CertifiedReal(lo, hi, max(self.bits, other.bits))

    def widen(self, eps) -> "CertifiedReal":
        bits = self.bits
        return CertifiedReal(
            _ctx(bits, False).sub(self.lo, down(eps, bits)),
            _ctx(bits, True).add(self.hi, up(eps, bits)),
            bits,
        )

    def _coerce(self, other) -> Optional["CertifiedReal"]:
        if isinstance(other, CertifiedReal):
            return other
        if isinstance(other, (int, Fraction)):
            return CertifiedReal.from_rational(other, self.bits)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        bits = max(self.bits, o.bits)
        if isinstance(self.exact, Fraction) and isinstance(o.exact, Fraction):
            return CertifiedReal.from_rational(self.exact + o.exact, bits)
        exact = None
        if isinstance(self.exact, QuadIrr) and isinstance(o.exact, Fraction):
            exact = self.exact + o.exact
        elif isinstance(o.exact, QuadIrr) and isinstance(self.exact, Fraction):
            exact = o.exact + self.exact
        return CertifiedReal(
            _ctx(bits, False).add(self.lo, o.lo), _ctx(bits, True).add(self.hi, o.hi), bits, exact
        )

    __radd__ = __add__

    def __neg__(self):
        exact = -self.exact if self.exact is not None else None
        return CertifiedReal(_neg(self.hi), _neg(self.lo), self.bits, exact)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        bits = max(self.bits, o.bits)
        if isinstance(self.exact, Fraction) and isinstance(o.exact, Fraction):
            return CertifiedReal.from_rational(self.exact * o.exact, bits)
        dn, un = _ctx(bits, False), _ctx(bits, True)
        pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)]
        lo = min(dn.mul(a, b) for a, b in pairs)
        hi = max(un.mul(a, b) for a, b in pairs)
        return CertifiedReal(lo, hi, bits)

    __rmul__ = __mul__

    def reciprocal(self) -> "CertifiedReal":
        if self.lo <= 0 <= self.hi:
            raise DomainError("reciprocal of an interval containing 0")
        if isinstance(self.exact, Fraction):
            return CertifiedReal.from_rational(1 / self.exact, self.bits)
        exact = self.exact.reciprocal() if isinstance(self.exact, QuadIrr) else None
        bits = self.bits
        return CertifiedReal(
            _ctx(bits, False).div(1, self.hi), _ctx(bits, True).div(1, self.lo), bits, exact
        )

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __repr__(self):
        ex = f", exact={self.exact}" if self.exact is not None else ""
        return f"CertifiedReal([{self.lo:.20g}, {self.hi:.20g}], bits={self.bits}{ex})"


def pow_int(x: CertifiedReal, n: int) -> CertifiedReal:
    """x**n for a nonnegative integer n."""
    if n < 0:
        return pow_int(x, -n).reciprocal()
    if isinstance(x.exact, Fraction):
        return CertifiedReal.from_rational(x.exact ** n, x.bits)
    bits = x.bits
    dn, un = _ctx(bits, False), _ctx(bits, True)
    if x.lo >= 0:
        return CertifiedReal(dn.pow(x.lo, n), un.pow(x.hi, n), bits)
    if x.hi <= 0:
        a, b = dn.pow(_neg(x.hi), n), un.pow(_neg(x.lo), n)
        return CertifiedReal(a, b, bits) if n % 2 == 0 else CertifiedReal(_neg(b), _neg(a), bits)
    if n % 2 == 1:
        return CertifiedReal(_neg(un.pow(_neg(x.lo), n)), un.pow(x.hi, n), bits)
    return CertifiedReal(mpfr(0), max(un.pow(_neg(x.lo), n), un.pow(x.hi, n)), bits)


_BIG_EXPONENT = 1 << 12


def _pow_via_log(x: CertifiedReal, e: Fraction) -> CertifiedReal:
    # x**p would overflow the exponent range for huge p; exp(e ln x) does not
    bits = x.bits
    work = bits + _GUARD + max(abs(e.numerator), e.denominator).bit_length()
    xw = CertifiedReal(x.lo, x.hi, work)
    r = exp(log(xw) * CertifiedReal.from_rational(e, work))
    return CertifiedReal(down(r.lo, bits), up(r.hi, bits), bits)


def pow_rational(x: CertifiedReal, p: int, q: int) -> CertifiedReal:
    """x**(p/q) for x > 0, integer p and q >= 1, rounded outward."""
    if x.lo <= 0:
        raise DomainError("rational power needs a positive argument")
    if q < 1:
        raise ValueError("root index must be >= 1")
    if isinstance(x.exact, Fraction):
        exact = rational_power(x.exact.numerator, x.exact.denominator, p, q)
        if exact is not None:
            return CertifiedReal.from_rational(Fraction(int(exact[0]), int(exact[1])), x.bits)
    bits = x.bits
    if max(abs(p), q) > _BIG_EXPONENT:
        return _pow_via_log(x, Fraction(p, q))
    work = bits + _GUARD
    dn, un = _ctx(work, False), _ctx(work, True)
    if p >= 0:
        lo = dn.rootn(dn.pow(x.lo, p), q)
        hi = un.rootn(un.pow(x.hi, p), q)
    else:
        # decreasing: lower bound from hi, upper bound from lo
        lo = dn.div(1, un.rootn(un.pow(x.hi, -p), q))
        hi = un.div(1, dn.rootn(dn.pow(x.lo, -p), q))
    return CertifiedReal(down(lo, bits), up(hi, bits), bits)


def pow_neg_rational(x: CertifiedReal, q: int, p: int) -> CertifiedReal:
    """x**(-q/p) for x > 0 and positive integers q, p."""
    if q <= 0 or p <= 0:
        raise ValueError("exponent parts must be positive")
    return pow_rational(x, -q, p)


def log(x: CertifiedReal) -> CertifiedReal:
    if x.lo <= 0:
        raise DomainError("log needs a positive argument")
    bits = x.bits
    return CertifiedReal(_ctx(bits, False).log(x.lo), _ctx(bits, True).log(x.hi), bits)


def exp(x: CertifiedReal) -> CertifiedReal:
    bits = x.bits
    return CertifiedReal(_ctx(bits, False).exp(x.lo), _ctx(bits, True).exp(x.hi), bits)


def iv_abs(x: CertifiedReal) -> CertifiedReal:
    if x.lo >= 0:
        return x
    if x.hi <= 0:
        return -x
    return CertifiedReal(mpfr(0), max(_neg(x.lo), x.hi), x.bits)


@dataclass(frozen=True)
class FloorResult:
    """Certified floor: ``value`` is None when undecided.

    ``integral`` is set when the argument is known to be exactly that integer.
    """

    value: Optional[int]
    integral: bool = False

    @property
    def decided(self) -> bool:
        return self.value is not None


def certified_floor(x: CertifiedReal) -> FloorResult:
    if isinstance(x.exact, Fraction):
        n = x.exact.numerator // x.exact.denominator
        return FloorResult(n, x.exact.denominator == 1)
    if isinstance(x.exact, QuadIrr):
        return FloorResult(x.exact.floor(), False)
    n = int(gmpy2.floor(x.lo))
    if x.hi < n + 1:
        if x.lo == x.hi and x.lo == n:
            # a single point interval is an exact value
            return FloorResult(n, True)
        if x.lo > n:
            return FloorResult(n, False)
    return FloorResult(None)


# ---------------------------------------------------------------------------
# Closed-form real expressions


@dataclass(frozen=True)
class NthRoot:
    """The positive real n-th root of a positive rational that is not a perfect power."""

    base: Fraction
    n: int

    def __post_init__(self):
        base = Fraction(self.base)
        object.__setattr__(self, "base", base)
        if base <= 0:
            raise DomainError("NthRoot base must be positive")
        if self.n < 2:
            raise DomainError("NthRoot index must be >= 2")
        if rational_power(base.numerator, base.denominator, 1, self.n) is not None:
            raise DomainError(f"{base} is an exact {self.n}-th power")

    def __str__(self):
        return f"root({self.n},{self.base})"


@dataclass(frozen=True)
class PolyRoot:
    """The unique real root of an integer polynomial inside (lo, hi)."""

    poly: object  # algver.ZPoly; kept untyped to avoid an import cycle
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        from .algver import sturm_count

        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if not self.lo < self.hi:
            raise DomainError("empty isolating interval")
        if self.poly.sign_at(self.hi) == 0:
            raise DomainError("root sits on the interval endpoint; use a rational")
        if sturm_count(self.poly, self.lo, self.hi) != 1:
            raise DomainError("interval does not isolate exactly one real root")

    def __str__(self):
        return f"polyroot({self.lo},{self.hi})"


RealExpr = Union[Fraction, int, QuadIrr, NthRoot, PolyRoot]


def _polyroot_bracket(e: PolyRoot, width: Fraction) -> tuple[Fraction, Fraction]:
    lo, hi = e.lo, e.hi
    s_hi = e.poly.sign_at(hi)
    while hi - lo > width:
        m = (lo + hi) / 2
        s = e.poly.sign_at(m)
        if s == 0:
            return m, m
        if s == s_hi:
            hi = m
        else:
            lo = m
    return lo, hi


def eval_expr(e: RealExpr, bits: int) -> CertifiedReal:
    """Enclosure of ``e`` of width at most 2**(1-bits) * max(1, |e|)."""
    if bits < 32:
        raise ValueError("bits must be >= 32")
    if isinstance(e, (int, Fraction)):
        return CertifiedReal.from_rational(e, bits)
    if isinstance(e, QuadIrr):
        return e.enclosure(bits)
    if isinstance(e, NthRoot):
        work = bits + _GUARD
        b = e.base
        lo = _ctx(work, False).rootn(down(b, work), e.n)
        hi = _ctx(work, True).rootn(up(b, work), e.n)
        return CertifiedReal(down(lo, bits), up(hi, bits), bits)
    if isinstance(e, PolyRoot):
        scale = max(abs(e.lo), abs(e.hi), Fraction(1))
        lo, hi = _polyroot_bracket(e, scale / (1 << (bits + 2)))
        if lo == hi:
            return CertifiedReal.from_rational(lo, bits)
        return CertifiedReal(down(lo, bits), up(hi, bits), bits)
    raise TypeError(f"not a RealExpr: {e!r}")


@dataclass(frozen=True)
class Decision:
    value: bool
    bits: int


def bit_schedule(start: int = DEFAULT_START_BITS, cap: int = DEFAULT_BIT_CAP):
    bits = start
    while bits <= cap:
        yield bits
        bits *= 2


def refine(
    e: RealExpr,
    predicate: Callable[[CertifiedReal], Optional[bool]],
    schedule: Optional[Iterable[int]] = None,
) -> Decision:
    """Evaluate ``e`` at escalating precision until ``predicate`` decides.

    ``predicate`` returns True/False when decided and None otherwise; it must
    stay decided once it has decided.
    """
    last = 0
    for bits in schedule if schedule is not None else bit_schedule():
        last = bits
        verdict = predicate(eval_expr(e, bits))
        if verdict is not None:
            return Decision(bool(verdict), bits)
    raise PrecisionExhausted(f"predicate undecided at {last} bits", last)


# ---------------------------------------------------------------------------
# Text forms

_RAT = r"-?\d+(?:/\d+)?"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(_RAT, text):
        raise ValueError(f"not a rational: {text!r}")
    return Fraction(text)


def parse_expr(text: str) -> RealExpr:
    """Parse ``p/q``, ``root(n,p/q)``, ``quad(p,q,D,r)`` or ``polyroot(file,lo,hi)``."""
    t = text.strip().replace(" ", "")
    if re.fullmatch(_RAT, t):
        return Fraction(t)
    m = re.fullmatch(rf"root\((\d+),({_RAT})\)", t)
    if m:
        n, base = int(m.group(1)), Fraction(m.group(2))
        exact = rational_power(base.numerator, base.denominator, 1, n) if base > 0 else None
        if exact is not None:
            return Fraction(int(exact[0]), int(exact[1]))
        return NthRoot(base, n)
    m = re.fullmatch(r"quad\((-?\d+),(-?\d+),(\d+),(-?\d+)\)", t)
    if m:
        p, q, D, r = (int(g) for g in m.groups())
        s, _ = _squarefree_split(D)
        if D == s * s:
            return Fraction(p + q * s, r)
        return QuadIrr(p, q, D, r)
    m = re.fullmatch(rf"polyroot\(([^,]+),({_RAT}),({_RAT})\)", t)
    if m:
        from .algver import ZPoly

        return PolyRoot(ZPoly.from_file(m.group(1)), Fraction(m.group(2)), Fraction(m.group(3)))
    raise ValueError(f"cannot parse real expression {text!r}")
