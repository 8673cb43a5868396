"""Exact integer polynomial algebra: resultants, Sturm counts, the period-4 cycle.

Dense polynomials are stored as tuples of Python ints in ascending degree.
Large products and exact quotients go through Kronecker substitution on
gmpy2 integers, which keeps fraction-free elimination on matrices with
polynomial entries fast enough for degree ~100 eliminants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from gmpy2 import mpz

from .realkernel import CertifiedReal, pow_neg_rational, to_fraction

_KRONECKER_MIN = 6


def _strip(c: Sequence[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(int(v) for v in c)


def _maxbits(c: Sequence[int]) -> int:
    return max((abs(v).bit_length() for v in c), default=0)


def _pack(c: Sequence[int], k: int) -> mpz:
    v = mpz(0)
    for a in reversed(c):
        v = (v << k) + a
    return v


def _unpack(v: mpz, k: int) -> list[int]:
    out = []
    half = mpz(1) << (k - 1)
    full = mpz(1) << k
    mask = full - 1
    while v != 0:
        d = v & mask
        v >>= k
        if d >= half:
            d -= full
            v += 1
        out.append(int(d))
    return out


def _mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if not a or not b:
        return ()
    if min(len(a), len(b)) < _KRONECKER_MIN:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return _strip(out)
    k = _maxbits(a) + _maxbits(b) + min(len(a), len(b)).bit_length() + 2
    return _strip(_unpack(_pack(a, k) * _pack(b, k), k))


def _exact_div(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Quotient a / b in Z[x]; raises ArithmeticError if b does not divide a."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return ()
    if len(b) == 1:
        d = b[0]
        if any(v % d for v in a):
            raise ArithmeticError("inexact polynomial division")
        return tuple(v // d for v in a)
    n = len(a) - len(b)
    if n < 0:
        raise ArithmeticError("inexact polynomial division")
    # factor coefficients are bounded by 2**deg * ||a||_2 (Mignotte)
    k = _maxbits(a) + len(a) + n + 4
    q_int, rem = divmod(_pack(a, k), _pack(b, k))
    if rem != 0:
        raise ArithmeticError("inexact polynomial division")
    q = _strip(_unpack(q_int, k))
    if _mul(q, b) != a:
        raise ArithmeticError("inexact polynomial division")
    return q


class ZPoly:
    """Dense univariate polynomial with integer coefficients (ascending degree)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int] = ()):
        self.coeffs = _strip(coeffs)

    @classmethod
    def x(cls) -> "ZPoly":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "ZPoly":
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ZPoly":
        """Read one decimal coefficient per line, ascending; ``#`` starts a comment."""
        return cls.from_text(Path(path).read_text())

    @classmethod
    def from_text(cls, text: str) -> "ZPoly":
        coeffs = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                coeffs.append(int(line))
        return cls(coeffs)

    def to_text(self) -> str:
        return "".join(f"{c}\n" for c in self.coeffs)

    # -- basic protocol --------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = ZPoly((other,))
        return isinstance(other, ZPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"ZPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = str(abs(c)) if (abs(c) != 1 or i == 0) else ""
            sep = "*" if coef and mono else ""
            parts.append(("-" if c < 0 else "+") + coef + sep + mono)
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    # -- ring operations -----------------------------------------------------------
    @staticmethod
    def _lift(v) -> "ZPoly":
        return v if isinstance(v, ZPoly) else ZPoly((v,))

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = o.coeffs + (0,) * (n - len(o.coeffs))
        return ZPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return ZPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return ZPoly([c * other for c in self.coeffs])
        if not isinstance(other, ZPoly):
            return NotImplemented
        return ZPoly(_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = ZPoly((1,))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def exact_div(self, other) -> "ZPoly":
        return ZPoly(_exact_div(self.coeffs, self._lift(other).coeffs))

    def shift(self, k: int) -> "ZPoly":
        """Multiply by x**k."""
        return ZPoly((0,) * k + self.coeffs) if self.coeffs else self

    def derivative(self) -> "ZPoly":
        return ZPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "ZPoly":
        """Divide by the (positive) content; the sign is preserved."""
        g = self.content()
        return ZPoly([c // g for c in self.coeffs]) if g > 1 else self

    def pseudo_rem(self, other: "ZPoly") -> "ZPoly":
        """lc(other)**(deg self - deg other + 1) * self mod other, computed over Z."""
        if not other:
            raise ZeroDivisionError("pseudo-remainder by zero")
        r = list(self.coeffs)
        m = other.degree
        b = other.coeffs
        lb = b[-1]
        delta = len(r) - 1 - m
        if delta < 0:
            return self
        steps = 0
        while len(r) - 1 >= m and r:
            lr = r[-1]
            k = len(r) - 1 - m
            r = [c * lb for c in r]
            for j in range(m + 1):
                r[k + j] -= lr * b[j]
            steps += 1
            while r and r[-1] == 0:
                r.pop()
        extra = delta + 1 - steps
        if extra:
            f = lb ** extra
            r = [c * f for c in r]
        return ZPoly(r)

    def divmod_q(self, other: "ZPoly") -> tuple[list[Fraction], list[Fraction]]:
        """Quotient and remainder over Q, as Fraction coefficient lists."""
        r = [Fraction(c) for c in self.coeffs]
        b = other.coeffs
        m = len(b) - 1
        q = [Fraction(0)] * max(len(r) - m, 0)
        while len(r) - 1 >= m and r:
            k = len(r) - 1 - m
            t = r[-1] / b[-1]
            q[k] = t
            for j in range(m + 1):
                r[k + j] -= t * b[j]
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return q, r

    def divides(self, other: "ZPoly") -> bool:
        """True when self divides other in Q[x]."""
        return not other.pseudo_rem(self)

    # -- evaluation ------------------------------------------------------------
    def __call__(self, x):
        if isinstance(x, CertifiedReal):
            return self.eval_interval(x)
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x) -> int:
        """Exact sign at a rational point (homogenised integer Horner)."""
        x = Fraction(x)
        n, d = x.numerator, x.denominator
        acc = 0
        dp = 1
        for c in reversed(self.coeffs):
            acc = acc * n + c * dp
            dp *= d
        return (acc > 0) - (acc < 0)

    def sign_at_infinity(self, direction: int) -> int:
        if not self.coeffs:
            return 0
        s = 1 if self.lc > 0 else -1
        if direction < 0 and self.degree % 2 == 1:
            s = -s
        return s

    def eval_interval(self, x: CertifiedReal) -> CertifiedReal:
        """Horner evaluation with outward rounding."""
        if isinstance(x.exact, Fraction):
            return CertifiedReal.from_rational(self(x.exact), x.bits)
        acc = CertifiedReal.from_rational(0, x.bits)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def poly_gcd(a: ZPoly, b: ZPoly) -> ZPoly:
    """Primitive gcd in Z[x] (positive leading coefficient)."""
    a, b = a.primitive(), b.primitive()
    while b:
        a, b = b, a.pseudo_rem(b).primitive()
    if a.lc < 0:
        a = -a
    return a


def squarefree_part(p: ZPoly) -> ZPoly:
    if p.degree <= 0:
        return p
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return p
    q, r = p.divmod_q(g)
    assert not r
    den = 1
    for c in q:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return ZPoly([int(c * den) for c in q]).primitive()


# ---------------------------------------------------------------------------
# Bivariate polynomials


class BiPoly:
    """Polynomial in a main variable whose coefficients are ZPoly in an inner one."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[ZPoly] = ()):
        c = [ZPoly._lift(v) for v in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], int]) -> "BiPoly":
        """Build from {(main exponent, inner exponent): coefficient}."""
        if not terms:
            return cls()
        n = max(i for i, _ in terms) + 1
        m = max(j for _, j in terms) + 1
        rows = [[0] * m for _ in range(n)]
        for (i, j), c in terms.items():
            rows[i][j] += c
        return cls([ZPoly(r) for r in rows])

    def terms(self) -> dict[tuple[int, int], int]:
        return {(i, j): c for i, p in enumerate(self.coeffs) for j, c in enumerate(p.coeffs) if c}

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def inner_degree(self) -> int:
        return max((p.degree for p in self.coeffs), default=-1)

    def swap(self) -> "BiPoly":
        """Exchange the roles of the main and inner variables."""
        return BiPoly.from_terms({(j, i): c for (i, j), c in self.terms().items()})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, BiPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"BiPoly({self.terms()})"

    @staticmethod
    def _lift(v) -> "BiPoly":
        if isinstance(v, BiPoly):
            return v
        return BiPoly((ZPoly._lift(v),))

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        z = ZPoly()
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = o.coeffs + (z,) * (n - len(o.coeffs))
        return BiPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return BiPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def _flatten(self, stride: int) -> ZPoly:
        out: list[int] = []
        for i, p in enumerate(self.coeffs):
            base = i * stride
            if len(out) < base + len(p.coeffs):
                out.extend([0] * (base + len(p.coeffs) - len(out)))
            for j, c in enumerate(p.coeffs):
                out[base + j] += c
        return ZPoly(out)

    @staticmethod
    def _unflatten(p: ZPoly, stride: int) -> "BiPoly":
        c = p.coeffs
        return BiPoly([ZPoly(c[i : i + stride]) for i in range(0, len(c), stride)])

    def __mul__(self, other):
        o = self._lift(other)
        if not self or not o:
            return BiPoly()
        stride = self.inner_degree + o.inner_degree + 1
        return self._unflatten(self._flatten(stride) * o._flatten(stride), stride)

    __rmul__ = __mul__

    def exact_div(self, other) -> "BiPoly":
        o = self._lift(other)
        if not self:
            return BiPoly()
        # the quotient's inner degree cannot exceed ours
        stride = self.inner_degree + 1
        if o.inner_degree >= stride:
            raise ArithmeticError("inexact bivariate division")
        return self._unflatten(self._flatten(stride).exact_div(o._flatten(stride)), stride)


# ---------------------------------------------------------------------------
# Resultants


def bareiss_det(matrix: Sequence[Sequence], exact_div: Callable, zero) -> object:
    """Fraction-free (Bareiss) determinant over an integral domain.

    Every division performed is exact; ``exact_div(a, b)`` must return a/b.
    """
    m = [list(row) for row in matrix]
    n = len(m)
    if n == 0:
        return zero + 1
    sign = 1
    prev = None
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return zero
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = pivot * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = v if prev is None else exact_div(v, prev)
            m[i][k] = zero
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def sylvester_matrix(p: Sequence, q: Sequence, zero) -> list[list]:
    """Sylvester matrix of two polynomials given as ascending coefficient lists."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    rows = []
    pd, qd = list(reversed(p)), list(reversed(q))
    for i in range(n):
        rows.append([zero] * i + pd + [zero] * (size - i - m - 1))
    for i in range(m):
        rows.append([zero] * i + qd + [zero] * (size - i - n - 1))
    return rows


def _ring_div(a, b):
    if isinstance(a, int):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact integer division")
        return q
    return a.exact_div(b)


def resultant_coeffs(p: Sequence, q: Sequence, zero):
    """Resultant of two polynomials with coefficients in int, ZPoly or BiPoly."""
    if len(p) < 2 and len(q) < 2:
        raise ValueError("both polynomials have degree 0 in the eliminated variable")
    if len(p) < 2:
        return p[0] ** (len(q) - 1) if p else zero
    if len(q) < 2:
        return q[0] ** (len(p) - 1) if q else zero
    return bareiss_det(sylvester_matrix(p, q, zero), _ring_div, zero)


def resultant(p: BiPoly, q: BiPoly, eliminate: str = "main") -> ZPoly:
    """Res of two bivariate polynomials, eliminating the main or inner variable."""
    if eliminate == "inner":
        p, q = p.swap(), q.swap()
    elif eliminate != "main":
        raise ValueError("eliminate must be 'main' or 'inner'")
    return resultant_coeffs(list(p.coeffs), list(q.coeffs), ZPoly())


# ---------------------------------------------------------------------------
# Sturm sequences


def sturm_sequence(p: ZPoly) -> list[ZPoly]:
    """Sturm chain of the squarefree part of p, each member made primitive.

    Remainders are negated pseudo-remainders rescaled by positive factors only,
    so sign variations are those of the classical chain.
    """
    p = squarefree_part(p)
    seq = [p, p.derivative()]
    while seq[-1].degree > 0:
        a, b = seq[-2], seq[-1]
        r = a.pseudo_rem(b)
        delta = a.degree - b.degree + 1
        if b.lc < 0 and delta % 2 == 1:
            r = -r
        r = (-r).primitive()
        if not r:
            break
        seq.append(r)
    return [s for s in seq if s]


def _variations(signs: list[int]) -> int:
    s = [v for v in signs if v != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _signs_at(seq: list[ZPoly], x) -> list[int]:
    if x == float("inf") or x == -float("inf"):
        d = 1 if x > 0 else -1
        return [s.sign_at_infinity(d) for s in seq]
    return [s.sign_at(x) for s in seq]


def sturm_count(p: ZPoly, a=-float("inf"), b=float("inf"), seq: Optional[list[ZPoly]] = None) -> int:
    """Number of distinct real roots of p in the half-open interval (a, b]."""
    if p.degree <= 0:
        return 0
    seq = seq if seq is not None else sturm_sequence(p)
    return _variations(_signs_at(seq, a)) - _variations(_signs_at(seq, b))


# ---------------------------------------------------------------------------
# The period-4 cycle  x = [1; 1, 1, 2, x]  under f(t) = t**(-3/2)


def _zx(terms: dict[tuple[int, int], int]) -> BiPoly:
    """Element of Z[z, x] from {(z exponent, x exponent): coefficient}."""
    return BiPoly.from_terms(terms)


def cycle_system() -> dict[str, list[BiPoly]]:
    """The system y^3(x-1)^2 = 1, z^3(y-1)^2 = 1, w^3(z-1)^2 = 1, x^3(w-2)^2 = 1.

    Returned as polynomials in the variable to be eliminated first (y for the
    first pair, w for the second), with coefficients in Z[z, x].
    """
    zero = BiPoly()
    return {
        # y^3 (x-1)^2 - 1  and  z^3 (y-1)^2 - 1, in y
        "e1": [_zx({(0, 0): -1}), zero, zero, _zx({(0, 2): 1, (0, 1): -2, (0, 0): 1})],
        "e2": [_zx({(3, 0): 1, (0, 0): -1}), _zx({(3, 0): -2}), _zx({(3, 0): 1})],
        # w^3 (z-1)^2 - 1  and  x^3 (w-2)^2 - 1, in w
        "e3": [_zx({(0, 0): -1}), zero, zero, _zx({(2, 0): 1, (1, 0): -2, (0, 0): 1})],
        "e4": [_zx({(0, 3): 4, (0, 0): -1}), _zx({(0, 3): -4}), _zx({(0, 3): 1})],
    }


def eliminate_cycle() -> ZPoly:
    """Univariate eliminant in x of the cycle system.

    y is eliminated between the first two equations and w between the last
    two, each leaving a polynomial in (z, x); z is then eliminated.
    """
    sys_ = cycle_system()
    r_y = resultant_coeffs(sys_["e1"], sys_["e2"], BiPoly())
    r_w = resultant_coeffs(sys_["e3"], sys_["e4"], BiPoly())
    return resultant(r_y, r_w, eliminate="main")


def cycle_map(x: CertifiedReal) -> CertifiedReal:
    """1 + (1 + (1 + (2 + x^(-3/2))^(-3/2))^(-3/2))^(-3/2)."""
    w = 2 + pow_neg_rational(x, 3, 2)
    z = 1 + pow_neg_rational(w, 3, 2)
    y = 1 + pow_neg_rational(z, 3, 2)
    return 1 + pow_neg_rational(y, 3, 2)


def solve_cycle(bits: int = 128) -> CertifiedReal:
    """Enclosure of the fixed point of cycle_map near 1.442.

    cycle_map is decreasing, so cycle_map(x) - x is strictly decreasing and
    bisection on its certified sign is sound.
    """
    lo, hi = Fraction(144, 100), Fraction(145, 100)
    target = Fraction(1, 1 << bits)
    while hi - lo > target:
        mid = (lo + hi) / 2
        h = cycle_map(CertifiedReal.from_rational(mid, bits + 16)) - mid
        if h.lo > 0:
            lo = mid
        elif h.hi < 0:
            hi = mid
        else:
            break
    return CertifiedReal.from_rational(lo, bits).__class__(
        CertifiedReal.from_rational(lo, bits).lo, CertifiedReal.from_rational(hi, bits).hi, bits
    )


def load_deg93() -> ZPoly:
    """The bundled degree-93 polynomial (transcribed data, verified by the tests)."""
    text = resources.files("fexpansions.data").joinpath("deg93.txt").read_text()
    return ZPoly.from_text(text)


@dataclass(frozen=True)
class Deg93Report:
    eliminant_degree: int
    divides: bool
    cofactor_degree: int
    real_roots: int
    roots_below: int
    root_index: int
    contains_zero: bool
    root: CertifiedReal

    @property
    def passed(self) -> bool:
        return (
            self.divides
            and self.real_roots == 7
            and self.root_index == 4
            and self.contains_zero
        )


def verify_deg93(bits: int = 128, eliminant: Optional[ZPoly] = None) -> Deg93Report:
    """Check the bundled polynomial against the cycle system and its root."""
    p = load_deg93()
    e = eliminant if eliminant is not None else eliminate_cycle()
    divides = p.divides(e)
    q, _ = e.divmod_q(p) if divides else ([], [])
    root = solve_cycle(bits)
    seq = sturm_sequence(p)
    total = sturm_count(p, seq=seq)
    lo, hi = to_fraction(root.lo), to_fraction(root.hi)
    below = sturm_count(p, -float("inf"), lo, seq=seq)
    inside = sturm_count(p, lo, hi, seq=seq)
    index = below + 1 if inside == 1 else 0
    value = p.eval_interval(root)
    return Deg93Report(
        eliminant_degree=e.degree,
        divides=divides,
        cofactor_degree=len(q) - 1,
        real_roots=total,
        roots_below=below,
        root_index=index,
        contains_zero=value.lo <= 0 <= value.hi,
        root=root,
    )
