"""Dynamics of the power family f_alpha(x) = x**(-alpha) on the all-ones sequence.

Two maps on (1, 2) matter here:

* T(x) = (x - 1)**(-1/alpha), the expansion step while the digit stays 1;
* S(x) = 1 + x**(-alpha), its inverse, which builds the truncations
  V([1; 1, ..., 1]) one digit at a time.

Both share one fixed point x* in (1, 2).  Beyond the threshold alpha0 it
attracts under T, and S has an attracting 2-cycle (p, q) around it.  The
2-cycle bounds the interval of reals whose expansion is all ones.

Every root is bracketed by certified signs before it is refined.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .cfseq import Order, Quotients, altlex_compare
from .engine import ExpansionResult, Generator, Outcome, Power, expand
from .realkernel import (
    CertifiedReal,
    DomainError,
    RealExpr,
    down,
    eval_expr,
    iv_abs,
    log,
    pow_rational,
    rational_power,
    to_fraction,
    up,
)

DEFAULT_BITS = 96
GRID_STEP = Fraction(1, 1000)
ITERATION_CAP = 10_000


class InvalidRegime(ValueError):
    """The requested object only exists for alpha above the threshold."""


class Stability(enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    MARGINAL = "marginal"


def _classify(mult: CertifiedReal) -> Stability:
    if mult.hi < 1:
        return Stability.ATTRACTING
    if mult.lo > 1:
        return Stability.REPELLING
    return Stability.MARGINAL


@dataclass(frozen=True)
class FixedPointReport:
    location: CertifiedReal
    multiplier: CertifiedReal
    classification: Stability


def _q(v) -> Fraction:
    return Fraction(v)


def _pt(x: Fraction, bits: int) -> CertifiedReal:
    # a point interval without the exact tag, so powers stay cheap
    c = CertifiedReal.from_rational(x, bits)
    return CertifiedReal(c.lo, c.hi, bits)


def _neg_pow(x: CertifiedReal, e: Fraction) -> CertifiedReal:
    """x**(-e) for rational e > 0."""
    return pow_rational(x, -e.numerator, e.denominator)


def T_map(x: CertifiedReal, alpha: Fraction) -> CertifiedReal:
    return _neg_pow(x - 1, 1 / alpha)


def S_map(x: CertifiedReal, alpha: Fraction) -> CertifiedReal:
    return _neg_pow(x, alpha) + 1


def _sign(v: CertifiedReal) -> int:
    if v.lo > 0:
        return 1
    if v.hi < 0:
        return -1
    return 0


def bisect_root(
    h: Callable[[Fraction, int], CertifiedReal],
    lo: Fraction,
    hi: Fraction,
    bits: int,
    width: Optional[Fraction] = None,
) -> tuple[Fraction, Fraction]:
    """Shrink a sign-change bracket of ``h`` to ``width`` (default 2**-bits).

    The signs at the ends must already be certified and opposite.  When the
    sign at a midpoint cannot be decided the precision is doubled; if it is
    still undecided the midpoint sits on the root to working accuracy and
    the current bracket is returned.
    """
    width = Fraction(1, 1 << bits) if width is None else width
    s_lo = _sign(h(lo, bits))
    if s_lo == 0 or s_lo == _sign(h(hi, bits)):
        raise DomainError("no certified sign change on the bracket")
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = _sign(h(mid, bits)) or _sign(h(mid, 2 * bits))
        if s == 0:
            break
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _bracket(lo: Fraction, hi: Fraction, bits: int) -> CertifiedReal:
    return CertifiedReal(down(lo, bits), up(hi, bits), bits)


# ---------------------------------------------------------------------------
# The fixed point of the ones map


def _h_fixed(alpha: Fraction):
    # x - T(x) increases on (1, 2)
    return lambda x, bits: _pt(x, bits) - T_map(_pt(x, bits), alpha)


def fixed_point_location(alpha, bits: int = DEFAULT_BITS) -> CertifiedReal:
    alpha = _q(alpha)
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    h = _h_fixed(alpha)
    lo, hi = Fraction(1) + Fraction(1, 1 << 20), Fraction(2)
    while _sign(h(lo, bits)) >= 0:
        lo = 1 + (lo - 1) / (1 << 20)
    if _sign(h(hi, bits)) == 0:
        return _pt(hi, bits)
    a, b = bisect_root(h, lo, hi, bits)
    return _bracket(a, b, bits)


def ones_multiplier(x: CertifiedReal, alpha: Fraction) -> CertifiedReal:
    """|T'(x)| = (1/alpha)(x - 1)**(-1/alpha - 1)."""
    return T_map(x, alpha) / ((x - 1) * alpha)


def fixed_point_ones(alpha, bits: int = DEFAULT_BITS) -> FixedPointReport:
    """Fixed point of T in (1, 2), with the multiplier of T there."""
    alpha = _q(alpha)
    loc = fixed_point_location(alpha, bits)
    # at the fixed point T(x) = x, so |T'| = x / (alpha (x - 1))
    mult = loc / ((loc - 1) * alpha)
    return FixedPointReport(loc, mult, _classify(mult))


# ---------------------------------------------------------------------------
# The threshold alpha0


def _threshold_log_form(y: Fraction, bits: int) -> CertifiedReal:
    """y ln y - (y + 1) ln(y - 1); positive below alpha0, negative above."""
    Y = _pt(y, bits)
    return Y * log(Y) - (Y + 1) * log(Y - 1)


def alpha0_by_equation(bits: int = DEFAULT_BITS) -> CertifiedReal:
    """Root of y**y = (y - 1)**(y + 1), located in (4, 21/5)."""
    lo, hi = bisect_root(_threshold_log_form, Fraction(4), Fraction(21, 5), bits + 8,
                         Fraction(1, 1 << bits))
    return _bracket(lo, hi, bits)


def threshold_sign_changes(lo, hi, samples: int = 10_000, bits: int = 64) -> int:
    """Certified sign changes of the log form on an evenly spaced sample."""
    lo, hi = _q(lo), _q(hi)
    signs = []
    for i in range(samples + 1):
        s = _sign(_threshold_log_form(lo + (hi - lo) * i / samples, bits))
        if s:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def alpha0_by_stability(bits: int = 64) -> CertifiedReal:
    """The alpha at which the fixed point of T changes from repelling to attracting."""

    def h(alpha: Fraction, b: int) -> CertifiedReal:
        return fixed_point_ones(alpha, b).multiplier - 1

    lo, hi = bisect_root(h, Fraction(4), Fraction(43, 10), bits + 16, Fraction(1, 1 << bits))
    return _bracket(lo, hi, bits)


# ---------------------------------------------------------------------------
# The double iterate S o S


def _h_double(alpha: Fraction):
    def h(x: Fraction, bits: int) -> CertifiedReal:
        X = _pt(x, bits)
        return S_map(S_map(X, alpha), alpha) - X

    return h


def _double_multiplier(x: CertifiedReal, alpha: Fraction) -> CertifiedReal:
    # (S o S)'(x) = S'(S(x)) S'(x) with |S'(u)| = alpha u**(-alpha - 1)
    def ds(u):
        return _neg_pow(u, alpha + 1) * alpha

    return ds(S_map(x, alpha)) * ds(x)


def _sample_points(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    pts = set()
    n = int((hi - lo) / step)
    for i in range(1, n):
        pts.add(lo + step * i)
    # geometric points crowd the ends, where outer fixed points hide for large alpha
    for k in range(4, 200, 2):
        eps = Fraction(1, 1 << k)
        if lo + eps < hi:
            pts.add(lo + eps)
        if hi - eps > lo:
            pts.add(hi - eps)
    return sorted(pts)


def double_fixed_points(alpha, bits: int = DEFAULT_BITS, step: Fraction = GRID_STEP) -> list[FixedPointReport]:
    """All fixed points of S o S in (1, 2), ascending, with multipliers."""
    alpha = _q(alpha)
    center = fixed_point_location(alpha, bits)
    h = _h_double(alpha)
    c_lo, c_hi = to_fraction(center.lo), to_fraction(center.hi)
    reports = []

    def scan(lo: Fraction, hi: Fraction):
        signed = [(p, _sign(h(p, bits))) for p in _sample_points(lo, hi, step)]
        signed = [(p, s) for p, s in signed if s]
        for (p0, s0), (p1, s1) in zip(signed, signed[1:]):
            if s0 != s1:
                a, b = bisect_root(h, p0, p1, bits)
                loc = _bracket(a, b, bits)
                mult = iv_abs(_double_multiplier(loc, alpha))
                reports.append(FixedPointReport(loc, mult, _classify(mult)))

    # the centre is a known root; scan each side away from it
    gap = max(c_hi - c_lo, Fraction(1, 1 << (bits // 2)))
    scan(Fraction(1), c_lo - gap)
    mult_c = iv_abs(_double_multiplier(center, alpha))
    reports.append(FixedPointReport(center, mult_c, _classify(mult_c)))
    scan(c_hi + gap, Fraction(2))
    return reports


# ---------------------------------------------------------------------------
# Basin of the all-ones expansion


def _require_large(alpha: Fraction):
    a0 = alpha0_by_equation(64)
    if not alpha > to_fraction(a0.hi):
        raise InvalidRegime(f"alpha = {alpha} is not above the threshold {float(a0.lo):.7f}")


def _contraction_radius(center: CertifiedReal, alpha: Fraction, bits: int) -> Fraction:
    """r with |T'| < 1 on [x* - r, x* + r], so that interval maps into itself."""
    c = to_fraction(center.lo)
    r = (c - 1) / 2
    while r > Fraction(1, 1 << 60):
        m = ones_multiplier(_pt(c - r, bits), alpha)
        if m.hi < 1:
            return r
        r /= 2
    raise InvalidRegime("fixed point of the ones map is not attracting")


def orbit_confined(
    x: Fraction,
    alpha: Fraction,
    safe: tuple[Fraction, Fraction],
    bits: int,
    cap: int = ITERATION_CAP,
) -> Optional[bool]:
    """Does the orbit of x under T stay in (1, 2)?

    ``safe`` is an interval already known to be confined.  Returns None when
    the enclosure grows too wide or the cap is reached.
    """
    s_lo, s_hi = safe
    v = _pt(x, bits)
    for _ in range(cap):
        if v.lo >= 2:
            return False
        if v.lo >= s_lo and v.hi <= s_hi:
            return True
        if not (v.lo > 1 and v.hi < 2):
            return None
        v = T_map(v, alpha)
    return None


def basin_by_confinement(alpha, bits: int = DEFAULT_BITS, target_bits: int = 40) -> tuple[CertifiedReal, CertifiedReal]:
    """Endpoints of the all-ones interval, located by orbit escape."""
    alpha = _q(alpha)
    _require_large(alpha)
    center = fixed_point_location(alpha, bits)
    r = _contraction_radius(center, alpha, bits)
    c = to_fraction(center.lo)
    safe = [c - r, c + r]
    width = Fraction(1, 1 << target_bits)

    def confined(x: Fraction) -> bool:
        b = bits
        while True:
            v = orbit_confined(x, alpha, (safe[0], safe[1]), b)
            if v is not None:
                return v
            b *= 2
            if b > 8 * bits:
                raise DomainError(f"orbit of {x} undecided")

    def edge(out_pt: Fraction, in_pt: Fraction) -> CertifiedReal:
        while abs(in_pt - out_pt) > width:
            mid = (in_pt + out_pt) / 2
            if confined(mid):
                in_pt = mid
                safe[0], safe[1] = min(safe[0], mid), max(safe[1], mid)
            else:
                out_pt = mid
        return _bracket(min(in_pt, out_pt), max(in_pt, out_pt), bits)

    left = edge(Fraction(1) + Fraction(1, 1 << 30), safe[0])
    right = edge(Fraction(2) - Fraction(1, 1 << 30), safe[1])
    return left, right


def ones_basin(alpha, bits: int = DEFAULT_BITS) -> tuple[CertifiedReal, CertifiedReal]:
    """The maximal interval of x whose expansion under f_alpha is all ones.

    Its endpoints are the outer fixed points of S o S (the 2-cycle of S).
    """
    alpha = _q(alpha)
    _require_large(alpha)
    pts = double_fixed_points(alpha, bits)
    if len(pts) != 3:
        raise InvalidRegime(f"expected three fixed points of the double iterate, found {len(pts)}")
    return pts[0].location, pts[2].location


def in_ones_basin(x: Fraction, alpha: Fraction, bits: int = DEFAULT_BITS) -> Optional[bool]:
    """Certified membership of x in the all-ones interval at alpha.

    Left of x* the point is inside iff S o S(x) < x, right of x* iff
    S o S(x) > x; below the threshold only x* itself is inside.
    """
    x, alpha = _q(x), _q(alpha)
    if not 1 < x < 2:
        return False
    center = fixed_point_location(alpha, bits)
    if center.lo <= x <= center.hi:
        return None
    s = _sign(_h_double(alpha)(x, bits))
    if s == 0:
        return None
    mult = fixed_point_ones(alpha, bits).multiplier
    if mult.lo > 1:
        return False
    if x < center.lo:
        return s < 0
    return s > 0


def ones_threshold(x: RealExpr, bits: int = DEFAULT_BITS, lo=4, hi=64) -> CertifiedReal:
    """Infimum of the alpha for which x lies in the all-ones interval."""
    X = eval_expr(x, bits + 32)
    xq = to_fraction(X.lo) if not isinstance(x, (int, Fraction)) else Fraction(x)
    if not 1 < xq < 2:
        raise DomainError("x must lie in (1, 2)")
    width = Fraction(1, 1 << (bits // 2))

    def inside(alpha: Fraction) -> bool:
        # x is replaced by a hair-thin enclosure: both ends must agree
        a = in_ones_basin(to_fraction(X.lo), alpha, bits)
        b = in_ones_basin(to_fraction(X.hi), alpha, bits)
        if a is None or b is None or a != b:
            raise DomainError(f"membership undecided at alpha = {alpha}")
        return a

    lo, hi = Fraction(lo), Fraction(hi)
    if inside(lo) or not inside(hi):
        raise DomainError("threshold not bracketed")
    while hi - lo > width:
        mid = (lo + hi) / 2
        if inside(mid):
            hi = mid
        else:
            lo = mid
    return _bracket(lo, hi, bits)


# ---------------------------------------------------------------------------
# No bifurcation for [n; n, n, ...] with n >= 2


def _key_form(n: int, y: CertifiedReal) -> CertifiedReal:
    """(y + 1) ln n + y ln y - (y + 1) ln(y - 1), the log of n**(y+1) y**y / (y-1)**(y+1)."""
    ln_n = log(CertifiedReal.from_rational(n, y.bits)) if n > 1 else CertifiedReal.from_rational(0, y.bits)
    return (y + 1) * ln_n + y * log(y) - (y + 1) * log(y - 1)


@dataclass(frozen=True)
class SignReport:
    n: int
    alpha_max: Fraction
    sign_changes: list[tuple[Fraction, Fraction]]
    positive_pieces: int
    negative_pieces: int
    analytic_cut: Fraction

    @property
    def sign_definite(self) -> bool:
        return not self.sign_changes and self.negative_pieces == 0


def no_bifurcation_check(n: int, alpha_max=100, bits: int = 64, pieces: int = 400) -> SignReport:
    """Sign of n**(y+1) y**y - (y-1)**(y+1) on (1, alpha_max].

    On (1, 3/2] the form is positive for every n >= 1: there
    -(y + 1) ln(y - 1) >= 2 ln 2 and the other terms are nonnegative.
    The rest is covered by interval evaluation on a subdivision that is
    refined wherever the sign is not decided.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    alpha_max = _q(alpha_max)
    cut = Fraction(3, 2)
    stack = []
    step = (alpha_max - cut) / pieces
    for i in range(pieces):
        stack.append((cut + step * i, cut + step * (i + 1)))
    signs: list[tuple[Fraction, Fraction, int]] = []
    min_width = Fraction(1, 1 << 30)
    while stack:
        a, b = stack.pop()
        y = CertifiedReal(down(a, bits), up(b, bits), bits)
        s = _sign(_key_form(n, y))
        if s or b - a < min_width:
            signs.append((a, b, s))
        else:
            m = (a + b) / 2
            stack.append((m, b))
            stack.append((a, m))
    signs.sort()
    changes = []
    pos = sum(1 for *_, s in signs if s > 0)
    neg = sum(1 for *_, s in signs if s < 0)
    decided = [(a, b, s) for a, b, s in signs if s]
    prev_sign = 1  # positive on the analytic piece
    prev_end = cut
    for a, b, s in decided:
        if s != prev_sign:
            changes.append((prev_end, a))
        prev_sign, prev_end = s, b
    return SignReport(n, alpha_max, changes, pos, neg, cut)


# ---------------------------------------------------------------------------
# Monotonicity of alpha -> E_{f_alpha}(x)


@dataclass(frozen=True)
class ScanRow:
    alpha: Fraction
    quotients: Quotients
    versus_previous: Optional[Order]


def alpha_monotonicity_scan(
    x: RealExpr, alpha_grid: Sequence, terms: int = 60, bit_cap: int = 1 << 14
) -> list[ScanRow]:
    grid = [_q(a) for a in alpha_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha grid must be ascending")
    rows: list[ScanRow] = []
    prev = None
    for a in grid:
        q = expand(Power(a), x, terms, bit_cap=bit_cap).quotients
        rows.append(ScanRow(a, q, None if prev is None else altlex_compare(prev, q)))
        prev = q
    return rows


def _direction(x: RealExpr, alpha: Fraction, h: Fraction, terms: int) -> Order:
    for t in (terms, 2 * terms, 4 * terms):
        a = expand(Power(alpha), x, t, bit_cap=1 << 16).quotients
        b = expand(Power(alpha + h), x, t, bit_cap=1 << 16).quotients
        c = altlex_compare(a, b)
        if c is not Order.UNKNOWN:
            return c
    return Order.UNKNOWN


def locate_monotonicity_switch(
    x: RealExpr, lo, hi, tol=Fraction(1, 10**4), terms: int = 60
) -> tuple[Fraction, Fraction]:
    """Bracket where alpha -> E_{f_alpha}(x) turns from increasing to decreasing.

    The local direction at alpha compares the expansions at alpha and
    alpha + tol/10; the bracket is halved until it is narrower than tol.
    """
    lo, hi, tol = _q(lo), _q(hi), _q(tol)
    h = tol / 10
    if _direction(x, lo, h, terms) is not Order.LESS:
        raise DomainError("expansion is not increasing at the lower end")
    if _direction(x, hi, h, terms) is not Order.GREATER:
        raise DomainError("expansion is not decreasing at the upper end")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        d = _direction(x, mid, h, terms)
        if d is Order.LESS:
            lo = mid
        elif d is Order.GREATER:
            hi = mid
        else:
            raise DomainError(f"direction undecided at alpha = {mid}")
    return lo, hi


# ---------------------------------------------------------------------------
# Sweeps


CSV_COLUMNS = ["alpha", "fp1", "mult1", "class1", "fp2a", "fp2b", "fp2c", "basin_lo", "basin_hi"]


def _mid(v: CertifiedReal) -> str:
    return f"{float(v.mid):.12g}"


def bifurcation_row(alpha, bits: int = DEFAULT_BITS) -> dict:
    alpha = _q(alpha)
    fp = fixed_point_ones(alpha, bits)
    dbl = double_fixed_points(alpha, bits)
    row = {k: "" for k in CSV_COLUMNS}
    row["alpha"] = str(alpha)
    row["fp1"] = _mid(fp.location)
    row["mult1"] = _mid(fp.multiplier)
    row["class1"] = fp.classification.value
    for key, rep in zip(("fp2a", "fp2b", "fp2c"), dbl):
        row[key] = _mid(rep.location)
    if len(dbl) == 3:
        row["basin_lo"] = _mid(dbl[0].location)
        row["basin_hi"] = _mid(dbl[2].location)
    return row


def sweep_csv(alphas: Iterable, bits: int = DEFAULT_BITS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for a in alphas:
        w.writerow(bifurcation_row(a, bits))
    return buf.getvalue()


# ---------------------------------------------------------------------------
# A generator that agrees with f_5 outside a patch inside the basin


class PatchedPower(Generator):
    """f_5 with the piece over [left, right] replaced by a straight chord.

    The patch sits inside the all-ones interval of f_5, so every orbit that
    reaches it has already locked onto the digit 1 and the expansions of
    the two generators coincide.
    """

    def __init__(self, left=Fraction(107, 100), right=Fraction(17, 10), alpha=5):
        self.alpha = Fraction(alpha)
        if self.alpha.denominator != 1:
            raise ValueError("integer alpha keeps f exact on rationals")
        self.left, self.right = Fraction(left), Fraction(right)
        if not 1 < self.left < self.right:
            raise ValueError("patch must be a subinterval of (1, inf)")
        k = int(self.alpha)
        self._fl = self.left ** -k  # f(left), the larger value
        self._fr = self.right ** -k
        self.name = f"patched-power:{self.alpha}[{self.left},{self.right}]"

    def f_exact(self, x):
        x = Fraction(x)
        if self.left <= x <= self.right:
            t = (x - self.left) / (self.right - self.left)
            return self._fl + (self._fr - self._fl) * t
        return x ** -int(self.alpha)

    def phi_exact(self, y):
        y = Fraction(y)
        if self._fr <= y <= self._fl:
            t = (y - self._fl) / (self._fr - self._fl)
            return self.left + (self.right - self.left) * t
        r = rational_power(y.numerator, y.denominator, -1, int(self.alpha))
        return None if r is None else Fraction(int(r[0]), int(r[1]))

    def _phi_point(self, y: Fraction, bits: int) -> CertifiedReal:
        if self._fr <= y <= self._fl:
            return CertifiedReal.from_rational(self.phi_exact(y), bits)
        return pow_rational(_pt(y, bits), -1, int(self.alpha))

    def phi(self, y: CertifiedReal) -> CertifiedReal:
        bits = y.bits
        if isinstance(y.exact, Fraction):
            return self._phi_point(y.exact, bits)
        lo = self._phi_point(to_fraction(y.hi), bits).lo
        hi = self._phi_point(to_fraction(y.lo), bits).hi
        return CertifiedReal(lo, hi, bits)

    def f(self, x: CertifiedReal) -> CertifiedReal:
        bits = x.bits
        if isinstance(x.exact, Fraction):
            return CertifiedReal.from_rational(self.f_exact(x.exact), bits)
        lo = CertifiedReal.from_rational(self.f_exact(to_fraction(x.hi)), bits).lo
        hi = CertifiedReal.from_rational(self.f_exact(to_fraction(x.lo)), bits).hi
        return CertifiedReal(lo, hi, bits)
