import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from fexpansions.algver import ZPoly
from fexpansions.realkernel import (
    CertifiedReal,
    DomainError,
    NthRoot,
    PolyRoot,
    PrecisionExhausted,
    QuadIrr,
    certified_floor,
    eval_expr,
    parse_expr,
    pow_int,
    pow_neg_rational,
    pow_rational,
    rational_power,
    refine,
    sign_sqrt_sum,
    to_fraction,
)


def loose(v: CertifiedReal) -> CertifiedReal:
    """Same enclosure without the exact tag, forcing the interval path."""
    return CertifiedReal(v.lo, v.hi, v.bits)


def encloses(v: CertifiedReal, x) -> bool:
    return to_fraction(v.lo) <= x <= to_fraction(v.hi)


def sympy_bounds(expr, digits=60):
    val = sympy.Rational(sympy.N(expr, digits))
    eps = sympy.Rational(1, 10 ** (digits - 5))
    return Fraction(str(val - eps)), Fraction(str(val + eps))


class TestEvalExpr:
    def test_rational_exact(self):
        v = eval_expr(Fraction(2, 3), 64)
        assert v.exact == Fraction(2, 3) and encloses(v, Fraction(2, 3))

    @pytest.mark.parametrize("base, n, printed", [(3, 3, "1.44224957"), (7, 5, "1.47577")])
    def test_roots_contain_printed_digits(self, base, n, printed):
        v = eval_expr(NthRoot(Fraction(base), n), 64)
        ulp = Fraction(1, 10 ** (len(printed) - 2))
        assert to_fraction(v.lo) > Fraction(printed) - ulp and to_fraction(v.hi) < Fraction(printed) + ulp

    @pytest.mark.parametrize("base, n", [(3, 3), (7, 5), (Fraction(2, 3), 2), (10, 7)])
    @pytest.mark.parametrize("bits", [64, 200, 1000])
    def test_roots_match_sympy(self, base, n, bits):
        v = eval_expr(NthRoot(Fraction(base), n), bits)
        lo, hi = sympy_bounds(sympy.root(sympy.Rational(str(Fraction(base))), n), bits // 3 + 20)
        assert to_fraction(v.lo) <= hi and to_fraction(v.hi) >= lo
        assert to_fraction(v.hi) - to_fraction(v.lo) <= Fraction(2, 1 << (bits - 2))

    def test_quadirr_enclosure(self):
        q = QuadIrr(-1, 1, 2, 1)
        v = eval_expr(q, 128)
        lo, hi = sympy_bounds(sympy.sqrt(2) - 1, 50)
        assert to_fraction(v.lo) <= hi and to_fraction(v.hi) >= lo
        assert v.exact == q

    def test_polyroot(self):
        r = PolyRoot(ZPoly([-2, 0, 1]), 1, 2)
        v = eval_expr(r, 100)
        assert to_fraction(v.lo) ** 2 < 2 < to_fraction(v.hi) ** 2

    def test_rejects_perfect_power(self):
        with pytest.raises(DomainError):
            NthRoot(Fraction(8), 3)

    def test_polyroot_needs_isolating_interval(self):
        with pytest.raises(DomainError):
            PolyRoot(ZPoly([-2, 0, 1]), -2, 2)


class TestFloor:
    def test_exact(self):
        assert certified_floor(CertifiedReal.from_rational(Fraction(9, 4), 64)).value == 2

    def test_straddle_undecided(self):
        v = CertifiedReal.from_rational(Fraction(19999, 10000), 64)
        w = CertifiedReal(v.lo, CertifiedReal.from_rational(Fraction(20001, 10000), 64).hi, 64)
        assert not certified_floor(w).decided

    def test_integer_flag(self):
        fl = certified_floor(CertifiedReal.from_rational(16, 64))
        assert fl.value == 16 and fl.integral

    def test_negative(self):
        assert certified_floor(CertifiedReal.from_rational(Fraction(-1, 3), 64)).value == -1

    def test_quadratic_exact(self):
        assert certified_floor(eval_expr(QuadIrr(1, 1, 5, 2), 64)).value == 1


class TestPowers:
    def test_two_thirds_squared_inverse(self):
        assert pow_rational(CertifiedReal.from_rational(Fraction(2, 3), 64), -2, 1).exact == Fraction(9, 4)

    def test_quarter(self):
        assert pow_rational(CertifiedReal.from_rational(Fraction(1, 4), 64), -2, 1).exact == 16

    def test_monotone_width(self):
        four = CertifiedReal.from_rational(4, 64)
        x = CertifiedReal(four.lo - 2 ** -40, four.hi + 2 ** -40, 64)
        y = pow_neg_rational(x, 1, 2)
        assert encloses(y, Fraction(1, 2))
        assert to_fraction(y.width) <= 2 * to_fraction(x.width)

    def test_rational_power(self):
        assert rational_power(27, 8, -2, 3) == (4, 9)
        assert rational_power(2, 1, 1, 2) is None

    def test_huge_exponent_via_log(self):
        x = CertifiedReal.from_rational(Fraction(3, 2), 128)
        y = pow_rational(loose(x), 1, 10**9 + 7)
        assert encloses(y, 1) is False and to_fraction(y.lo) > 1
        assert to_fraction(y.hi) - 1 < Fraction(1, 10**9)

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            pow_rational(CertifiedReal.from_rational(0, 64), -1, 2)


class TestQuadIrr:
    def test_canonical(self):
        q = QuadIrr(2, 2, 8, 4)
        assert (q.p, q.q, q.D, q.r) == (1, 2, 2, 2)

    def test_rational_rejected(self):
        with pytest.raises(DomainError):
            QuadIrr(1, 1, 4, 1)

    def test_golden_cf(self):
        assert QuadIrr(1, 1, 5, 2).continued_fraction() == (1, (), (1,))

    def test_sqrt2_cf(self):
        assert QuadIrr(0, 1, 2, 1).continued_fraction() == (1, (), (2,))

    @pytest.mark.parametrize("D", [2, 3, 7, 13, 19, 43])
    def test_sqrt_cf_matches_sympy(self, D):
        head, pre, per = QuadIrr(0, 1, D, 1).continued_fraction()
        ref = sympy.continued_fraction_periodic(0, 1, D)
        assert [head, *pre] == ref[:-1] and list(per) == ref[-1]

    def test_ordering_with_rationals(self):
        q = QuadIrr(-1, 1, 2, 1)
        assert Fraction(41, 100) < q < Fraction(42, 100)

    @given(st.integers(-10**6, 10**6), st.integers(-10**3, 10**3), st.integers(0, 10**4))
    def test_sign_sqrt_sum(self, x, y, d):
        s = sign_sqrt_sum(x, y, d)
        ref = sympy.sign(sympy.Integer(x) + sympy.Integer(y) * sympy.sqrt(d))
        assert s == int(ref)


class TestRefine:
    def test_fifth_root_below_bound(self):
        d = refine(NthRoot(Fraction(7), 5), lambda v: True if v.lo > Fraction("1.4758") else False if v.hi < Fraction("1.4758") else None)
        assert d.value is False and d.bits == 128

    def test_rational_not_integer(self):
        d = refine(Fraction(2, 3), lambda v: certified_floor(v).integral)
        assert d.value is False

    def test_polyroot_separates_from_decimal(self):
        target = Fraction("1.41421356")
        r = PolyRoot(ZPoly([-2, 0, 1]), 1, 2)
        d = refine(r, lambda v: None if encloses(v, target) else False)
        assert d.value is False

    def test_exhaustion_is_reported(self):
        with pytest.raises(PrecisionExhausted):
            refine(Fraction(1, 3), lambda v: None, schedule=[64, 128])


class TestParse:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("2/3", Fraction(2, 3)),
            ("root(3, 3)", NthRoot(Fraction(3), 3)),
            ("root(2,9/4)", Fraction(3, 2)),
            ("quad(-1,1,2,1)", QuadIrr(-1, 1, 2, 1)),
            ("quad(1,1,4,1)", Fraction(3)),
        ],
    )
    def test_forms(self, text, expected):
        assert parse_expr(text) == expected

    def test_garbage(self):
        with pytest.raises(ValueError):
            parse_expr("sqrt 2")


# -- soundness and exactness -------------------------------------------------

rats = st.fractions(min_value=Fraction(-50), max_value=Fraction(50), max_denominator=10**6)


@settings(max_examples=300)
@given(rats, rats, st.sampled_from(["+", "-", "*", "/"]), st.sampled_from([53, 64, 200]))
def test_interval_ops_enclose_exact(a, b, op, bits):
    if op == "/" and b == 0:
        return
    x, y = loose(CertifiedReal.from_rational(a, bits)), loose(CertifiedReal.from_rational(b, bits))
    ops = {"+": (x + y, a + b), "-": (x - y, a - b), "*": (x * y, a * b), "/": (x / y if b else None, a / b if b else None)}
    v, exact = ops[op]
    assert encloses(v, exact)


def test_random_chains_soundness_and_width():
    rng = random.Random(3)
    bits = 128
    for _ in range(200):
        exact = Fraction(rng.randint(1, 999), rng.randint(1, 999))
        v = loose(CertifiedReal.from_rational(exact, bits))
        peak = abs(exact)
        k = rng.randint(1, 100)
        for _ in range(k):
            c = Fraction(rng.randint(1, 99), rng.randint(1, 99))
            if rng.random() < 0.5:
                v, exact = v + c, exact + c
            else:
                v, exact = v * c, exact * c
            if abs(exact) > 10**6:
                v, exact = v / exact.numerator, exact / exact.numerator
            peak = max(peak, abs(exact))
        assert encloses(v, exact)
        assert to_fraction(v.width) <= Fraction(2) ** (k + 2 - bits) * max(peak, 1) * 4


@given(rats.filter(lambda r: r != 0), st.integers(-6, 6))
def test_exact_integer_powers_stay_exact(a, n):
    v = pow_int(CertifiedReal.from_rational(a, 64), n)
    assert v.exact == a**n


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(100), max_denominator=1000), st.integers(-5, 5), st.integers(1, 6))
def test_pow_rational_encloses(a, p, q):
    v = pow_rational(loose(CertifiedReal.from_rational(a, 96)), p, q)
    assert to_fraction(v.lo) ** q <= a**p <= to_fraction(v.hi) ** q
