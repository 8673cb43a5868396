import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fexpansions.cfseq import Order, PeriodicSpec, Quotients, Status, altlex_compare, parse
from fexpansions.chorus import ChorusConjugate, PWLHomeo
from fexpansions.engine import (
    Converged,
    Inconclusive,
    Oscillating,
    Outcome,
    Power,
    Reciprocal,
    cf_value,
    detect_period,
    euclid_cf,
    eval_finite,
    eval_infinite,
    expand,
    generator_sanity,
    roundtrip_check,
)
from fexpansions.realkernel import CertifiedReal, NthRoot, QuadIrr, to_fraction

HALF = Power(Fraction(1, 2))


class TestExpand:
    def test_two_thirds(self):
        r = expand(HALF, Fraction(2, 3), 50)
        assert r.quotients == parse("[0; 2, 16]") and r.outcome is Outcome.TERMINATED

    def test_27_47(self):
        r = expand(HALF, Fraction(27, 47), 50)
        assert r.quotients == parse("[0; 3, 1098, 2892, 410, 256]") and r.terminated

    def test_three_quarters_prefix(self):
        r = expand(HALF, Fraction(3, 4), 19)
        assert r.quotients == parse("[0; 1, 1, 2, 8, 5, 1, 3, 3, 14, 321, 2, 300, 1, 13, 2, 6, 1, 1, 2, ...]")
        assert r.outcome is Outcome.REACHED_MAX_TERMS
        assert all(s.exact for s in r.steps)

    def test_reciprocal_rational(self):
        assert expand(Reciprocal(), Fraction(27, 47), 50).quotients == parse("[0; 1, 1, 2, 1, 6]")

    def test_cube_root_prefix(self):
        r = expand(Power(Fraction(3, 2)), NthRoot(Fraction(3), 3), 27)
        assert r.quotients.tail == (1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 3, 1, 1, 1, 1, 3, 1, 2, 1, 1, 7, 23, 1)
        assert not any(s.exact for s in r.steps)

    def test_fifth_power_all_ones(self):
        r = expand(Power(5), NthRoot(Fraction(7), 5), 10)
        assert r.quotients == Quotients(1, (1,) * 10, Status.TRUNCATED)
        assert r.outcome is Outcome.REACHED_MAX_TERMS

    def test_quadratic_shortcut_reports_period(self):
        r = expand(Reciprocal(), QuadIrr(0, 1, 7, 1), 20)
        assert r.periodic == PeriodicSpec(2, (), (1, 1, 1, 4))
        assert r.quotients.tail[:8] == (1, 1, 1, 4, 1, 1, 1, 4)

    def test_interval_path_never_terminates(self):
        r = expand(Power(2), NthRoot(Fraction(2), 2), 15)
        assert r.outcome is not Outcome.TERMINATED

    def test_undecided_when_cap_is_tiny(self):
        r = expand(Power(Fraction(3, 2)), NthRoot(Fraction(3), 3), 400, bit_cap=128)
        assert r.outcome is Outcome.UNDECIDED_INTEGER
        assert r.undecided_at[1] == 128
        assert r.quotients.tail[:27] == (1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 3, 1, 1, 1, 1, 3, 1, 2, 1, 1, 7, 23, 1)

    def test_json_schema(self):
        d = expand(HALF, Fraction(2, 3), 5).as_dict()
        assert d["quotients"] == "[0; 2, 16]" and d["outcome"] == "terminated"
        assert d["steps"][0] == {"index": 0, "precision_bits": 0, "exact": True}

    def test_needs_positive_terms(self):
        with pytest.raises(ValueError):
            expand(HALF, Fraction(1, 2), 0)


class TestEval:
    def test_reciprocal_finite(self):
        assert eval_finite(Reciprocal(), parse("[0; 2, 16]")).exact == Fraction(16, 33)

    def test_half_power_finite(self):
        assert eval_finite(HALF, parse("[0; 2, 16]")).exact == Fraction(2, 3)

    def test_head_only(self):
        assert eval_finite(Power(5), parse("[7]")).exact == 7

    def test_prefix_rejected(self):
        with pytest.raises(ValueError):
            eval_finite(HALF, parse("[0; 2, ...]"))

    def test_period_four_pattern_converges(self):
        out = eval_infinite(Power(Fraction(3, 2)), PeriodicSpec(1, (1, 1, 2), (1, 1, 1, 2)), 200, Fraction(1, 10**12))
        assert isinstance(out, Converged)
        assert out.value.contains(Fraction("1.442250288845"))

    def test_golden_ratio(self):
        out = eval_infinite(Reciprocal(), PeriodicSpec(1, (), (1,)), 80, Fraction(1, 10**12))
        assert isinstance(out, Converged)
        assert out.value.contains(Fraction("1.6180339887498948"))

    def test_fifth_power_oscillates(self):
        out = eval_infinite(Power(5), PeriodicSpec(1, (), (1,)), 100, Fraction(1, 10**6))
        assert isinstance(out, Oscillating) and len(out.clusters) == 2
        lo, hi = out.clusters
        assert lo.contains(Fraction("1.0637700055")) and hi.contains(Fraction("1.7341102651"))

    def test_too_strict_is_inconclusive(self):
        out = eval_infinite(Power(5), PeriodicSpec(1, (), (1,)), 40, Fraction(1, 10**30))
        assert isinstance(out, Inconclusive)


class TestPeriod:
    def test_period_four(self):
        assert detect_period(Quotients(1, (1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2), Status.TRUNCATED)) == (0, 4)

    def test_constant(self):
        assert detect_period(Quotients(1, (1,) * 8, Status.TRUNCATED)) == (0, 1)

    def test_cube_root_has_no_candidate(self):
        q = expand(Power(Fraction(3, 2)), NthRoot(Fraction(3), 3), 27).quotients
        assert detect_period(q) is None

    def test_short_input(self):
        with pytest.raises(ValueError):
            detect_period(Quotients(0, (1, 2, 3), Status.TRUNCATED))


def _value_of_spec(spec: PeriodicSpec):
    """Exact value of a periodic continued fraction as a QuadIrr."""
    m00, m01, m10, m11 = 1, 0, 0, 1
    for a in spec.period:
        m00, m01, m10, m11 = m00 * a + m01, m00, m10 * a + m11, m10
    # y = (m00 y + m01) / (m10 y + m11)
    b = m11 - m00
    y = QuadIrr(-b, 1, b * b + 4 * m10 * m01, 2 * m10)
    for a in reversed(spec.preperiod):
        y = a + 1 / y
    return spec.head + 1 / y


@settings(max_examples=50, deadline=None)
@given(
    st.integers(-3, 3),
    st.lists(st.integers(1, 9), max_size=3),
    st.lists(st.integers(1, 9), min_size=1, max_size=4),
)
def test_period_recovered_from_value(head, pre, per):
    spec = PeriodicSpec(head, tuple(pre), tuple(per))
    x = _value_of_spec(spec)
    n = len(spec.preperiod) + 3 * len(spec.period) + 8
    res = expand(Reciprocal(), x, n)
    assert res.periodic == spec
    assert detect_period(res.quotients) == (len(spec.preperiod), len(spec.period))


class TestRoundtrip:
    def test_reciprocal_exact(self):
        assert roundtrip_check(Reciprocal(), Fraction(27, 47), 50).exact_zero

    def test_half_power_exact(self):
        assert roundtrip_check(HALF, Fraction(2, 3), 50).exact_zero

    def test_fifth_power_gap_large(self):
        rt = roundtrip_check(Power(5), NthRoot(Fraction(7), 5), 10)
        assert to_fraction(rt.gap.lo) > Fraction(1, 10)


rationals = st.fractions(min_value=-100, max_value=100, max_denominator=10**6)


@given(rationals)
def test_reciprocal_is_euclid_and_inverts(x):
    r = expand(Reciprocal(), x, 10**4)
    assert r.quotients == euclid_cf(x)
    assert eval_finite(Reciprocal(), r.quotients).exact == x


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=5, max_denominator=200), st.integers(2, 4))
def test_root_powers_stay_exact_on_rationals(x, m):
    r = expand(Power(Fraction(1, m)), x, 6)
    assert all(s.exact and s.precision_bits == 0 for s in r.steps)


class _IntervalOnly(Power):
    """Power(1/2) with the exact shortcuts disabled."""

    def phi_pair(self, n, d):
        return None

    def phi(self, y):
        return super().phi(CertifiedReal(y.lo, y.hi, y.bits))


def test_interval_engine_matches_exact_path():
    rng = random.Random(11)
    slow = _IntervalOnly(Fraction(1, 2))
    for _ in range(100):
        d = rng.randint(2, 500)
        x = Fraction(rng.randint(1, 3 * d), d)
        exact = expand(HALF, x, 12)
        approx = expand(slow, CertifiedReal.from_rational(x, 64).exact, 12, bit_cap=1 << 14)
        n = min(len(exact.quotients.terms), len(approx.quotients.terms))
        assert approx.quotients.terms[:n] == exact.quotients.terms[:n]
        if not exact.terminated:
            assert n == 13


def test_chorus_expansion_preserves_order():
    rng = random.Random(5)
    for _ in range(100):
        us = sorted({Fraction(rng.randint(1, 98), 99) for _ in range(2)})
        vs = sorted({Fraction(rng.randint(1, 96), 97) for _ in range(len(us))})
        if len(vs) != len(us):
            continue
        f = ChorusConjugate(PWLHomeo(tuple(zip(us, vs))))
        a, b = sorted(Fraction(rng.randint(-300, 300), rng.randint(1, 100)) for _ in range(2))
        c = altlex_compare(expand(f, a, 4096).quotients, expand(f, b, 4096).quotients)
        assert c in (Order.LESS, Order.EQUAL)
        assert (c is Order.EQUAL) == (a == b)


@pytest.mark.parametrize("g", [Reciprocal(), HALF, Power(Fraction(3, 2)), Power(5)])
def test_generators_are_consistent(g):
    assert generator_sanity(g, [Fraction(k, 7) for k in range(8, 40)])


def test_cf_value_inverts_euclid():
    for x in (Fraction(27, 47), Fraction(-13, 5), Fraction(7)):
        assert cf_value(euclid_cf(x)) == x
