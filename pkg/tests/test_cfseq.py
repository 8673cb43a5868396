import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fexpansions.cfseq import (
    Order,
    PeriodicSpec,
    Quotients,
    SequenceSyntaxError,
    SequenceValidityError,
    Status,
    altlex_compare,
    classify_terminal,
    format_quotients,
    parse,
    prefix_interval,
)
from fexpansions.engine import cf_value


def T(head, *tail):
    return Quotients(head, tail)


def P(head, *tail):
    return Quotients(head, tail, Status.TRUNCATED)


class TestParseFormat:
    def test_terminated(self):
        assert parse("[0; 2, 16]") == T(0, 2, 16)

    def test_integer(self):
        q = parse("[5]")
        assert q.head == 5 and q.tail == () and q.terminated

    def test_prefix(self):
        assert parse("[0; 1, 1, 2, ...]") == P(0, 1, 1, 2)

    def test_negative_head(self):
        assert parse("[-3; 1, 2]") == T(-3, 1, 2)

    @pytest.mark.parametrize(
        "q, text",
        [
            (T(0, 3, 1098, 2892, 410, 256), "[0; 3, 1098, 2892, 410, 256]"),
            (T(1), "[1]"),
            (P(0, 1, 1), "[0; 1, 1, ...]"),
        ],
    )
    def test_format(self, q, text):
        assert format_quotients(q) == text
        assert parse(text) == q

    @pytest.mark.parametrize("bad", ["", "0; 2", "[0; 2,,3]", "[0; x]", "[0 2]"])
    def test_syntax_errors(self, bad):
        with pytest.raises(SequenceSyntaxError):
            parse(bad)

    @pytest.mark.parametrize("bad", ["[0; 0, 2]", "[0; 2, 1]", "[1; -2]"])
    def test_validity_errors(self, bad):
        with pytest.raises(SequenceValidityError):
            parse(bad)

    def test_truncated_may_end_in_one(self):
        assert parse("[0; 2, 1, ...]").tail == (2, 1)


class TestAltlex:
    def test_odd_position_reversed(self):
        assert altlex_compare(T(0, 2, 16), P(0, 1, 1, 2)) is Order.LESS

    def test_termination_counts_as_infinity(self):
        assert altlex_compare(T(1), T(1, 2)) is Order.LESS

    def test_undecidable_prefixes(self):
        assert altlex_compare(P(0, 1), P(0, 1)) is Order.UNKNOWN

    def test_equal(self):
        assert altlex_compare(T(0, 2, 16), T(0, 2, 16)) is Order.EQUAL

    def test_head_decides(self):
        assert altlex_compare(T(-1, 5), P(0, 1)) is Order.LESS

    def test_prefix_vs_longer_terminated(self):
        # [0;2,...] could still be [0;2] itself or anything beyond it
        assert altlex_compare(P(0, 2), T(0, 2, 5)) is Order.UNKNOWN


terminated = st.builds(
    lambda h, t: Quotients(h, tuple(t[:-1]) + ((t[-1] + 1,) if t else ())),
    st.integers(-2, 2),
    st.lists(st.integers(1, 4), max_size=5),
)


@given(terminated, terminated)
def test_altlex_matches_value_order(a, b):
    c = altlex_compare(a, b)
    va, vb = cf_value(a), cf_value(b)
    assert c.value == (va > vb) - (va < vb)


@given(terminated)
def test_reflexive(q):
    assert altlex_compare(q, q) is Order.EQUAL


def test_random_triples_total_order():
    rng = random.Random(7)

    def draw():
        tail = [rng.randint(1, 3) for _ in range(rng.randint(0, 4))]
        if tail:
            tail[-1] += 1
        return Quotients(rng.randint(-1, 1), tuple(tail))

    for _ in range(10_000):
        a, b, c = draw(), draw(), draw()
        ab, ba, bc, ac = (altlex_compare(*p) for p in ((a, b), (b, a), (b, c), (a, c)))
        assert ab.value == -ba.value
        if ab.value <= 0 and bc.value <= 0:
            assert ac.value <= 0


class TestPrefixInterval:
    def test_odd_length_right_closed(self):
        iv = prefix_interval(T(0, 2))
        assert (iv.lo.terms, iv.hi.terms) == ((0, 3), (0, 2))
        assert not iv.lo_closed and iv.hi_closed

    def test_even_length_left_closed(self):
        iv = prefix_interval(T(1))
        assert (iv.lo.terms, iv.hi.terms) == ((1,), (2,))
        assert iv.lo_closed and not iv.hi_closed

    @pytest.mark.parametrize("prefix", [P(0, 2), P(1), P(0, 1, 3), P(2, 1, 1)])
    def test_all_one_step_extensions_inside(self, prefix):
        iv = prefix_interval(prefix)
        if not prefix.tail or prefix.tail[-1] >= 2:
            assert iv.contains(Quotients(prefix.head, prefix.tail))
        for k in range(1, 51):
            ext = Quotients(prefix.head, prefix.tail + (k,), Status.TRUNCATED)
            if k >= 2:
                assert iv.contains(Quotients(prefix.head, prefix.tail + (k,)))
            for j in range(2, 5):
                assert iv.contains(Quotients(ext.head, ext.tail + (j,)))

    def test_neighbour_outside(self):
        iv = prefix_interval(T(0, 2))
        assert iv.contains(T(0, 3)) is False
        assert iv.contains(T(0, 1, 2)) is False


class TestClassify:
    @pytest.mark.parametrize(
        "q, d",
        [(T(0, 2, 16), 15), (T(0, 3, 1098, 2892, 410, 256), 255), (T(1, 2), None), (P(0, 2), None), (T(0), None)],
    )
    def test_classes(self, q, d):
        assert classify_terminal(q) == d


class TestPeriodicSpec:
    def test_canonical_rotation(self):
        s = PeriodicSpec(1, (1, 1, 2), (1, 1, 1, 2))
        assert s.preperiod == () and s.period == (1, 1, 2, 1)
        assert s.prefix(11).tail == (1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2)

    def test_primitive_period(self):
        assert PeriodicSpec(0, (), (2, 2, 2)).period == (2,)

    def test_equal_specs_compare_equal(self):
        assert PeriodicSpec(0, (3,), (1, 3)) == PeriodicSpec(0, (), (3, 1))

    def test_rejects_empty_period(self):
        with pytest.raises(SequenceValidityError):
            PeriodicSpec(0, (1,), ())
