from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fexpansions.backforth import (
    OracleExhausted,
    back_and_forth,
    back_and_forth_multi,
    calkin_wilf,
    decode_tail,
    delta,
    encode_minpoly,
    eta,
    extend_to_pwl,
    oracle_by_name,
    oracle_dyadics,
    oracle_Q1d,
    oracle_quadirr,
    oracle_rationals,
    DenseOracle,
)
from fexpansions.algver import ZPoly
from fexpansions.cfseq import Quotients, Status, classify_terminal
from fexpansions.chorus import ChorusConjugate
from fexpansions.engine import euclid_cf, expand
from fexpansions.realkernel import QuadIrr


class TestOracles:
    def test_calkin_wilf_start(self):
        it = calkin_wilf()
        got = [next(it) for _ in range(7)]
        assert got == [Fraction(1), Fraction(1, 2), Fraction(2), Fraction(1, 3), Fraction(3, 2), Fraction(2, 3), Fraction(3)]

    def test_rationals_cover_small_denominators(self):
        seen = set(oracle_rationals().first(2000))
        want = {Fraction(p, q) for q in range(2, 12) for p in range(1, q)}
        assert want <= seen

    def test_no_repeats(self):
        for o in (oracle_rationals(), oracle_dyadics(), oracle_quadirr()):
            xs = o.first(300)
            assert len(set(xs)) == 300
            assert all(0 < x and x < 1 for x in xs)

    def test_q1d_partition(self):
        for d in (1, 2, 3):
            for q in oracle_Q1d(d).first(50):
                assert classify_terminal(euclid_cf(q)) == d

    def test_by_name(self):
        assert oracle_by_name("q1d4").name == "Q1d(4)"
        with pytest.raises(ValueError):
            oracle_by_name("reals")

    def test_exhausted(self):
        o = DenseOracle("three", lambda: iter([Fraction(1, 2), Fraction(1, 3)]))
        with pytest.raises(OracleExhausted):
            o.enumerate(2)


class TestStages:
    def test_first_stage_pairs_heads(self):
        iso = back_and_forth(oracle_rationals(), oracle_dyadics(), 1)
        assert iso.pairs == [(Fraction(1, 2), Fraction(1, 2))]

    @pytest.mark.parametrize("names", [("rationals", "dyadics"), ("rationals", "quadirr"), ("q1d1", "q1d2")])
    def test_order_preserving(self, names):
        A, B = (oracle_by_name(n) for n in names)
        iso = back_and_forth(A, B, 40)
        assert iso.order_preserving()
        assert len(set(iso.domain())) == 40 and len(set(iso.image())) == 40

    def test_both_sides_fed(self):
        A, B = oracle_rationals(), oracle_dyadics()
        iso = back_and_forth(A, B, 41)
        assert set(A.first(21)) <= set(iso.domain())
        assert set(B.first(20)) <= set(iso.image())

    def test_alternation(self):
        A, B = oracle_rationals(), oracle_dyadics()
        iso = back_and_forth(A, B, 6)
        # stage 2 pulls the first unmatched b, stage 3 the first unmatched a
        assert iso.pairs[1][1] == B.first(2)[1]
        assert iso.pairs[2][0] == [a for a in A.first(10) if a not in iso.domain()[:2]][0]

    def test_deterministic(self):
        a = back_and_forth(oracle_rationals(), oracle_quadirr(), 30).to_tsv()
        b = back_and_forth(oracle_rationals(), oracle_quadirr(), 30).to_tsv()
        assert a == b and a.startswith("stage\ta\tb\n")

    def test_stages_positive(self):
        with pytest.raises(ValueError):
            back_and_forth(oracle_rationals(), oracle_dyadics(), 0)

    def test_multi_pairs_stay_in_class(self):
        pairs = [(oracle_Q1d(1), oracle_Q1d(2)), (oracle_Q1d(2), oracle_Q1d(1))]
        iso, owner = back_and_forth_multi(pairs, 24)
        assert iso.order_preserving()
        for (a, b), i in zip(iso.pairs, owner):
            da, db = classify_terminal(euclid_cf(a)), classify_terminal(euclid_cf(b))
            assert (da, db) == ((1, 2) if i == 0 else (2, 1))


class TestExtension:
    def test_pwl_through_pairs(self):
        iso = back_and_forth(oracle_rationals(), oracle_dyadics(), 25)
        g = extend_to_pwl(iso)
        for a, b in iso.pairs:
            assert g(a) == b

    def test_conjugate_expansion_equals_partner_cf(self):
        iso = back_and_forth(oracle_Q1d(1), oracle_Q1d(2), 20)
        f = ChorusConjugate(extend_to_pwl(iso))
        for a, b in iso.pairs:
            q = expand(f, a, 4096).quotients
            assert q == euclid_cf(b)
            assert classify_terminal(q) == 2

    def test_irrational_handles_separated(self):
        iso = back_and_forth(oracle_rationals(), oracle_quadirr(), 15)
        g = extend_to_pwl(iso)
        xs = [u for u, _ in g.nodes]
        assert xs == sorted(xs)


class TestEncoding:
    def test_eta_table(self):
        assert [eta(k) for k in (0, 1, -1, 2, -2, 3)] == [1, 2, 3, 4, 5, 6]

    @given(st.integers(-10**6, 10**6))
    def test_delta_inverts_eta(self, k):
        assert delta(eta(k)) == k

    @given(st.integers(1, 10**6))
    def test_eta_inverts_delta(self, n):
        assert eta(delta(n)) == n

    def test_golden_polynomial(self):
        # t^2 + 2t - 1 encodes as 3, 4, 2, 3
        assert encode_minpoly([-1, 2, 1]) == (3, 4, 2, 3)

    def test_rejects_imprimitive(self):
        with pytest.raises(ValueError):
            encode_minpoly([2, 4])

    @given(st.lists(st.integers(-50, 50), min_size=2, max_size=6).filter(lambda c: c[-1] != 0))
    def test_roundtrip(self, cs):
        from math import gcd

        g = gcd(*cs)
        cs = [c // g for c in cs]
        code = encode_minpoly(cs)
        q = Quotients(0, (7, 1) + code, Status.TERMINATED)
        assert decode_tail(q) == ZPoly(cs)

    def test_decode_needs_enough_entries(self):
        with pytest.raises(ValueError):
            decode_tail(Quotients(0, (2, 5), Status.TERMINATED))
