"""End-to-end reproduction scenarios, one per acceptance claim.

Each scenario returns a ClaimResult holding the computed and expected
values side by side.  The CLI ``repro`` subcommand and the acceptance tests
both run these functions.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import algver, backforth, cfseq, chorus, engine, minkowski, powerfam
from .cfseq import Order, PeriodicSpec, Quotients, altlex_compare
from .engine import Converged, Power, Reciprocal, eval_infinite, expand
from .realkernel import CertifiedReal, NthRoot, QuadIrr, eval_expr, to_fraction

DEFAULT_SEED = 20240917


@dataclass
class ClaimResult:
    claim_id: str
    number: int
    title: str
    passed: bool = True
    rows: list[tuple[str, str, str, bool]] = field(default_factory=list)
    seconds: float = 0.0
    limit: float = 0.0

    def check(self, label: str, computed, expected, ok: bool):
        self.rows.append((label, str(computed), str(expected), bool(ok)))
        self.passed = self.passed and bool(ok)

    @property
    def within_limit(self) -> bool:
        return self.seconds < self.limit

    @property
    def verdict(self) -> bool:
        return self.passed and self.within_limit

    def report(self, timing: bool = False) -> str:
        lines = [f"{'PASS' if self.verdict else 'FAIL'} [{self.number}] {self.claim_id}: {self.title}"]
        for label, comp, exp, ok in self.rows:
            lines.append(f"  {'ok ' if ok else 'BAD'} {label}: computed {comp}; expected {exp}")
        if timing or not self.within_limit:
            lines.append(f"  time {self.seconds:.2f} s (limit {self.limit:g} s)")
        return "\n".join(lines)


def _near(v: CertifiedReal, target: Fraction, tol: Fraction) -> bool:
    return to_fraction(v.lo) >= target - tol and to_fraction(v.hi) <= target + tol


def _fmt(v: CertifiedReal, digits: int = 12) -> str:
    return f"[{float(v.lo):.{digits}g}, {float(v.hi):.{digits}g}]"


# ---------------------------------------------------------------------------
# Expansions


def _exact_expansion(res: ClaimResult, x: Fraction, expected: str):
    out = expand(Power(Fraction(1, 2)), x, 64)
    want = cfseq.parse(expected)
    res.check(f"E_(1/2)({x})", out.quotients, want, out.quotients == want)
    res.check("outcome", out.outcome.value, "terminated", out.terminated)
    res.check("exact steps", all(s.exact for s in out.steps), True, all(s.exact for s in out.steps))


def claim_root_two_thirds(res: ClaimResult, seed: int):
    _exact_expansion(res, Fraction(2, 3), "[0; 2, 16]")


def claim_root_27_47(res: ClaimResult, seed: int):
    _exact_expansion(res, Fraction(27, 47), "[0; 3, 1098, 2892, 410, 256]")


THREE_QUARTERS = (1, 1, 2, 8, 5, 1, 3, 3, 14, 321, 2, 300, 1, 13, 2, 6, 1, 1, 2)
CBRT3 = (1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 3, 1, 1, 1, 1, 3, 1, 2, 1, 1, 7, 23, 1)


def claim_root_three_quarters(res: ClaimResult, seed: int):
    out = expand(Power(Fraction(1, 2)), Fraction(3, 4), len(THREE_QUARTERS))
    got = out.quotients.tail
    res.check("prefix of E_(1/2)(3/4)", list(got), list(THREE_QUARTERS), got == THREE_QUARTERS and out.quotients.head == 0)
    res.check("exact steps", all(s.exact for s in out.steps), True, all(s.exact for s in out.steps))


def claim_cbrt3_prefix(res: ClaimResult, seed: int):
    out = expand(Power(Fraction(3, 2)), NthRoot(Fraction(3), 3), len(CBRT3))
    got = out.quotients.tail
    res.check("prefix of E_(3/2)(cbrt 3)", list(got), list(CBRT3), got == CBRT3 and out.quotients.head == 1)
    res.check("outcome", out.outcome.value, "reached_max_terms", out.outcome is engine.Outcome.REACHED_MAX_TERMS)
    certified = len(out.steps) == len(CBRT3) + 1 and all(not s.exact and s.precision_bits > 0 for s in out.steps)
    bits = max(s.precision_bits for s in out.steps)
    res.check("every floor certified (max bits)", bits, "interval path", certified)
    period = engine.detect_period(out.quotients)
    res.check("period candidate", period, None, period is None)


def claim_cycle_value(res: ClaimResult, seed: int):
    tol = Fraction(5, 10**8)
    spec = PeriodicSpec(1, (1, 1, 2), (1, 1, 1, 2))
    out = eval_infinite(Power(Fraction(3, 2)), spec, 200, Fraction(1, 10**12))
    conv = isinstance(out, Converged)
    res.check("V_(3/2) outcome", type(out).__name__, "Converged", conv)
    if conv:
        v = out.value
        res.check("V_(3/2) value", _fmt(v), "1.44225029", _near(v, Fraction("1.44225029"), tol))
    c = eval_expr(NthRoot(Fraction(3), 3), 96)
    res.check("cbrt 3", _fmt(c), "1.44224957", _near(c, Fraction("1.44224957"), tol))
    if conv:
        res.check("enclosures disjoint", v.disjoint(c), True, v.disjoint(c))


# ---------------------------------------------------------------------------
# Power family


def claim_alpha0(res: ClaimResult, seed: int):
    tol = Fraction(1, 10**6)
    target = Fraction("4.1410415")
    a = powerfam.alpha0_by_equation(96)
    b = powerfam.alpha0_by_stability(64)
    res.check("threshold equation root", _fmt(a, 14), "4.1410415", _near(a, target, tol))
    res.check("stability bisection", _fmt(b, 14), "4.1410415", _near(b, target, tol))
    res.check("enclosures intersect", a.intersect(b) is not None, True, a.intersect(b) is not None)


def claim_basin(res: ClaimResult, seed: int):
    tol = Fraction(1, 10**5)
    lo, hi = powerfam.ones_basin(5)
    res.check("basin left end", _fmt(lo), "1.06377", _near(lo, Fraction("1.06377"), tol))
    res.check("basin right end", _fmt(hi), "1.73411", _near(hi, Fraction("1.73411"), tol))
    x = NthRoot(Fraction(7), 5)
    xv = eval_expr(x, 96)
    inside = lo.hi < xv.lo and xv.hi < hi.lo
    res.check("fifth root of 7 inside", _fmt(xv), "inside the basin", inside)
    t = powerfam.ones_threshold(x)
    res.check("threshold alpha(5th root of 7)", _fmt(t), "4.26159", _near(t, Fraction("4.26159"), tol))


def claim_double_iterate(res: ClaimResult, seed: int):
    for a in (1, 2, 3, 4):
        fps = powerfam.double_fixed_points(a)
        res.check(f"alpha={a} fixed points", len(fps), 1, len(fps) == 1)
    for a in (Fraction(9, 2), 5, 8):
        fps = powerfam.double_fixed_points(a)
        kinds = [f.classification.value for f in fps]
        want = ["attracting", "repelling", "attracting"]
        res.check(f"alpha={a} fixed points", ",".join(kinds), ",".join(want), kinds == want)


def claim_no_bifurcation(res: ClaimResult, seed: int):
    for n in (2, 3, 4):
        rep = powerfam.no_bifurcation_check(n, 100)
        res.check(f"n={n} sign changes", len(rep.sign_changes), 0, rep.sign_definite)
    rep = powerfam.no_bifurcation_check(1, 100)
    ok = len(rep.sign_changes) == 1
    where = rep.sign_changes[0] if ok else None
    if ok:
        a, b = where
        ok = a <= Fraction("4.1410416") and b >= Fraction("4.1410415")
        where = f"[{float(a):.10g}, {float(b):.10g}]"
    res.check("n=1 sign change", where, "one change at 4.1410415", ok)


def claim_monotonicity(res: ClaimResult, seed: int):
    x = Fraction(1, 2)
    grid = [Fraction(20 + k, 10) for k in range(6)]
    rows = powerfam.alpha_monotonicity_scan(x, grid, terms=60)
    dirs = [r.versus_previous.name.lower() for r in rows[1:]]
    flips = dirs[:2] == ["less", "less"] and dirs[-2:] == ["greater", "greater"]
    res.check("scan 2.0..2.5", ",".join(dirs), "increasing then decreasing", flips)
    lo, hi = powerfam.locate_monotonicity_switch(x, Fraction(22, 10), Fraction(23, 10), Fraction(1, 10**4))
    mid = (lo + hi) / 2
    ok = abs(mid - Fraction("2.24228")) + (hi - lo) / 2 < Fraction(1, 10**3)
    res.check("switch alpha*", f"[{float(lo):.7f}, {float(hi):.7f}]", "2.24228", ok)


def claim_deg93(res: ClaimResult, seed: int):
    rep = algver.verify_deg93(128)
    res.check("bundled polynomial divides eliminant", rep.divides, True, rep.divides)
    res.check("eliminant degree", rep.eliminant_degree, ">= 93", rep.eliminant_degree >= 93)
    res.check("real roots", rep.real_roots, 7, rep.real_roots == 7)
    res.check("cycle root index", rep.root_index, 4, rep.root_index == 4)
    res.check("polynomial vanishes on the root enclosure", rep.contains_zero, True, rep.contains_zero)
    res.check("cycle root", _fmt(rep.root, 15), "1.44225029", _near(rep.root, Fraction("1.44225029"), Fraction(5, 10**8)))


# ---------------------------------------------------------------------------
# Property suite


def _rand_rational(rng: random.Random, lo: int, hi: int, den: int = 10**6) -> Fraction:
    d = rng.randint(1, den)
    return Fraction(rng.randint(lo * d, hi * d), d)


def _rand_unit(rng: random.Random, den: int = 10**4) -> Fraction:
    d = rng.randint(2, den)
    return Fraction(rng.randint(1, d - 1), d)


def random_pwl(rng: random.Random, max_nodes: int = 4) -> chorus.PWLHomeo:
    k = rng.randint(0, max_nodes)
    us = set()
    vs = set()
    while len(us) < k:
        us.add(_rand_unit(rng, 97))
    while len(vs) < k:
        vs.add(_rand_unit(rng, 97))
    return chorus.PWLHomeo(tuple(zip(sorted(us), sorted(vs))))


def random_quadirr(rng: random.Random) -> QuadIrr:
    while True:
        D = rng.randint(2, 60)
        if math.isqrt(D) ** 2 == D:
            continue
        q = rng.choice([-1, 1]) * rng.randint(1, 9)
        try:
            return QuadIrr(rng.randint(-20, 20), q, D, rng.randint(1, 12))
        except Exception:
            continue


def _random_quotients(rng: random.Random) -> Quotients:
    n = rng.randint(0, 4)
    tail = [rng.randint(1, 3) for _ in range(n)]
    if tail and tail[-1] == 1:
        tail[-1] = 2
    return Quotients(rng.randint(-1, 1), tuple(tail))


def property_roundtrip(rng: random.Random, n: int = 1000) -> tuple[bool, str]:
    r = Reciprocal()
    for _ in range(n):
        x = _rand_rational(rng, -50, 50)
        q = expand(r, x, 10**4).quotients
        v = engine.eval_finite(r, q)
        if v.exact != x:
            return False, f"roundtrip failed at {x}"
    return True, f"{n} rationals"


def property_conjugacy(rng: random.Random, n: int = 100) -> tuple[bool, str]:
    for _ in range(n):
        g = random_pwl(rng)
        x = _rand_rational(rng, -5, 5, 10**3)
        step = expand(chorus.ChorusConjugate(g), x, 10**4)
        direct = engine.euclid_cf(chorus.gbar(g, x))
        if not step.terminated or step.quotients != direct:
            return False, f"E_f_g differs from E_r o gbar at g={g}, x={x}"
    return True, f"{n} (g, x) pairs"


def property_recovery(rng: random.Random, n: int = 20, samples: int = 10) -> tuple[bool, str]:
    for _ in range(n):
        g = random_pwl(rng)
        xs = [_rand_unit(rng, 500) for _ in range(samples)]
        got = chorus.recover_g(chorus.ChorusConjugate(g), xs)
        if any(y != g(x) for x, y in got):
            return False, f"recovery failed for g={g}"
    return True, f"{n} maps x {samples} samples"


def property_fquestion(rng: random.Random, n: int = 200) -> tuple[bool, str]:
    f = minkowski.QuestionMarkConjugate()
    for _ in range(n):
        x = _rand_rational(rng, -3, 3, 10**3)
        if not expand(f, x, 10**4).terminated:
            return False, f"no termination at {x}"
    for _ in range(n):
        x = random_quadirr(rng)
        if not expand(f, x, 10**4).terminated:
            return False, f"no termination at {x}"
    return True, f"{n} rationals, {n} quadratic irrationals"


def property_back_and_forth(stages: int = 40) -> tuple[bool, str]:
    names = sorted(backforth.BUILTIN_ORACLES)
    k = (stages + 1) // 2  # forth pulls, each taking the first unmatched element
    for a, b in itertools.product(names, repeat=2):
        A, B = backforth.oracle_by_name(a), backforth.oracle_by_name(b)
        iso = backforth.back_and_forth(A, B, stages)
        if not iso.order_preserving():
            return False, f"{a}->{b} not order-preserving"
        dom, img = set(iso.domain()), set(iso.image())
        if not all(e in dom for e in A.first(k)) or not all(e in img for e in B.first(k)):
            return False, f"{a}->{b} misses one of the first {k} elements"
    return True, f"{len(names) ** 2} oracle pairs, {stages} stages"


def property_encoding(rng: random.Random, n: int = 100) -> tuple[bool, str]:
    for k in range(-10**4, 10**4 + 1):
        if backforth.delta(backforth.eta(k)) != k:
            return False, f"delta(eta({k})) != {k}"
    for m in range(1, 2 * 10**4 + 2):
        if backforth.eta(backforth.delta(m)) != m:
            return False, f"eta(delta({m})) != {m}"
    for _ in range(n):
        d = rng.randint(1, 6)
        cs = [rng.randint(-30, 30) for _ in range(d)] + [rng.choice([-1, 1]) * rng.randint(1, 30)]
        gcd = math.gcd(*cs)
        cs = [c // gcd for c in cs]
        code = backforth.encode_minpoly(cs)
        back = backforth.decode_tail(Quotients(0, code))
        if list(back.coeffs) != cs:
            return False, f"decode(encode({cs})) = {back}"
    return True, f"|k| <= 10^4 and {n} polynomials"


def property_altlex(rng: random.Random, n: int = 10**4) -> tuple[bool, str]:
    sign = {Order.LESS: -1, Order.EQUAL: 0, Order.GREATER: 1}
    for _ in range(n):
        a, b, c = (_random_quotients(rng) for _ in range(3))
        ab, ba = altlex_compare(a, b), altlex_compare(b, a)
        if Order.UNKNOWN in (ab, ba) or sign[ab] != -sign[ba]:
            return False, f"antisymmetry fails for {a}, {b}"
        if (ab is Order.EQUAL) != (a == b):
            return False, f"equality fails for {a}, {b}"
        bc, ac = altlex_compare(b, c), altlex_compare(a, c)
        if sign[ab] <= 0 and sign[bc] <= 0 and sign[ac] > 0:
            return False, f"transitivity fails for {a}, {b}, {c}"
        # for the reciprocal, alt-lex order is the order of the values
        va, vb = engine.cf_value(a), engine.cf_value(b)
        if sign[ab] != (va > vb) - (va < vb):
            return False, f"order of values differs for {a}, {b}"
    return True, f"{n} triples"


PROPERTIES: list[tuple[str, Callable[[random.Random], tuple[bool, str]]]] = [
    ("(a) reciprocal roundtrip", property_roundtrip),
    ("(b) conjugacy E_f_g = E_r o gbar", property_conjugacy),
    ("(c) recovery of g", property_recovery),
    ("(d) f_? termination", property_fquestion),
    ("(e) back-and-forth", lambda rng: property_back_and_forth()),
    ("(f) eta/delta and encode/decode", property_encoding),
    ("(g) alt-lex total order", property_altlex),
]


def claim_properties(res: ClaimResult, seed: int):
    for label, fn in PROPERTIES:
        ok, detail = fn(random.Random(f"{seed}:{label}"))
        res.check(label, detail, "all hold", ok)


def claim_patched_power(res: ClaimResult, seed: int):
    patched = powerfam.PatchedPower()
    f5 = Power(5)
    moved = patched.f_exact(Fraction(13, 10)) != Fraction(13, 10) ** -5
    res.check("patch changes f on its interval", moved, True, moved)
    inside = [Fraction(1) + Fraction(k, 26) for k in range(2, 19)]
    inside = [x for x in inside if patched.left <= x <= patched.right][:25]
    rng = random.Random(seed)
    while len(inside) < 25:
        x = Fraction(rng.randint(1070, 1700), 1000)
        if x not in inside:
            inside.append(x)
    outside = [Fraction(k, 7) for k in range(1, 7)] + [Fraction(k, 3) for k in range(6, 16)]
    outside += [Fraction(1) + Fraction(k, 1000) for k in range(1, 10)]
    samples = inside + outside
    agree = sum(expand(patched, x, 30).quotients == expand(f5, x, 30).quotients for x in samples)
    res.check("agreement on samples", f"{agree}/{len(samples)}", f"{len(samples)}/{len(samples)}", agree == len(samples) == 50)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Claim:
    number: int
    claim_id: str
    title: str
    limit: float
    run: Callable[[ClaimResult, int], None]


CLAIMS: list[Claim] = [
    Claim(1, "root-two-thirds", "E_(1/2)(2/3) = [0; 2, 16]", 1, claim_root_two_thirds),
    Claim(2, "root-27-47", "E_(1/2)(27/47) = [0; 3, 1098, 2892, 410, 256]", 1, claim_root_27_47),
    Claim(3, "root-three-quarters", "19-term prefix of E_(1/2)(3/4)", 60, claim_root_three_quarters),
    Claim(4, "cbrt3-prefix", "27-term prefix of E_(3/2)(cbrt 3)", 120, claim_cbrt3_prefix),
    Claim(5, "cycle-value", "V_(3/2) of the period-4 pattern vs cbrt 3", 10, claim_cycle_value),
    Claim(6, "alpha0", "threshold alpha0 two ways", 10, claim_alpha0),
    Claim(7, "basin", "all-ones basin of f_5 and threshold of 5th root of 7", 60, claim_basin),
    Claim(8, "double-iterate", "fixed points of the double iterate", 30, claim_double_iterate),
    Claim(9, "no-bifurcation", "sign of the bifurcation form for n = 1..4", 10, claim_no_bifurcation),
    Claim(10, "monotonicity", "monotonicity switch of alpha -> E(1/2)", 120, claim_monotonicity),
    Claim(11, "deg93", "degree-93 polynomial of the 4-cycle", 600, claim_deg93),
    Claim(12, "properties", "property suite", 300, claim_properties),
    Claim(13, "patched-power", "patched f_5 expands like f_5", 10, claim_patched_power),
]

CLAIMS_BY_ID = {c.claim_id: c for c in CLAIMS}


def claim_lookup(key: str) -> Claim:
    if key.isdigit() and 1 <= int(key) <= len(CLAIMS):
        return CLAIMS[int(key) - 1]
    try:
        return CLAIMS_BY_ID[key]
    except KeyError:
        raise KeyError(f"unknown claim {key!r}; choose from {', '.join(CLAIMS_BY_ID)}")


def run_claim(key: str, seed: int = DEFAULT_SEED) -> ClaimResult:
    claim = claim_lookup(key)
    res = ClaimResult(claim.claim_id, claim.number, claim.title, limit=claim.limit)
    t0 = time.perf_counter()
    claim.run(res, seed)
    res.seconds = time.perf_counter() - t0
    return res
