"""Command-line front end: ``fexp <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 computation inconclusive,
3 reproduction failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from . import algver, backforth, cfseq, chorus, engine, minkowski, powerfam, realkernel, repro
from .engine import Converged, Inconclusive, Oscillating, Outcome
from .realkernel import CertifiedReal, DomainError, PrecisionExhausted

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Argument helpers


def parse_generator(text: str) -> engine.Generator:
    """reciprocal | power:A | chorus:NODES | chorus:@FILE | question-mark | patched-power"""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name == "reciprocal":
        return engine.Reciprocal()
    if name == "power":
        return engine.Power(Fraction(arg))
    if name == "chorus":
        return chorus.ChorusConjugate(_pwl(arg))
    if name == "question-mark":
        return minkowski.QuestionMarkConjugate()
    if name == "patched-power":
        return powerfam.PatchedPower()
    raise UsageError(f"unknown generator {text!r}")


def _pwl(text: str) -> chorus.PWLHomeo:
    if text.startswith("@"):
        return chorus.PWLHomeo.from_file(text[1:])
    return chorus.PWLHomeo.parse(text)


def _grid(text: str) -> list[Fraction]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("grid must be LO:HI:STEP")
    lo, hi, step = (Fraction(p) for p in parts)
    if step <= 0 or hi < lo:
        raise UsageError("grid needs STEP > 0 and HI >= LO")
    n = int((hi - lo) / step)
    return [lo + k * step for k in range(n + 1)]


def _pair(text: str) -> tuple[Fraction, Fraction]:
    lo, _, hi = text.partition(":")
    return Fraction(lo), Fraction(hi)


def _iv(v: CertifiedReal, digits: int = 20) -> str:
    if isinstance(v.exact, Fraction):
        return str(v.exact)
    return f"[{float(v.lo):.{digits}g}, {float(v.hi):.{digits}g}]"


def _iv_json(v: CertifiedReal) -> dict:
    d = {"lo": format(v.lo, ".25g"), "hi": format(v.hi, ".25g")}
    if isinstance(v.exact, Fraction):
        d["exact"] = str(v.exact)
    return d


def _emit(args, text: str):
    if getattr(args, "output", None):
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


# ---------------------------------------------------------------------------
# Handlers


def cmd_expand(args) -> int:
    g = parse_generator(args.f)
    x = realkernel.parse_expr(args.x)
    if args.roundtrip:
        rt = engine.roundtrip_check(g, x, args.terms)
        res = rt.expansion
        extra = {"value": _iv_json(rt.value), "gap": _iv_json(rt.gap)}
    else:
        res = engine.expand(g, x, args.terms, bit_cap=args.bit_cap)
        extra = {}
    if args.format == "json":
        _emit(args, _json({**res.as_dict(), **extra}))
    else:
        lines = [str(res.quotients)]
        if not res.terminated:
            lines.append(f"outcome: {res.outcome.value}")
        if extra:
            lines.append(f"V_f of the prefix: {_iv(rt.value)}")
            lines.append(f"gap: {_iv(rt.gap)}")
        _emit(args, "\n".join(lines))
    return EXIT_INCONCLUSIVE if res.outcome is Outcome.UNDECIDED_INTEGER else EXIT_OK


def cmd_eval(args) -> int:
    if args.x is not None:
        e = realkernel.parse_expr(args.x)
        v = realkernel.eval_expr(e, args.bits)
        fl = realkernel.certified_floor(v)
        out = {"enclosure": _iv_json(v), "floor": fl.value if fl.decided else None}
        if args.gt is not None:
            bound = Fraction(args.gt)
            dec = realkernel.refine(e, lambda iv: True if iv.lo > bound else False if iv.hi <= bound else None)
            out["greater_than"] = {"bound": str(bound), "value": dec.value, "bits": dec.bits}
        if args.format == "json":
            _emit(args, _json(out))
        else:
            lines = [_iv(v), f"floor: {out['floor'] if fl.decided else 'undecided'}"]
            if "greater_than" in out:
                lines.append(f"> {bound}: {dec.value} (decided at {dec.bits} bits)")
            _emit(args, "\n".join(lines))
        return EXIT_OK if fl.decided else EXIT_INCONCLUSIVE
    if args.f is None:
        raise UsageError("eval needs --x, or --f with --seq or --periodic")
    g = parse_generator(args.f)
    if args.seq is not None:
        v = engine.eval_finite(g, cfseq.parse(args.seq), args.bits)
        _emit(args, _json({"value": _iv_json(v)}) if args.format == "json" else _iv(v))
        return EXIT_OK
    if args.periodic is None:
        raise UsageError("eval with --f needs --seq or --periodic")
    head, pre, per = _periodic(args.periodic)
    spec = cfseq.PeriodicSpec(head, pre, per)
    out = engine.eval_infinite(g, spec, args.n_max, Fraction(args.tol), args.bits)
    if isinstance(out, Converged):
        data = {"outcome": "converged", "value": _iv_json(out.value)}
        text = f"converged {_iv(out.value, 15)}"
    elif isinstance(out, Oscillating):
        data = {"outcome": "oscillating", "clusters": [_iv_json(c) for c in out.clusters]}
        text = "oscillating " + " ".join(_iv(c, 15) for c in out.clusters)
    else:
        data = {"outcome": "inconclusive", "values": [_iv_json(c) for c in out.values]}
        text = "inconclusive"
    _emit(args, _json(data) if args.format == "json" else text)
    return EXIT_INCONCLUSIVE if isinstance(out, Inconclusive) else EXIT_OK


def _periodic(text: str) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    parts = text.split(";")
    if len(parts) != 3:
        raise UsageError("--periodic is HEAD;PRE;PERIOD, e.g. 1;1,1,2;1,1,1,2")
    nums = lambda s: tuple(int(a) for a in s.split(",") if a.strip())
    return int(parts[0]), nums(parts[1]), nums(parts[2])


def cmd_compare(args) -> int:
    out: dict = {}
    if args.a is not None and args.b is not None:
        a, b = cfseq.parse(args.a), cfseq.parse(args.b)
        out["order"] = cfseq.altlex_compare(a, b).name
        out["a"], out["b"] = cfseq.format_quotients(a), cfseq.format_quotients(b)
    elif (args.a is None) != (args.b is None):
        raise UsageError("--a and --b go together")
    if args.prefix is not None:
        iv = cfseq.prefix_interval(cfseq.parse(args.prefix))
        out["prefix_interval"] = {
            "lo": str(iv.lo),
            "lo_closed": iv.lo_closed,
            "hi": str(iv.hi),
            "hi_closed": iv.hi_closed,
        }
    if args.classify is not None:
        out["terminal_class"] = cfseq.classify_terminal(cfseq.parse(args.classify))
    if args.detect is not None:
        p = engine.detect_period(cfseq.parse(args.detect))
        out["period_candidate"] = None if p is None else {"preperiod": p[0], "period": p[1], "heuristic": True}
    if not out:
        raise UsageError("compare needs --a/--b, --prefix, --classify or --detect")
    if args.format == "json":
        _emit(args, _json(out))
    else:
        _emit(args, "\n".join(f"{k}: {v}" for k, v in out.items()))
    return EXIT_OK


def cmd_bifurcate(args) -> int:
    if args.check_n is not None:
        rep = powerfam.no_bifurcation_check(args.check_n, Fraction(args.alpha_max))
        data = {
            "n": rep.n,
            "alpha_max": str(rep.alpha_max),
            "sign_changes": [[float(a), float(b)] for a, b in rep.sign_changes],
            "sign_definite": rep.sign_definite,
        }
        _emit(args, _json(data) if args.format == "json" else "\n".join(f"{k}: {v}" for k, v in data.items()))
        return EXIT_OK
    if args.alpha is not None:
        alphas = [Fraction(a) for a in args.alpha.split(",")]
    elif args.grid is not None:
        alphas = _grid(args.grid)
    else:
        raise UsageError("bifurcate needs --alpha, --grid or --check-n")
    if args.format == "json":
        _emit(args, _json([powerfam.bifurcation_row(a, args.bits) for a in alphas]))
    else:
        _emit(args, powerfam.sweep_csv(alphas, args.bits).rstrip("\n"))
    return EXIT_OK


def cmd_alpha0(args) -> int:
    out = {}
    if args.method in ("equation", "both"):
        out["equation"] = powerfam.alpha0_by_equation(args.bits)
    if args.method in ("stability", "both"):
        out["stability"] = powerfam.alpha0_by_stability(args.bits)
    if args.format == "json":
        data = {k: _iv_json(v) for k, v in out.items()}
        if len(out) == 2:
            data["intersect"] = out["equation"].intersect(out["stability"]) is not None
        _emit(args, _json(data))
    else:
        _emit(args, "\n".join(f"{k}: {_iv(v)}" for k, v in out.items()))
    return EXIT_OK


def cmd_basin(args) -> int:
    alpha = Fraction(args.alpha)
    if args.method == "confinement":
        lo, hi = powerfam.basin_by_confinement(alpha, args.bits)
    else:
        lo, hi = powerfam.ones_basin(alpha, args.bits)
    data = {"alpha": str(alpha), "lo": _iv_json(lo), "hi": _iv_json(hi)}
    text = [f"basin({alpha}) = ({_iv(lo, 12)}, {_iv(hi, 12)})"]
    if args.x is not None:
        member = powerfam.in_ones_basin(Fraction(args.x), alpha, args.bits)
        data["member"] = member
        text.append(f"{args.x} in basin: {'undecided' if member is None else member}")
    if args.fixed_point:
        rep = powerfam.fixed_point_ones(alpha, args.bits)
        data["fixed_point"] = {"location": _iv_json(rep.location), "classification": rep.classification.value}
        text.append(f"fixed point {_iv(rep.location, 15)} {rep.classification.value}")
    _emit(args, _json(data) if args.format == "json" else "\n".join(text))
    return EXIT_INCONCLUSIVE if data.get("member", True) is None else EXIT_OK


def cmd_threshold(args) -> int:
    t = powerfam.ones_threshold(realkernel.parse_expr(args.x), args.bits)
    _emit(args, _json({"x": args.x, "alpha": _iv_json(t)}) if args.format == "json" else _iv(t, 15))
    return EXIT_OK


def cmd_monotonicity(args) -> int:
    x = realkernel.parse_expr(args.x)
    if args.locate is not None:
        lo, hi = _pair(args.locate)
        a, b = powerfam.locate_monotonicity_switch(x, lo, hi, Fraction(args.tol), args.terms)
        data = {"lo": str(a), "hi": str(b)}
        _emit(args, _json(data) if args.format == "json" else f"switch in [{float(a):.10g}, {float(b):.10g}]")
        return EXIT_OK
    if args.grid is None:
        raise UsageError("monotonicity needs --grid or --locate")
    rows = powerfam.alpha_monotonicity_scan(x, _grid(args.grid), args.terms)
    recs = [
        {
            "alpha": str(r.alpha),
            "quotients": str(r.quotients),
            "versus_previous": None if r.versus_previous is None else r.versus_previous.name,
        }
        for r in rows
    ]
    if args.format == "json":
        _emit(args, _json(recs))
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["alpha", "versus_previous", "quotients"], lineterminator="\n")
        w.writeheader()
        w.writerows(recs)
        _emit(args, buf.getvalue().rstrip("\n"))
    return EXIT_OK


def cmd_chorus(args) -> int:
    g = _pwl(args.g)
    op = args.op
    if op == "recover":
        xs = [Fraction(s) for s in args.samples.split(",")]
        pairs = chorus.recover_g(chorus.ChorusConjugate(g), xs)
        _emit(args, "\n".join(f"{x} {y}" for x, y in pairs))
        return EXIT_OK
    if op == "theorem1":
        if args.y is None:
            raise UsageError("theorem1 needs --y")
        h, res = chorus.theorem1_demo(args.x, args.y)
        _emit(args, f"g: {h}\n{res.quotients}")
        return EXIT_OK
    if args.x is None:
        raise UsageError(f"chorus --op {op} needs --x")
    if op == "expand":
        res = chorus.expand_conjugate(g, realkernel.parse_expr(args.x), args.terms)
        _emit(args, _json(res.as_dict()) if args.format == "json" else str(res.quotients))
        return EXIT_INCONCLUSIVE if res.outcome is Outcome.UNDECIDED_INTEGER else EXIT_OK
    fns: dict[str, Callable] = {
        "g": chorus.eval_g,
        "ginv": chorus.eval_g_inv,
        "gbar": chorus.gbar,
        "gbarinv": chorus.gbar_inv,
        "f": chorus.fg_eval,
        "phi": chorus.phig_eval,
    }
    _emit(args, str(fns[op](g, Fraction(args.x))))
    return EXIT_OK


def cmd_minkowski(args) -> int:
    if args.op == "inverse":
        _emit(args, str(minkowski.question_mark_inverse(Fraction(args.x))))
        return EXIT_OK
    x = realkernel.parse_expr(args.x)
    if args.op == "eval":
        v = minkowski.question_mark(x)
        _emit(args, f"{v.value}  ({v.input_class.value})")
    else:
        _emit(args, str(minkowski.expand_fquestion(x).quotients))
    return EXIT_OK


def cmd_backforth(args) -> int:
    A, B = backforth.oracle_by_name(args.a), backforth.oracle_by_name(args.b)
    iso = backforth.back_and_forth(A, B, args.stages)
    if args.emit_g:
        Path(args.emit_g).write_text(backforth.extend_to_pwl(iso).to_text())
    if args.format == "json":
        _emit(
            args,
            _json({"order_preserving": iso.order_preserving(), "pairs": [[s, str(a), str(b)] for s, a, b in iso.log]}),
        )
    else:
        _emit(args, iso.to_tsv().rstrip("\n"))
    return EXIT_OK


def cmd_encode(args) -> int:
    if args.eta is not None:
        _emit(args, str(backforth.eta(args.eta)))
        return EXIT_OK
    if args.poly is None:
        raise UsageError("encode needs --poly or --eta")
    coeffs = [int(t) for t in args.poly.replace(",", " ").split()]
    _emit(args, ",".join(str(c) for c in backforth.encode_minpoly(coeffs)))
    return EXIT_OK


def cmd_decode(args) -> int:
    if args.delta is not None:
        _emit(args, str(backforth.delta(args.delta)))
        return EXIT_OK
    if args.seq is None:
        raise UsageError("decode needs --seq or --delta")
    text = args.seq.strip()
    if "[" not in text:
        text = "[0; " + text + "]"
    _emit(args, str(backforth.decode_tail(cfseq.parse(text))))
    return EXIT_OK


def cmd_verify_deg93(args) -> int:
    if args.roots:
        p = algver.ZPoly.from_file(args.roots)
        lo = -float("inf") if args.lo is None else Fraction(args.lo)
        hi = float("inf") if args.hi is None else Fraction(args.hi)
        _emit(args, str(algver.sturm_count(p, lo, hi)))
        return EXIT_OK
    if args.eliminant_only:
        e = algver.eliminate_cycle()
        _emit(args, e.to_text().rstrip("\n"))
        return EXIT_OK
    rep = algver.verify_deg93(args.bits)
    data = {
        "eliminant_degree": rep.eliminant_degree,
        "divides": rep.divides,
        "cofactor_degree": rep.cofactor_degree,
        "real_roots": rep.real_roots,
        "root_index": rep.root_index,
        "contains_zero": rep.contains_zero,
        "root": _iv_json(rep.root),
        "passed": rep.passed,
    }
    if args.format == "json":
        _emit(args, _json(data))
    else:
        data["root"] = _iv(rep.root, 25)
        _emit(args, "\n".join(f"{k}: {v}" for k, v in data.items()))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_repro(args) -> int:
    keys = [c.claim_id for c in repro.CLAIMS] if args.claim == "all" else [args.claim]
    try:
        for k in keys:
            repro.claim_lookup(k)
    except KeyError as e:
        raise UsageError(e.args[0])
    ok = True
    for k in keys:
        res = repro.run_claim(k, args.seed)
        print(res.report(timing=args.timing), flush=True)
        ok = ok and res.verdict
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser and dispatch

DISPATCH: dict[str, Callable] = {
    "expand": cmd_expand,
    "eval": cmd_eval,
    "compare": cmd_compare,
    "bifurcate": cmd_bifurcate,
    "alpha0": cmd_alpha0,
    "basin": cmd_basin,
    "threshold": cmd_threshold,
    "monotonicity": cmd_monotonicity,
    "chorus": cmd_chorus,
    "minkowski": cmd_minkowski,
    "backforth": cmd_backforth,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "verify-deg93": cmd_verify_deg93,
    "repro": cmd_repro,
}

# which subcommand reaches each library operation
OPERATIONS: dict[str, list[str]] = {
    "expand": ["engine.expand", "engine.roundtrip_check", "engine.Reciprocal", "engine.Power",
               "minkowski.QuestionMarkConjugate", "powerfam.PatchedPower", "chorus.ChorusConjugate",
               "realkernel.pow_neg_rational"],
    "eval": ["realkernel.parse_expr", "realkernel.eval_expr", "realkernel.certified_floor", "realkernel.refine",
             "engine.eval_finite", "engine.eval_infinite", "cfseq.PeriodicSpec"],
    "compare": ["cfseq.parse", "cfseq.format_quotients", "cfseq.altlex_compare", "cfseq.prefix_interval",
                "cfseq.classify_terminal", "engine.detect_period"],
    "bifurcate": ["powerfam.bifurcation_row", "powerfam.sweep_csv", "powerfam.double_fixed_points",
                  "powerfam.no_bifurcation_check"],
    "alpha0": ["powerfam.alpha0_by_equation", "powerfam.alpha0_by_stability"],
    "basin": ["powerfam.ones_basin", "powerfam.basin_by_confinement", "powerfam.in_ones_basin",
              "powerfam.fixed_point_ones"],
    "threshold": ["powerfam.ones_threshold"],
    "monotonicity": ["powerfam.alpha_monotonicity_scan", "powerfam.locate_monotonicity_switch"],
    "chorus": ["chorus.PWLHomeo", "chorus.eval_g", "chorus.eval_g_inv", "chorus.gbar", "chorus.gbar_inv", "chorus.fg_eval",
               "chorus.phig_eval", "chorus.expand_conjugate", "chorus.recover_g", "chorus.theorem1_demo"],
    "minkowski": ["minkowski.question_mark", "minkowski.question_mark_inverse", "minkowski.expand_fquestion"],
    "backforth": ["backforth.oracle_by_name", "backforth.oracle_rationals", "backforth.oracle_dyadics",
                  "backforth.oracle_quadirr", "backforth.oracle_Q1d", "backforth.back_and_forth",
                  "backforth.extend_to_pwl", "backforth.PartialIso"],
    "encode": ["backforth.encode_minpoly", "backforth.eta"],
    "decode": ["backforth.decode_tail", "backforth.delta"],
    "verify-deg93": ["algver.verify_deg93", "algver.eliminate_cycle", "algver.sturm_count", "algver.ZPoly",
                     "algver.resultant", "algver.solve_cycle", "algver.load_deg93"],
    "repro": ["repro.run_claim"],
}


def _fmt_arg(p, choices=("text", "json")):
    p.add_argument("--format", choices=choices, default=choices[0])
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fexp", description="Continued f-expansions: expansion, evaluation and the power family.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand", help="E_f(x)")
    p.add_argument("--f", required=True, help="reciprocal | power:A | chorus:NODES | question-mark | patched-power")
    p.add_argument("--x", required=True, help="p/q, root(n,p/q), quad(p,q,D,r) or polyroot(file,lo,hi)")
    p.add_argument("--terms", type=int, default=30)
    p.add_argument("--bit-cap", type=int, default=realkernel.DEFAULT_BIT_CAP)
    p.add_argument("--roundtrip", action="store_true", help="also report |x - V_f(E_f(x))|")
    _fmt_arg(p)

    p = sub.add_parser("eval", help="V_f of a sequence, or an enclosure of a real expression")
    p.add_argument("--f")
    p.add_argument("--seq", help="terminated sequence, e.g. '[0; 2, 16]'")
    p.add_argument("--periodic", help="HEAD;PRE;PERIOD, e.g. '1;1,1,2;1,1,1,2'")
    p.add_argument("--n-max", type=int, default=200)
    p.add_argument("--tol", default="1/1000000000000")
    p.add_argument("--x", help="real expression to enclose")
    p.add_argument("--gt", help="with --x: decide x > GT by refinement")
    p.add_argument("--bits", type=int, default=realkernel.DEFAULT_START_BITS)
    _fmt_arg(p)

    p = sub.add_parser("compare", help="alt-lex order and sequence utilities")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--prefix", help="interval of all continuations of a prefix")
    p.add_argument("--classify", help="terminal class d of a terminated sequence")
    p.add_argument("--detect", help="heuristic period candidate of a prefix")
    _fmt_arg(p)

    p = sub.add_parser("bifurcate", help="fixed points of the ones map and its double iterate")
    p.add_argument("--alpha", help="comma-separated alphas")
    p.add_argument("--grid", help="LO:HI:STEP")
    p.add_argument("--check-n", type=int, help="sign check of the bifurcation form for [n; n, n, ...]")
    p.add_argument("--alpha-max", default="100")
    p.add_argument("--bits", type=int, default=powerfam.DEFAULT_BITS)
    _fmt_arg(p, ("csv", "json"))

    p = sub.add_parser("alpha0", help="the threshold alpha0")
    p.add_argument("--method", choices=("equation", "stability", "both"), default="both")
    p.add_argument("--bits", type=int, default=64)
    _fmt_arg(p)

    p = sub.add_parser("basin", help="all-ones basin of f_alpha")
    p.add_argument("--alpha", default="5")
    p.add_argument("--method", choices=("fixed-points", "confinement"), default="fixed-points")
    p.add_argument("--x", help="rational to test for membership")
    p.add_argument("--fixed-point", action="store_true", help="also report the ones fixed point")
    p.add_argument("--bits", type=int, default=powerfam.DEFAULT_BITS)
    _fmt_arg(p)

    p = sub.add_parser("threshold", help="least alpha whose ones basin holds x")
    p.add_argument("--x", required=True)
    p.add_argument("--bits", type=int, default=powerfam.DEFAULT_BITS)
    _fmt_arg(p)

    p = sub.add_parser("monotonicity", help="alpha -> E_(f_alpha)(x) in alt-lex order")
    p.add_argument("--x", default="1/2")
    p.add_argument("--grid", help="LO:HI:STEP")
    p.add_argument("--locate", help="LO:HI bracket for the switch")
    p.add_argument("--tol", default="1/10000")
    p.add_argument("--terms", type=int, default=60)
    _fmt_arg(p, ("csv", "json"))

    p = sub.add_parser("chorus", help="piecewise-linear g and the conjugate f_g")
    p.add_argument("--g", default="", help="'u:v,u:v,...' or @FILE; empty is the identity")
    p.add_argument("--op", choices=("g", "ginv", "gbar", "gbarinv", "f", "phi", "expand", "recover", "theorem1"), default="expand")
    p.add_argument("--x")
    p.add_argument("--y", help="target value for theorem1")
    p.add_argument("--samples", default="1/3,1/2,2/3")
    p.add_argument("--terms", type=int, default=64)
    _fmt_arg(p)

    p = sub.add_parser("minkowski", help="question-mark function")
    p.add_argument("--op", choices=("eval", "expand", "inverse"), default="eval")
    p.add_argument("--x", required=True)
    _fmt_arg(p, ("text",))

    p = sub.add_parser("backforth", help="finite back-and-forth matching")
    p.add_argument("--a", default="rationals", help="rationals | dyadics | quadirr | q1d<d>")
    p.add_argument("--b", default="dyadics")
    p.add_argument("--stages", type=int, default=10)
    p.add_argument("--emit-g", help="write the piecewise-linear interpolant to this file")
    _fmt_arg(p, ("tsv", "json"))

    p = sub.add_parser("encode", help="integer code of a minimal polynomial")
    p.add_argument("--poly", help="ascending coefficients, e.g. ' -1 2 1'")
    p.add_argument("--eta", type=int)
    _fmt_arg(p, ("text",))

    p = sub.add_parser("decode", help="polynomial from a terminated sequence")
    p.add_argument("--seq", help="'[0; 3, 4, 2, 3]' or '3,4,2,3'")
    p.add_argument("--delta", type=int)
    _fmt_arg(p, ("text",))

    p = sub.add_parser("verify-deg93", help="check the bundled degree-93 polynomial")
    p.add_argument("--bits", type=int, default=128)
    p.add_argument("--eliminant-only", action="store_true", help="print the eliminant coefficients")
    p.add_argument("--roots", help="count real roots of the polynomial in FILE")
    p.add_argument("--lo")
    p.add_argument("--hi")
    _fmt_arg(p)

    p = sub.add_parser("repro", help="run one acceptance scenario, or all")
    p.add_argument("claim", help="claim id or number, or 'all'")
    p.add_argument("--seed", type=int, default=repro.DEFAULT_SEED)
    p.add_argument("--timing", action="store_true", help="print elapsed time")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return DISPATCH[args.command](args)
    except UsageError as e:
        print(f"fexp {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionExhausted as e:
        print(f"fexp {args.command}: inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (DomainError, ValueError, ZeroDivisionError, OSError, backforth.OracleExhausted) as e:
        print(f"fexp {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
