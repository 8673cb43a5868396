import importlib
import json
import subprocess
import sys
from collections import Counter

import pytest

from fexpansions import cli, repro

# every library operation the command line must expose
MODULE_OPERATIONS = [
    "cfseq.parse", "cfseq.format_quotients", "cfseq.altlex_compare", "cfseq.prefix_interval",
    "cfseq.classify_terminal",
    "realkernel.eval_expr", "realkernel.certified_floor", "realkernel.pow_neg_rational", "realkernel.refine",
    "engine.expand", "engine.eval_finite", "engine.eval_infinite", "engine.detect_period",
    "engine.roundtrip_check",
    "powerfam.fixed_point_ones", "powerfam.alpha0_by_equation", "powerfam.alpha0_by_stability",
    "powerfam.double_fixed_points", "powerfam.ones_basin", "powerfam.ones_threshold",
    "powerfam.no_bifurcation_check", "powerfam.alpha_monotonicity_scan",
    "chorus.eval_g", "chorus.eval_g_inv", "chorus.gbar", "chorus.gbar_inv", "chorus.fg_eval", "chorus.phig_eval",
    "chorus.expand_conjugate", "chorus.recover_g", "chorus.theorem1_demo",
    "minkowski.question_mark", "minkowski.expand_fquestion", "minkowski.question_mark_inverse",
    "backforth.back_and_forth", "backforth.extend_to_pwl", "backforth.oracle_rationals",
    "backforth.oracle_dyadics", "backforth.oracle_quadirr", "backforth.oracle_Q1d", "backforth.eta",
    "backforth.delta", "backforth.encode_minpoly", "backforth.decode_tail",
    "algver.ZPoly", "algver.resultant", "algver.eliminate_cycle", "algver.sturm_count", "algver.solve_cycle",
]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestDispatch:
    def test_every_subcommand_dispatched(self):
        sub = {"expand", "eval", "compare", "bifurcate", "alpha0", "basin", "threshold", "monotonicity", "chorus",
               "minkowski", "backforth", "encode", "decode", "verify-deg93", "repro"}
        assert set(cli.DISPATCH) == sub == set(cli.OPERATIONS)

    def test_operations_resolve(self):
        for entries in cli.OPERATIONS.values():
            for dotted in entries:
                mod, name = dotted.split(".")
                assert hasattr(importlib.import_module(f"fexpansions.{mod}"), name), dotted

    def test_each_operation_in_exactly_one_subcommand(self):
        counts = Counter(e for entries in cli.OPERATIONS.values() for e in entries)
        assert all(n == 1 for n in counts.values()), [e for e, n in counts.items() if n > 1]
        missing = [op for op in MODULE_OPERATIONS if op not in counts]
        assert not missing


class TestExamples:
    def test_expand_two_thirds(self, capsys):
        code, out, _ = run(capsys, "expand", "--f", "power:1/2", "--x", "2/3")
        assert code == 0 and out == "[0; 2, 16]\n"

    def test_repro_alpha0(self, capsys):
        code, out, _ = run(capsys, "repro", "alpha0")
        assert code == 0 and out.startswith("PASS [6] alpha0")
        assert "4.1410415" in out

    def test_encode(self, capsys):
        code, out, _ = run(capsys, "encode", "--poly", " -1 2 1")
        assert code == 0 and out == "3,4,2,3\n"

    def test_decode(self, capsys):
        code, out, _ = run(capsys, "decode", "--seq", "3,4,2,3")
        assert code == 0 and out.strip()

    def test_expand_json(self, capsys):
        code, out, _ = run(capsys, "expand", "--f", "power:1/2", "--x", "27/47", "--format", "json")
        data = json.loads(out)
        assert data["quotients"] == "[0; 3, 1098, 2892, 410, 256]" and data["outcome"] == "terminated"

    def test_compare(self, capsys):
        code, out, _ = run(capsys, "compare", "--a", "[0; 2]", "--b", "[0; 3]", "--format", "json")
        assert json.loads(out)["order"] == "GREATER"

    def test_bifurcate_csv(self, capsys):
        code, out, _ = run(capsys, "bifurcate", "--alpha", "1,5")
        assert code == 0 and len(out.splitlines()) == 3

    def test_eval_periodic(self, capsys):
        code, out, _ = run(capsys, "eval", "--f", "reciprocal", "--periodic", "1;;1")
        assert code == 0 and out.startswith("converged [1.61803398874")

    def test_minkowski(self, capsys):
        code, out, _ = run(capsys, "minkowski", "--op", "eval", "--x", "quad(-1,1,2,1)")
        assert out.startswith("2/5")

    def test_backforth_emit(self, capsys, tmp_path):
        g = tmp_path / "g.txt"
        code, out, _ = run(capsys, "backforth", "--stages", "5", "--emit-g", str(g))
        assert code == 0 and out.count("\n") == 6 and g.read_text().count("\n") == 5

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "out.txt"
        code, out, _ = run(capsys, "encode", "--eta", "-3", "--output", str(path))
        assert out == "" and path.read_text() == "7\n"


class TestExitCodes:
    def test_usage_missing_flag(self, capsys):
        with pytest.raises(SystemExit) as e:
            cli.main(["expand", "--x", "1/2"])
        assert e.value.code == 1

    def test_usage_bad_generator(self, capsys):
        code, _, err = run(capsys, "expand", "--f", "cosine", "--x", "1/2")
        assert code == 1 and "unknown generator" in err

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "minkowski", "--op", "inverse", "--x", "1/3")
        assert code == 1 and "dyadic" in err

    def test_unknown_claim(self, capsys):
        code, _, _ = run(capsys, "repro", "nonsense")
        assert code == 1

    def test_inconclusive(self, capsys):
        code, out, _ = run(capsys, "expand", "--f", "power:1/2", "--x", "root(3,3)", "--terms", "400",
                           "--bit-cap", "128")
        assert code == 2 and "undecided_integer" in out

    def test_reproduction_failure(self, capsys, monkeypatch):
        def failing(key, seed=repro.DEFAULT_SEED):
            res = repro.ClaimResult("alpha0", 6, "forced", True, [], 0.0, 10.0)
            res.check("value", "1", "2", False)
            return res

        monkeypatch.setattr(repro, "run_claim", failing)
        code, out, _ = run(capsys, "repro", "alpha0")
        assert code == 3 and out.startswith("FAIL")


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ["expand", "--f", "power:1/2", "--x", "3/4", "--terms", "19", "--format", "json"],
            ["backforth", "--a", "rationals", "--b", "quadirr", "--stages", "12"],
            ["repro", "properties", "--seed", "7"],
            ["monotonicity", "--grid", "2:5/2:1/10", "--terms", "30"],
        ],
    )
    def test_byte_identical(self, argv):
        cmd = [sys.executable, "-m", "fexpansions.cli", *argv]
        a = subprocess.run(cmd, capture_output=True, check=True).stdout
        b = subprocess.run(cmd, capture_output=True, check=True).stdout
        assert a == b and a
