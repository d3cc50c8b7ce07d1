"""
Test the masp command end to end through main().
"""

import json

import pytest

from masp.main import main
from masp.services.analysis import alpha_normalize
from masp.services.printer import format_formula, print_program
from masp.services.sm_transform import phi

pytestmark = pytest.mark.usefixtures("test_config")


@pytest.fixture
def corpus(corpus_dir):
    return lambda name: str(corpus_dir / name)


@pytest.fixture
def write(tmp_path):
    def _write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    """Test the solve and oracle-solve commands."""

    def test_solve_g1(self, capsys, corpus):
        """Test the Hamiltonian cycle of g1 in text format."""
        code, out, _ = run_cli(capsys, "solve", corpus("hc.masp"), "--instance", corpus("g1.facts"))
        assert code == 0
        assert out == "Answer: 1\nin(a,b) in(b,c) in(c,d) in(d,a)\n"

    def test_solve_json(self, capsys, corpus):
        """Test the JSON array of answer sets."""
        code, out, _ = run_cli(capsys, "solve", corpus("hc.masp"), "--instance", corpus("g1.facts"),
                               "--format", "json")
        assert code == 0
        assert json.loads(out) == [["in(a,b)", "in(b,c)", "in(c,d)", "in(d,a)"]]

    def test_unsatisfiable(self, capsys, corpus, write):
        """Test that a single edge has no cycle and exits with 1."""
        instance = write("one_edge.facts", "edge(a,b).\n")
        code, out, _ = run_cli(capsys, "solve", corpus("hc.masp"), "--instance", instance)
        assert code == 1
        assert out == "UNSATISFIABLE\n"

    def test_oracle_solve(self, capsys, corpus, write):
        """Test the naive strategy on a two-cycle."""
        instance = write("two_cycle.facts", "edge(a,b). edge(b,a).\n")
        code, out, _ = run_cli(capsys, "oracle-solve", corpus("hc.masp"), "--instance", instance)
        assert code == 0
        assert out == "Answer: 1\nin(a,b) in(b,a)\n"

    def test_naive_flag_matches_splitting(self, capsys, corpus, write):
        """Test that --naive and the default strategy print the same answers."""
        instance = write("two_cycle.facts", "edge(a,b). edge(b,a).\n")
        _, splitting, _ = run_cli(capsys, "solve", corpus("hc.masp"), "--instance", instance)
        _, naive, _ = run_cli(capsys, "solve", corpus("hc.masp"), "--instance", instance, "--naive")
        assert naive == splitting


class TestReports:
    """Test the smf, check, depgraph and flatten commands."""

    def test_smf(self, capsys, corpus, hc_program):
        """Test that smf prints the formula of the normalized program."""
        code, out, _ = run_cli(capsys, "smf", corpus("hc.masp"))
        assert code == 0
        assert out == format_formula(phi(alpha_normalize(hc_program))) + "\n"

    def test_smf_json(self, capsys, corpus):
        """Test the JSON wrapper of smf."""
        code, out, _ = run_cli(capsys, "smf", corpus("hc.masp"), "--module", "M1", "--format", "json")
        assert code == 0
        assert "vertex" in json.loads(out)["formula"]

    def test_check(self, capsys, corpus):
        """Test the coherence and tightness line of hc.masp with g1."""
        code, out, _ = run_cli(capsys, "check", corpus("hc.masp"), "--instance", corpus("g1.facts"))
        assert code == 0
        assert out == "coherent: yes; tight modules: M1 M2 M_E; non-tight: M3\n"

    def test_check_incoherent(self, capsys, write):
        """Test that a shared intensional symbol exits with 1."""
        source = write("shared.masp", "def A: p/0 { p. }\ndef B: p/0 { p. }\n")
        code, out, _ = run_cli(capsys, "check", source)
        assert code == 1
        assert out.startswith("coherent: no;")

    def test_depgraph_dot(self, capsys, corpus):
        """Test the DOT rendering with edge/2 drawn as extensional."""
        code, out, _ = run_cli(capsys, "depgraph", corpus("hc.masp"))
        assert code == 0
        assert out.splitlines() == [
            "digraph {",
            '  "in";',
            '  "r";',
            '  "vertex";',
            '  "edge" [style=dashed];',
            '  "in" -> "edge";',
            '  "r" -> "in";',
            '  "r" -> "r";',
            '  "vertex" -> "edge";',
            "}",
        ]

    def test_depgraph_json(self, capsys, corpus):
        """Test the JSON rendering of the dependency graph."""
        code, out, _ = run_cli(capsys, "depgraph", corpus("hc.masp"), "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["nodes"] == ["in/2", "r/2", "vertex/1"]
        assert payload["extensional"] == ["edge/2"]
        assert ["r/2", "r/2"] in payload["edges"]

    def test_flatten(self, capsys, corpus):
        """Test that the flat program keeps the def-module labels."""
        code, out, _ = run_cli(capsys, "flatten", corpus("hc.masp"))
        assert code == 0
        assert "module" not in out
        for label in ("M1", "M2", "M3"):
            assert f"def {label}:" in out

    def test_flatten_check_models(self, capsys, corpus):
        """Test model preservation over the constants of g1."""
        code, out, _ = run_cli(capsys, "flatten", corpus("hc.masp"), "--instance", corpus("g1.facts"),
                               "--check-models")
        assert code == 0
        assert out == "models coincide over {a,b,c,d}\n"

    def test_flatten_random(self, capsys):
        """Test seeded random flattening runs."""
        code, out, _ = run_cli(capsys, "flatten", "--random", "3", "--seed", "7")
        assert code == 0
        assert out == "seed: 7\n3/3 programs keep their models\n"


class TestReduce:
    """Test the reduce command."""

    def test_reduce_m2(self, capsys, corpus):
        """Test the four reductions of the choice module."""
        code, out, _ = run_cli(capsys, "reduce", corpus("hc.masp"), "--module", "M2")
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 4
        assert lines[0] == "M2 denials: not applicable (no denials)"
        assert lines[2] == "M2 choice: forall X Y (in(X,Y) -> edge(X,Y))"
        assert lines[3] == "M2 circumscription: not applicable (negation in { in(X,Y) } :- edge(X,Y).)"

    def test_reduce_json(self, capsys, corpus):
        """Test the JSON list of reductions."""
        code, out, _ = run_cli(capsys, "reduce", corpus("hc.masp"), "--module", "M3", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert [r["kind"] for r in payload] == ["denials", "completion", "choice", "circumscription"]
        assert payload[1]["reason"] == "not tight (r depends on r)"
        assert payload[3]["applicable"]

    def test_reduce_check_models(self, capsys, corpus):
        """Test verification of the applicable reductions of M2."""
        code, out, _ = run_cli(capsys, "reduce", corpus("hc.masp"), "--module", "M2", "--check-models",
                               "--domain-bound", "a,b")
        assert code == 0
        assert out.splitlines() == [
            "M2 completion: verified over {a,b}",
            "M2 choice: verified over {a,b}",
        ]

    def test_reduce_random(self, capsys):
        """Test seeded random reduction runs."""
        code, out, _ = run_cli(capsys, "reduce", "--random", "3", "--seed", "7")
        assert code == 0
        assert out == "seed: 7\n3 modules checked, 0 failures\n"


class TestEquivalence:
    """Test the equiv and replace commands."""

    def test_equivalent_in_context(self, capsys, corpus):
        """Test that the cycle checks agree when a is a vertex."""
        code, out, _ = run_cli(capsys, "equiv", corpus("hc_sub.masp"), corpus("hc_sub_alt.masp"),
                               "--context", corpus("ctx_vertex_a.masp"), "--domain-bound", "a,b")
        assert code == 0
        assert out == "equivalent up to bound {a,b} (64 interpretations checked)\n"

    def test_counterexample(self, capsys, corpus):
        """Test the counterexample without a context."""
        code, out, _ = run_cli(capsys, "equiv", corpus("hc_sub.masp"), corpus("hc_sub_alt.masp"),
                               "--domain-bound", "a,b")
        assert code == 1
        assert out == "counterexample over {a,b}: holds in the right program only\nin(a,b) vertex(b)\n"

    def test_counterexample_json(self, capsys, corpus):
        """Test the JSON verdict."""
        code, out, _ = run_cli(capsys, "equiv", corpus("hc_sub.masp"), corpus("hc_sub_alt.masp"),
                               "--domain-bound", "a,b", "--format", "json")
        assert code == 1
        assert json.loads(out) == {
            "bound": ["a", "b"],
            "checked": 16,
            "direction": "right_not_left",
            "status": "counterexample",
            "witness": ["in(a,b)", "vertex(b)"],
        }

    def test_replace(self, capsys, corpus, hc_alt_program):
        """Test that replacing the cycle check of hc.masp gives hc_alt.masp."""
        code, out, _ = run_cli(capsys, "replace", corpus("hc.masp"), corpus("hc_sub.masp"),
                               corpus("hc_sub_alt.masp"))
        assert code == 0
        assert out == print_program(hc_alt_program)


class TestErrors:
    """Test that errors exit with 2 and report on stderr."""

    def test_missing_file(self, capsys, tmp_path):
        """Test an unreadable program file."""
        code, out, err = run_cli(capsys, "solve", str(tmp_path / "absent.masp"))
        assert code == 2
        assert out == ""
        assert err.startswith("error:")

    def test_parse_error(self, capsys, write):
        """Test that syntax errors exit with 2."""
        source = write("broken.masp", "def p/0 { p :- }\n")
        code, out, err = run_cli(capsys, "solve", source)
        assert code == 2
        assert out == ""
        assert err

    def test_wrong_input_count(self, capsys, corpus):
        """Test that equiv needs two programs."""
        code, _, err = run_cli(capsys, "equiv", corpus("hc_sub.masp"))
        assert code == 2
        assert "equiv expects 2 input file(s), got 1" in err

    def test_unknown_module(self, capsys, corpus):
        """Test that --module must name a module of the program."""
        code, _, err = run_cli(capsys, "smf", corpus("hc.masp"), "--module", "nowhere")
        assert code == 2
        assert "nowhere" in err

    def test_incoherent_solve(self, capsys, write):
        """Test that the splitting strategy refuses an incoherent program."""
        source = write("shared.masp", "def A: p/0 { p. }\ndef B: p/0 { p. }\n")
        code, out, _ = run_cli(capsys, "solve", source)
        assert code == 2
        assert out == ""
