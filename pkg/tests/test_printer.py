"""
Test program, formula and report rendering.
"""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masp.models import (
    CoherenceReport,
    Direction,
    Domain,
    EquivStatus,
    EquivVerdict,
    Interpretation,
    PredicateSymbol,
    ReductionKind,
    ReductionResult,
    Rule,
    Variable,
)
from masp.services.analysis import dependency_graph
from masp.services.evaluator import join
from masp.services.formulas import atom, exists, forall, iff, neg, rule_to_formula
from masp.services.generators import random_program, rng_for
from masp.services.parser import parse_program
from masp.services.printer import (
    answers_json,
    format_answer_sets,
    format_coherence,
    format_dot,
    format_formula,
    format_reduction,
    format_rule,
    format_verdict,
    print_program,
    verdict_json,
)
from masp.services.sm_transform import sm

from conftest import corpus_source

IN = PredicateSymbol(name="in", arity=2)
VERTEX = PredicateSymbol(name="vertex", arity=1)
P = PredicateSymbol(name="p", arity=0)


class TestProgramPrinting:
    """Test canonical program text."""

    def test_format_rule(self):
        """Test every rule shape."""
        program = parse_program(
            "{in(X,Y)} :- edge(X,Y).\n"
            "p ; q.\n"
            ":- in(X,Y), in(X,Z), Y != Z.\n"
            "r(X) :- s(X), not t(X), not not u(X).\n"
        )
        rules = [format_rule(r) for r in program.members[0].rules]
        assert rules == [
            "{ in(X,Y) } :- edge(X,Y).",
            "p ; q.",
            ":- in(X,Y), in(X,Z), Y != Z.",
            "r(X) :- s(X), not t(X), not not u(X).",
        ]

    def test_print_nested_program(self):
        """Test indentation, labels and sorted symbol lists."""
        program = parse_program(
            "#show q/1.\n"
            "module m show q/1, p/0 {\n"
            "  def L: q/1 { q(a) :- p. }\n"
            "  def p/0 { p. }\n"
            "}\n"
        )
        assert print_program(program) == (
            "#show q/1.\n"
            "module m show p/0, q/1 {\n"
            "  def L: q/1 {\n"
            "    q(a) :- p.\n"
            "  }\n"
            "  def p/0 {\n"
            "    p.\n"
            "  }\n"
            "}\n"
        )

    def test_print_empty_show(self):
        """Test that an empty public set prints as #show."""
        assert print_program(parse_program("#show.\np.")).startswith("#show.\n")

    @pytest.mark.parametrize("name", ["hc.masp", "hc_alt.masp", "hc_sub.masp", "hc_sub_alt.masp", "ctx_vertex_a.masp"])
    def test_corpus_round_trip(self, name):
        """Test that printing and reparsing a corpus file gives the same tree."""
        program = parse_program(corpus_source(name))
        printed = print_program(program)
        reparsed = parse_program(printed)
        assert reparsed == program
        assert print_program(reparsed) == printed

    def test_joined_instance_round_trip(self, hc_program, g1_instance):
        """Test that the labelled instance module survives printing."""
        joined = join(hc_program, g1_instance)
        assert "def M_E: edge/2 {" in print_program(joined)
        assert parse_program(print_program(joined)) == joined

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_random_round_trip(self, seed):
        """Test that generated programs survive printing and reparsing."""
        program = random_program(rng_for(seed))
        reparsed = parse_program(print_program(program))
        assert reparsed == program
        assert print_program(reparsed) == print_program(program)


class TestFormulaPrinting:
    """Test the ASCII formula format."""

    def test_choice_rule_formula(self, hc_modules):
        """Test the desugared choice rule of M2."""
        (rule,) = hc_modules["M2"].rules
        assert format_formula(rule_to_formula(rule)) == "forall X Y (not not in(X,Y) & edge(X,Y) -> in(X,Y))"

    def test_inequality(self):
        """Test that a negated equality prints as !=."""
        rule = parse_program(":- in(X,Y), in(X,Z), Y != Z.").members[0].rules[0]
        assert format_formula(rule_to_formula(rule)) == "forall X Y Z (not (in(X,Y) & in(X,Z) & Y != Z))"

    def test_biconditional(self):
        """Test that iff is recognized and printed as <->."""
        x = Variable(name="X")
        f = forall([x], iff(exists([Variable(name="Y")], atom("e", "X", "Y")), atom("v", "X")))
        assert format_formula(f) == "forall X ((exists Y (e(X,Y))) <-> v(X))"

    def test_negation_binds_tightly(self):
        """Test parentheses around compound negated formulas."""
        f = neg(iff(atom("p"), atom("q")))
        assert format_formula(f) == "not (p <-> q)"

    def test_sm_formula(self):
        """Test the stable model formula of a single fact, bound variables renamed positionally."""
        assert format_formula(sm([P], atom("p"))) == "p & not (existsP P1/0 ((P1 -> p) & not (p -> P1) & P1))"


class TestReportPrinting:
    """Test answer sets, graphs and verdicts."""

    def test_answer_sets(self):
        """Test the Answer: k format and its JSON form."""
        domain = Domain.of(["a", "b"])
        answers = [
            Interpretation(domain=domain, extents={IN: {("a", "b"), ("b", "a")}}),
            Interpretation(domain=domain, extents={VERTEX: {("a",)}}),
        ]
        assert format_answer_sets(answers) == "Answer: 1\nin(a,b) in(b,a)\nAnswer: 2\nvertex(a)"
        assert answers_json(answers) == '[["in(a,b)","in(b,a)"],["vertex(a)"]]'

    def test_dot(self, hc_program, g1_instance):
        """Test the DOT rendering of the dependency graph of hc.masp with g1."""
        dot = format_dot(dependency_graph(join(hc_program, g1_instance)))
        assert dot == (
            "digraph {\n"
            '  "edge";\n'
            '  "in";\n'
            '  "r";\n'
            '  "vertex";\n'
            '  "in" -> "edge";\n'
            '  "r" -> "in";\n'
            '  "r" -> "r";\n'
            '  "vertex" -> "edge";\n'
            "}"
        )

    def test_coherence(self):
        """Test the one-line coherence summary."""
        report = CoherenceReport(simple=True, alpha_nf=True, disjoint_intensional=True, scc_covered=True)
        assert format_coherence(report, ["M1", "M2"], []) == "coherent: yes; tight modules: M1 M2; non-tight: -"

    def test_reduction(self):
        """Test applicable and inapplicable reductions."""
        applied = ReductionResult(kind=ReductionKind.DENIALS, applicable=True, residual=neg(atom("p")), module="M")
        skipped = ReductionResult(kind=ReductionKind.COMPLETION, applicable=False, reason="not tight", module="M")
        assert format_reduction(applied) == "M denials: not p"
        assert format_reduction(skipped) == "M completion: not applicable (not tight)"

    def test_verdicts(self):
        """Test both verdict kinds in text and JSON."""
        bound = Domain.of(["a", "b"])
        equivalent = EquivVerdict(status=EquivStatus.EQUIVALENT, bound=bound, checked=64)
        assert format_verdict(equivalent) == "equivalent up to bound {a,b} (64 interpretations checked)"

        witness = Interpretation(domain=bound, extents={VERTEX: {("b",)}})
        counter = EquivVerdict(status=EquivStatus.COUNTEREXAMPLE, bound=bound, witness=witness,
                               direction=Direction.RIGHT_ONLY, checked=3)
        assert format_verdict(counter) == "counterexample over {a,b}: holds in the right program only\nvertex(b)"
        assert json.loads(verdict_json(counter)) == {
            "status": "counterexample",
            "bound": ["a", "b"],
            "checked": 3,
            "direction": "right_not_left",
            "witness": ["vertex(b)"],
        }

    def test_rule_without_body(self):
        """Test a bare fact."""
        assert format_rule(Rule(head_atoms=(atom("p", "a"),))) == "p(a)."
