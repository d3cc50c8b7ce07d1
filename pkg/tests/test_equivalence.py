"""
Test module replacement and bounded equivalence checks.
"""

import pytest

from masp.exceptions import EmptyDomainError, OccurrenceError, SignatureMismatchError
from masp.models import Direction, Domain, EquivStatus, Interpretation, PredicateSymbol
from masp.services.analysis import free_symbols
from masp.services.equivalence import (
    bounded_domain,
    host_entails,
    minus_tree,
    replace,
    replacement_safe,
    same_answer_sets,
    strong_equiv_bounded,
)
from masp.services.evaluator import evaluate, join
from masp.services.formulas import find_member
from masp.services.parser import parse_instance, parse_program
from masp.services.sm_transform import phi

IN = PredicateSymbol(name="in", arity=2)
VERTEX = PredicateSymbol(name="vertex", arity=1)
EDGE = PredicateSymbol(name="edge", arity=2)

# the reachability check with an additional in-degree denial
HC_SUB_IN_DEGREE = """
#show vertex/1, in/2.
module hc show vertex/1, in/2 {
  module cn show vertex/1, in/2 {
    def M3alt: ra/1 {
      ra(Y) :- in(a,Y).
      ra(Y) :- in(X,Y), ra(X).
    }
    def {
      :- not ra(Y), vertex(Y).
    }
  }
  def {
    :- in(X,Y), in(X,Z), Y != Z.
    :- in(Y,X), in(Z,X), Y != Z.
  }
}
"""


@pytest.fixture
def two_cycle():
    return parse_instance("edge(a,b). edge(b,a).")


class TestReplace:
    """Test substitution of modules in a program tree."""

    def test_replace_cycle_check(self, hc_program, hc_alt_program):
        """Test that swapping the hc module of hc.masp gives hc_alt.masp."""
        old = find_member(hc_program, "hc")
        new = find_member(hc_alt_program, "hc")
        assert replace(hc_program, old, new) == hc_alt_program

    def test_replace_def_module(self, hc_program, hc_modules):
        """Test that a def-module is replaced where it occurs."""
        m1 = hc_modules["M1"]
        renamed = m1.model_copy(update={"name": "M1x"})
        replaced = replace(hc_program, m1, renamed)
        assert find_member(replaced, "M1x") == renamed
        assert find_member(replaced, "M1") is None

    def test_replace_root(self, hc_sub_program, hc_sub_alt_program):
        """Test that replacing the whole program returns the new one."""
        assert replace(hc_sub_program, hc_sub_program, hc_sub_alt_program) == hc_sub_alt_program

    def test_absent_module(self, hc_program, hc_alt_program):
        """Test that an absent module cannot be replaced."""
        with pytest.raises(OccurrenceError):
            replace(hc_program, find_member(hc_alt_program, "cn"), find_member(hc_program, "cn"))

    def test_minus_tree(self, hc_program, hc_modules):
        """Test that removing hc leaves sg publishing everything it defines."""
        remainder = minus_tree(hc_program, hc_modules["hc"])
        (p1,) = remainder.members
        assert [m.name for m in p1.members] == ["sg"]
        assert free_symbols(remainder) == {VERTEX, EDGE, IN}
        with pytest.raises(OccurrenceError):
            minus_tree(hc_modules["sg"], hc_modules["hc"])


class TestBoundedDomain:
    """Test domains for bounded checks."""

    def test_fresh_constants(self, hc_sub_program, hc_alt_program):
        """Test that an integer bound adds c1..cn."""
        assert bounded_domain([hc_sub_program], 2) == Domain.of(["c1", "c2"])
        assert bounded_domain([hc_alt_program], 1) == Domain.of(["a", "c1"])

    def test_explicit_bound_gains_constants(self, hc_sub_program, hc_alt_program):
        """Test that program constants join an explicit bound."""
        assert bounded_domain([hc_sub_program], ["b"]) == Domain.of(["b"])
        assert bounded_domain([hc_alt_program], ["b"]) == Domain.of(["a", "b"])

    def test_context_constants(self, hc_sub_program, vertex_a_context):
        """Test that context constants count."""
        assert bounded_domain([hc_sub_program, vertex_a_context], 0) == Domain.of(["a"])

    def test_nothing_to_bound(self, hc_sub_program):
        """Test that a program without constants needs a positive bound."""
        with pytest.raises(EmptyDomainError):
            bounded_domain([hc_sub_program], 0)


class TestStrongEquivalence:
    """Test bounded strong equivalence relative to a context."""

    def test_self_equivalence(self, ab, hc_sub_program):
        """Test that a program is equivalent to itself over every interpretation."""
        verdict = strong_equiv_bounded(hc_sub_program, hc_sub_program, None, ab)
        assert verdict.equivalent
        assert verdict.checked == 64

    def test_public_sets_must_match(self, ab, hc_program, hc_sub_program):
        """Test that different public sets are refused."""
        with pytest.raises(SignatureMismatchError):
            strong_equiv_bounded(hc_program, hc_sub_program, None, ab)

    def test_equivalent_in_context(self, ab, hc_sub_program, hc_sub_alt_program, vertex_a_context):
        """Test that the two cycle checks agree when a is a vertex."""
        verdict = strong_equiv_bounded(hc_sub_program, hc_sub_alt_program, vertex_a_context, ab)
        assert verdict.status == EquivStatus.EQUIVALENT
        assert verdict.checked == 64

    def test_counterexample_without_context(self, ab, hc_sub_program, hc_sub_alt_program):
        """Test the smallest interpretation telling the cycle checks apart."""
        verdict = strong_equiv_bounded(hc_sub_program, hc_sub_alt_program, None, ab)
        assert verdict.status == EquivStatus.COUNTEREXAMPLE
        assert verdict.direction == Direction.RIGHT_ONLY
        assert verdict.witness == Interpretation(domain=ab, extents={IN: {("a", "b")}, VERTEX: {("b",)}})
        assert verdict.checked == 16

    def test_witness_against_formulas(self, ab, hc_sub_program, hc_sub_alt_program):
        """Test that the witness separates the second-order formulas themselves."""
        verdict = strong_equiv_bounded(hc_sub_program, hc_sub_alt_program, None, ab)
        in_left = evaluate(phi(hc_sub_program), verdict.witness)
        in_right = evaluate(phi(hc_sub_alt_program), verdict.witness)
        assert in_left != in_right
        assert in_right == (verdict.direction == Direction.RIGHT_ONLY)

    def test_in_degree_denial_breaks_equivalence(self, ab, hc_sub_program, vertex_a_context):
        """Test that an extra in-degree denial is caught even in context."""
        right = parse_program(HC_SUB_IN_DEGREE)
        verdict = strong_equiv_bounded(hc_sub_program, right, vertex_a_context, ab)
        assert verdict.status == EquivStatus.COUNTEREXAMPLE
        assert verdict.direction == Direction.LEFT_ONLY
        assert verdict.witness.extent(VERTEX) >= {("a",)}

    def test_jobs_do_not_change_the_verdict(self, ab, hc_sub_program, hc_sub_alt_program):
        """Test that the reported witness is the same with worker threads."""
        sequential = strong_equiv_bounded(hc_sub_program, hc_sub_alt_program, None, ab)
        parallel = strong_equiv_bounded(hc_sub_program, hc_sub_alt_program, None, ab, jobs=3, chunk_size=2)
        assert parallel == sequential

    @pytest.mark.slow
    def test_equivalent_in_context_over_three_constants(self, abc, hc_sub_program, hc_sub_alt_program,
                                                        vertex_a_context):
        """Test the cycle checks over {a,b,c}."""
        verdict = strong_equiv_bounded(hc_sub_program, hc_sub_alt_program, vertex_a_context, abc)
        assert verdict.equivalent
        assert verdict.checked == 4096


class TestAnswerSetEquivalence:
    """Test ordinary equivalence on one instance."""

    def test_same_cycles_on_g1(self, hc_program, hc_alt_program, g1_instance):
        """Test that both programs find the cycle of g1."""
        verdict = same_answer_sets(hc_program, hc_alt_program, g1_instance)
        assert verdict.equivalent
        assert verdict.checked == 1

    def test_graph_without_vertex_a(self, hc_program, hc_alt_program):
        """Test that the reachability check needs vertex a."""
        verdict = same_answer_sets(hc_program, hc_alt_program, parse_instance("edge(b,c). edge(c,b)."))
        assert verdict.direction == Direction.LEFT_ONLY
        assert verdict.witness.extent(IN) == {("b", "c"), ("c", "b")}
        assert verdict.bound == Domain.of(["a", "b", "c"])


class TestReplacementSafety:
    """Test host entailment and safe replacement."""

    def test_host_without_instance(self, ab, hc_program, hc_modules, vertex_a_context):
        """Test that without edges nothing forces a to be a vertex."""
        assert not host_entails(hc_program, hc_modules["hc"], vertex_a_context, ab)

    def test_host_with_two_cycle(self, ab, hc_program, hc_modules, vertex_a_context, two_cycle):
        """Test that edges through a make a a vertex."""
        host = join(hc_program, two_cycle)
        assert host_entails(host, hc_modules["hc"], vertex_a_context, ab)

    def test_empty_context_is_entailed(self, ab, hc_program, hc_modules):
        """Test that no context means nothing to entail."""
        assert host_entails(hc_program, hc_modules["hc"], None, ab)

    def test_replacement_safe(self, ab, hc_program, hc_alt_program, vertex_a_context, two_cycle):
        """Test that the reachability check may replace the cycle check in the host."""
        host = join(hc_program, two_cycle)
        old = find_member(hc_program, "hc")
        new = find_member(hc_alt_program, "hc")
        assert replacement_safe(host, old, new, vertex_a_context, ab)
        assert not replacement_safe(hc_program, old, new, vertex_a_context, ab)
