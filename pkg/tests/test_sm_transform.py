"""
Test the stable model operator and the compilation of programs to formulas.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masp.exceptions import OccurrenceError, SecondOrderError
from masp.models import (
    And,
    Domain,
    Equal,
    ExistsSO,
    Implies,
    Interpretation,
    ModularProgram,
    Or,
    PredicateSymbol,
    PredicateVariable,
    PredVarAtom,
    StarContext,
    Variable,
)
from masp.services.evaluator import evaluate, join
from masp.services.formulas import (
    alpha_equivalent,
    atom,
    conjoin,
    disjoin,
    find_member,
    free_predicate_variables,
    neg,
    predicates_of,
)
from masp.services.sm_transform import (
    bound_predicate_variables,
    circumscription,
    hide,
    phi,
    phi_minus,
    sm,
    star,
    star_context,
)

P = PredicateSymbol(name="p", arity=0)
Q = PredicateSymbol(name="q", arity=0)
R = PredicateSymbol(name="r", arity=1)
IN = PredicateSymbol(name="in", arity=2)
VERTEX = PredicateSymbol(name="vertex", arity=1)
ONE = Domain.of(["a"])


def _interpretation(*true):
    return Interpretation(domain=ONE, extents={PredicateSymbol(name=n, arity=0): {()} for n in true})


class TestStar:
    """Test the star transform."""

    def test_intensional_atoms_become_variables(self):
        """Test that only intensional atoms are replaced."""
        ctx = star_context([P])
        u = ctx.mapping[P]
        assert star(atom("p"), ctx) == PredVarAtom(var=u)
        assert star(atom("q"), ctx) == atom("q")

    def test_implication_keeps_original(self):
        """Test that (F -> G)* is (F* -> G*) & (F -> G)."""
        ctx = star_context([P])
        f = Implies(left=atom("q"), right=atom("p"))
        assert star(f, ctx) == And(
            left=Implies(left=atom("q"), right=PredVarAtom(var=ctx.mapping[P])),
            right=f,
        )

    def test_equality_is_unchanged(self):
        """Test that equality has no star."""
        eq = Equal(left=Variable(name="X"), right=Variable(name="Y"))
        assert star(eq, star_context([P])) == eq

    def test_rejects_second_order_input(self):
        """Test that star is first-order only."""
        u = PredicateVariable(name="u", arity=0)
        with pytest.raises(SecondOrderError):
            star(ExistsSO(var=u, body=PredVarAtom(var=u)), StarContext())

    @settings(max_examples=30, deadline=None)
    @given(names=st.lists(st.sampled_from(["p", "q", "s"]), min_size=2, max_size=4))
    def test_distributes_over_connectives(self, names):
        """Test that star commutes with conjunction and disjunction."""
        ctx = star_context([P, Q])
        parts = [atom(n) for n in names]
        assert star(conjoin(parts), ctx) == conjoin(star(a, ctx) for a in parts)
        assert star(disjoin(parts), ctx) == disjoin(star(a, ctx) for a in parts)


class TestStableModelOperator:
    """Test SM and circumscription as formulas evaluated over a small domain."""

    def test_no_intensional_symbols(self):
        """Test that SM with no intensional symbols is the formula itself."""
        f = atom("p")
        assert sm([], f) == f

    def test_negation_as_failure(self):
        """Test that not q -> p has the single stable model {p}."""
        f = Implies(left=neg(atom("q")), right=atom("p"))
        formula = sm([P, Q], f)
        assert evaluate(formula, _interpretation("p"))
        assert not evaluate(formula, _interpretation("q"))
        assert not evaluate(formula, _interpretation("p", "q"))
        assert not evaluate(formula, _interpretation())

    def test_extensional_symbol_is_free(self):
        """Test that q stays classical when only p is intensional."""
        f = Implies(left=neg(atom("q")), right=atom("p"))
        formula = sm([P], f)
        assert evaluate(formula, _interpretation("q"))
        assert evaluate(formula, _interpretation("p"))
        assert not evaluate(formula, _interpretation("p", "q"))

    def test_disjunction_is_minimal(self):
        """Test that p | q has the stable models {p} and {q}."""
        formula = sm([P, Q], Or(left=atom("p"), right=atom("q")))
        assert evaluate(formula, _interpretation("p"))
        assert evaluate(formula, _interpretation("q"))
        assert not evaluate(formula, _interpretation("p", "q"))

    def test_circumscription_differs_from_sm(self):
        """Test that not q -> p minimizes to {p} and {q} under circumscription."""
        f = Implies(left=neg(atom("q")), right=atom("p"))
        formula = circumscription([P, Q], f)
        assert evaluate(formula, _interpretation("p"))
        assert evaluate(formula, _interpretation("q"))
        assert not evaluate(formula, _interpretation())


class TestPhi:
    """Test phi, hiding and phi_minus on the corpus."""

    def test_hide_without_fresh_names(self):
        """Test that hiding can keep the symbol's own name."""
        u = PredicateVariable(name="r", arity=1)
        f = hide([R], atom("r", "a"), fresh=False)
        assert f == ExistsSO(var=u, body=PredVarAtom(var=u, args=atom("r", "a").args))

    def test_phi_of_hc_has_public_symbols_free(self, hc_program: ModularProgram):
        """Test that only in/2 is free in Phi(hc.masp)."""
        f = phi(hc_program)
        assert predicates_of(f) == {IN}
        assert free_predicate_variables(f) == frozenset()

    def test_phi_hides_every_hidden_symbol(self, hc_program: ModularProgram):
        """Test the hidden symbols of hc.masp: edge at the root, vertex at p1, r at cn."""
        bound = bound_predicate_variables(phi(hc_program, fresh=False))
        names = sorted(v.name for v in bound if "__" not in v.name)
        assert names == ["edge", "r", "vertex"]

    def test_phi_of_sub_program(self, hc_sub_program: ModularProgram):
        """Test the free symbols of the Hamiltonian-cycle check."""
        assert predicates_of(phi(hc_sub_program)) == {VERTEX, IN}

    def test_phi_minus_descends_to_target(self, hc_program, g1_instance, hc_modules):
        """Test that removing hc from hc.masp with g1 leaves Phi(sg) & Phi(M_E)."""
        joined = join(hc_program, g1_instance)
        instance = joined.members[-1]
        removed = phi_minus(joined, hc_modules["hc"])
        assert alpha_equivalent(removed, And(left=phi(hc_modules["sg"]), right=phi(instance)))

    def test_phi_minus_of_absent_module(self, hc_program, hc_alt_program):
        """Test that removing a module that is not there fails."""
        with pytest.raises(OccurrenceError):
            phi_minus(hc_program, find_member(hc_alt_program, "cn"))
