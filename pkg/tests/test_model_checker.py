"""
Test the tree-based model checker against answer sets and flattening.
"""

import pytest

from masp.models import Domain, Interpretation, PredicateSymbol
from masp.services.analysis import alpha_normalize, flatten
from masp.services.evaluator import answer_sets, join
from masp.services.generators import DEFAULT_CONSTANTS, random_program, rng_for
from masp.services.model_checker import ModelChecker, produced_symbols
from masp.utils.helpers import interpretation_atoms

EDGE = PredicateSymbol(name="edge", arity=2)
IN = PredicateSymbol(name="in", arity=2)
VERTEX = PredicateSymbol(name="vertex", arity=1)
ABCD = Domain.of(["a", "b", "c", "d"])


class TestHolds:
    """Test membership of single interpretations."""

    def test_defmodule(self, abc, hc_modules):
        """Test that M1 holds exactly when vertex/1 are the edge endpoints."""
        checker = ModelChecker(abc)
        edges = {("a", "b")}
        assert checker.holds(hc_modules["M1"], Interpretation(domain=abc, extents={EDGE: edges, VERTEX: {("a",), ("b",)}}))
        assert not checker.holds(hc_modules["M1"], Interpretation(domain=abc, extents={EDGE: edges, VERTEX: {("a",)}}))

    def test_hamiltonian_check(self, ab, hc_sub_program):
        """Test the cycle check on a two-cycle and on a single edge."""
        checker = ModelChecker(ab)
        vertices = {("a",), ("b",)}
        cycle = Interpretation(domain=ab, extents={VERTEX: vertices, IN: {("a", "b"), ("b", "a")}})
        path = Interpretation(domain=ab, extents={VERTEX: vertices, IN: {("a", "b")}})
        assert checker.holds(hc_sub_program, cycle)
        assert not checker.holds(hc_sub_program, path)

    def test_hidden_symbols_are_not_fixed(self, ab, hc_sub_program):
        """Test that an extent for a hidden symbol is ignored."""
        checker = ModelChecker(ab)
        extents = {VERTEX: {("a",)}, IN: {("a", "a")}, PredicateSymbol(name="r", arity=2): set()}
        assert checker.holds(hc_sub_program, Interpretation(domain=ab, extents=extents))


class TestModels:
    """Test model enumeration on the module tree."""

    def test_produced_symbols(self, hc_program, hc_modules):
        """Test which free symbols a node defines."""
        assert produced_symbols(hc_modules["M1"]) == {VERTEX}
        assert produced_symbols(hc_modules["sg"]) == {VERTEX, IN}
        assert produced_symbols(hc_modules["hc"]) == frozenset()

    def test_models_over_one_constant(self, hc_sub_program):
        """Test every model of the cycle check over {a}."""
        models = ModelChecker(Domain.of(["a"])).models(hc_sub_program)
        assert [interpretation_atoms(m) for m in models] == [[], ["in(a,a)"], ["in(a,a)", "vertex(a)"]]

    def test_models_match_answer_sets(self, hc_program, g1_instance):
        """Test that the models of hc.masp with g1 are its answer sets."""
        joined = join(hc_program, g1_instance)
        models = ModelChecker(ABCD).models(joined)
        assert models == answer_sets(hc_program, g1_instance)

    def test_flattening_keeps_models(self, hc_program, g1_instance):
        """Test that hc.masp with g1 and its flattening have the same models."""
        joined = alpha_normalize(join(hc_program, g1_instance))
        checker = ModelChecker(ABCD)
        assert checker.models(flatten(joined)) == checker.models(joined)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    def test_flattening_keeps_models_of_random_programs(self, seed):
        """Test flattening on alpha-normalized random programs."""
        program = alpha_normalize(random_program(rng_for(seed)))
        checker = ModelChecker(Domain.of(DEFAULT_CONSTANTS))
        assert checker.models(flatten(program)) == checker.models(program)
