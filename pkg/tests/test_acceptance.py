"""
Acceptance runs: the Hamiltonian-cycle programs against the graph oracle.
"""

import itertools

import pytest

from masp.cli.oracles import GraphOracle, chosen_edges, graph_to_instance, hamiltonian_oracle
from masp.services.equivalence import same_answer_sets
from masp.services.evaluator import answer_sets
from masp.services.generators import random_graph, rng_for

VERTICES = ("a", "b", "c")
ALL_EDGES = list(itertools.product(VERTICES, repeat=2))
EDGE_SETS = [
    frozenset(edges)
    for size in range(1, len(ALL_EDGES) + 1)
    for edges in itertools.combinations(ALL_EDGES, size)
]


def cycles(program, graph: GraphOracle):
    return {chosen_edges(answer) for answer in answer_sets(program, graph_to_instance(graph))}


@pytest.mark.slow
class TestHamiltonianCycles:
    """Test that answer sets are exactly the Hamiltonian cycles."""

    @pytest.mark.parametrize("edges", EDGE_SETS, ids=lambda e: "-".join(u + v for u, v in sorted(e)))
    def test_every_graph_on_three_vertices(self, edges, hc_program):
        """Test all non-empty edge sets over {a,b,c}."""
        graph = GraphOracle.from_edges(edges)
        assert cycles(hc_program, graph) == hamiltonian_oracle(graph)

    @pytest.mark.parametrize("seed", range(200))
    def test_random_graphs(self, seed, hc_program):
        """Test seeded graphs on up to four vertices."""
        _, edges = random_graph(rng_for(seed), max_vertices=4)
        if not edges:
            pytest.skip("no edges, so no vertices")
        graph = GraphOracle.from_edges(edges)
        assert cycles(hc_program, graph) == hamiltonian_oracle(graph)


@pytest.mark.slow
class TestReachabilityVariant:
    """Test the reachability check where vertex a is present."""

    @pytest.mark.parametrize("seed", range(100))
    def test_same_answer_sets(self, seed, hc_program, hc_alt_program):
        """Test that both programs agree on graphs through a."""
        _, edges = random_graph(rng_for(seed), max_vertices=4)
        graph = GraphOracle.from_edges(edges)
        if "a" not in graph.vertices:
            pytest.skip("vertex a not in the graph")
        verdict = same_answer_sets(hc_program, hc_alt_program, graph_to_instance(graph))
        assert verdict.equivalent

    def test_graph_without_a(self, hc_program, hc_alt_program):
        """Test that the variant loses the cycles of graphs avoiding a."""
        graph = GraphOracle.from_edges([("b", "c"), ("c", "b")])
        assert cycles(hc_program, graph) == hamiltonian_oracle(graph)
        assert cycles(hc_alt_program, graph) == set()


class TestReachabilityVariantExhaustive:
    """Test the reachability check on every graph over {a,b,c} that contains a."""

    @pytest.mark.parametrize(
        "edges", [frozenset()] + EDGE_SETS, ids=lambda e: "-".join(u + v for u, v in sorted(e)) or "empty"
    )
    def test_every_graph_through_a(self, edges, hc_program, hc_alt_program):
        """Test that both programs have the same answer sets whenever a occurs in an edge."""
        if not any("a" in edge for edge in edges):
            pytest.skip("vertex a not in the graph")
        instance = graph_to_instance(GraphOracle.from_edges(edges))
        assert same_answer_sets(hc_program, hc_alt_program, instance).equivalent
