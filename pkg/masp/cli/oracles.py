"""
Independent checkers for the Hamiltonian-cycle corpus.

None of these use the solver; they work on plain vertex and edge sets.
"""

import itertools
from typing import FrozenSet, Iterable, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..models import Atom, Constant, DefModule, Interpretation, PredicateSymbol, Rule

Edge = Tuple[str, str]

EDGE = PredicateSymbol(name="edge", arity=2)
VERTEX = PredicateSymbol(name="vertex", arity=1)
IN = PredicateSymbol(name="in", arity=2)


class GraphOracle(BaseModel):
    """A directed graph given by its vertices and edges."""

    model_config = ConfigDict(frozen=True)

    vertices: FrozenSet[str] = Field(default=frozenset(), description="Vertex constants")
    edges: FrozenSet[Edge] = Field(default=frozenset(), description="Directed edges")

    @model_validator(mode="after")
    def _check_edges(self) -> "GraphOracle":
        for u, v in self.edges:
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge ({u},{v}) leaves the vertex set")
        return self

    @classmethod
    def from_edges(cls, edges: Iterable[Edge]) -> "GraphOracle":
        """Graph whose vertices are exactly the endpoints of edges."""
        edges = frozenset(edges)
        return cls(vertices=frozenset(v for e in edges for v in e), edges=edges)


def hamiltonian_oracle(graph: GraphOracle) -> Set[FrozenSet[Edge]]:
    """Edge sets of all Hamiltonian cycles, found by permuting the vertices after the first."""
    if not graph.vertices:
        return set()
    first, *rest = sorted(graph.vertices)
    cycles = set()
    for order in itertools.permutations(rest):
        path = (first,) + order
        cycle = frozenset(zip(path, path[1:] + (first,)))
        if cycle <= graph.edges:
            cycles.add(cycle)
    return cycles


def transitive_closure(relation: Iterable[Edge]) -> FrozenSet[Edge]:
    closure = set(relation)
    while True:
        extra = {(x, w) for x, y in closure for z, w in closure if y == z} - closure
        if not extra:
            return frozenset(closure)
        closure |= extra


def strongly_connected_cover(vertices: Iterable[str], relation: Iterable[Edge]) -> bool:
    """Whether every vertex reaches every vertex, itself included, along relation."""
    vertices = set(vertices)
    closure = transitive_closure(relation)
    return all((u, v) in closure for u in vertices for v in vertices)


def subgraph_oracle(graph: GraphOracle, vertices: Iterable[str], chosen: Iterable[Edge]) -> bool:
    """Whether vertices are the endpoints of graph's edges and chosen is a subset of them."""
    endpoints = frozenset(v for e in graph.edges for v in e)
    return frozenset(vertices) == endpoints and frozenset(chosen) <= graph.edges


def graph_to_instance(graph: GraphOracle, name: str = "M_E") -> DefModule:
    """edge/2 facts for every edge, in canonical order."""
    facts = tuple(
        Rule(head_atoms=(Atom(pred=EDGE, args=(Constant(name=u), Constant(name=v))),),)
        for u, v in sorted(graph.edges)
    )
    return DefModule(intensional=frozenset([EDGE]) if facts else frozenset(), rules=facts, name=name)


def chosen_edges(answer: Interpretation) -> FrozenSet[Edge]:
    """The in/2 extent of an answer set as an edge set."""
    return frozenset((u, v) for u, v in answer.extent(IN))
