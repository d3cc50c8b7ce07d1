"""
Seeded random inputs for property runs: graphs, relations, def-modules and
modular programs.

Every function takes a random.Random so that a run is reproduced by its
seed alone. Generated programs are safe and simple, and their def-modules
only depend positively on themselves or on earlier def-modules, which
keeps them coherent once alpha-normalized.
"""

import itertools
import random
from typing import FrozenSet, List, Optional, Sequence, Tuple

from ..models import (
    Atom,
    Comparison,
    ComparisonOp,
    Constant,
    DefModule,
    GroundTuple,
    Member,
    ModularProgram,
    PredicateSymbol,
    Rule,
    Term,
    Variable,
)
from ..utils.helpers import sorted_symbols
from .analysis import free_symbols
from .formulas import predicates_of

DEFAULT_CONSTANTS = ("a", "b")
EXTENSIONAL = (PredicateSymbol(name="e", arity=1), PredicateSymbol(name="f", arity=2))
_VARIABLES = (Variable(name="X"), Variable(name="Y"))


def rng_for(seed: Optional[int]) -> random.Random:
    return random.Random(seed)


def random_relation(rng: random.Random, constants: Sequence[str], arity: int = 2,
                    density: float = 0.4) -> FrozenSet[GroundTuple]:
    """Each tuple over constants is kept with probability density."""
    return frozenset(
        values for values in itertools.product(constants, repeat=arity) if rng.random() < density
    )


def random_graph(rng: random.Random, max_vertices: int = 4, density: float = 0.5,
                 loops: bool = True) -> Tuple[Tuple[str, ...], FrozenSet[Tuple[str, str]]]:
    """
    Directed graph on 1..max_vertices vertices named a, b, c, ...

    Returns:
        Vertex names and edge set
    """
    count = rng.randint(1, max_vertices)
    vertices = tuple(chr(ord("a") + i) for i in range(count))
    edges = frozenset(
        (u, v) for u in vertices for v in vertices
        if (loops or u != v) and rng.random() < density
    )
    return vertices, edges


# ---------------------------------------------------------------------------
# rules

def _atom(rng: random.Random, pred: PredicateSymbol, terms: Sequence[Term]) -> Atom:
    return Atom(pred=pred, args=tuple(rng.choice(terms) for _ in range(pred.arity)))


def random_rule(rng: random.Random, head: Optional[PredicateSymbol], positive: Sequence[PredicateSymbol],
                negative: Sequence[PredicateSymbol], constants: Sequence[str] = DEFAULT_CONSTANTS,
                choice: bool = False) -> Rule:
    """
    A safe rule with the given head symbol (None for a denial).

    Variables only enter through the positive body; heads and negated
    literals reuse them or constants.
    """
    constant_terms = [Constant(name=c) for c in constants]
    body = [_atom(rng, rng.choice(positive), list(_VARIABLES) + constant_terms)
            for _ in range(rng.randint(0 if head else 1, 2))] if positive else []
    bound = sorted({t for a in body for t in a.args if isinstance(t, Variable)}, key=lambda v: v.name)
    usable: List[Term] = list(bound) + constant_terms

    negated: List[Atom] = []
    doubled: List[Atom] = []
    if negative and rng.random() < 0.4:
        negated.append(_atom(rng, rng.choice(negative), usable))
    if negative and rng.random() < 0.15:
        doubled.append(_atom(rng, rng.choice(negative), usable))
    comparisons = []
    if len(bound) == 2 and rng.random() < 0.2:
        comparisons.append(Comparison(left=bound[0], op=ComparisonOp.NEQ, right=bound[1]))

    if head is None:
        return Rule(positive_body=tuple(body), negative_body=tuple(negated),
                    double_negated_body=tuple(doubled), comparisons=tuple(comparisons))
    return Rule(
        head_atoms=(_atom(rng, head, usable),),
        choice_flag=choice,
        positive_body=tuple(body),
        negative_body=tuple(negated),
        double_negated_body=tuple(doubled),
        comparisons=tuple(comparisons),
    )


def random_defmodule(rng: random.Random, intensional: Sequence[PredicateSymbol],
                     inputs: Sequence[PredicateSymbol], constants: Sequence[str] = DEFAULT_CONSTANTS,
                     denials: int = 0, name: Optional[str] = None) -> DefModule:
    """
    Def-module defining intensional from inputs.

    Positive bodies draw on inputs and the module's own symbols; negated
    literals draw on the same symbols. Some rules are choice rules.
    """
    available = list(inputs) + list(intensional)
    rules = []
    for pred in intensional:
        for _ in range(rng.randint(1, 2)):
            rules.append(random_rule(rng, pred, available, available, constants, choice=rng.random() < 0.25))
    for _ in range(denials):
        rules.append(random_rule(rng, None, available, available, constants))
    return DefModule(intensional=frozenset(intensional), rules=tuple(rules), name=name)


def random_denial_module(rng: random.Random, constants: Sequence[str] = DEFAULT_CONSTANTS) -> DefModule:
    """A def-module over e/1 with one or two intensional symbols and at least one denial."""
    intensional = [PredicateSymbol(name="p", arity=1)]
    if rng.random() < 0.5:
        intensional.append(PredicateSymbol(name="q", arity=2))
    return random_defmodule(rng, intensional, EXTENSIONAL[:1], constants, denials=rng.randint(1, 2))


# ---------------------------------------------------------------------------
# programs

def _reads(module: DefModule) -> FrozenSet[PredicateSymbol]:
    return predicates_of(module) - module.intensional


def _public_subset(rng: random.Random, free: FrozenSet[PredicateSymbol],
                   needed: FrozenSet[PredicateSymbol] = frozenset()) -> FrozenSet[PredicateSymbol]:
    """needed plus a random part of the rest of free, never empty when free is not."""
    ordered = sorted_symbols(free - needed)
    kept = set(needed & free) | {p for p in ordered if rng.random() < 0.6}
    if not kept and ordered:
        kept.add(rng.choice(ordered))
    return frozenset(kept)


def random_program(rng: random.Random, constants: Sequence[str] = DEFAULT_CONSTANTS,
                   max_defmods: int = 3, max_depth: int = 2, denials: bool = True) -> ModularProgram:
    """
    Random modular program with up to max_defmods labelled def-modules.

    Def-module k defines fresh symbols p<k>_<j> of arity at most 2 and
    reads e/1, f/2 and the symbols of earlier def-modules. Def-modules are
    placed at the root or inside nested modules up to max_depth levels;
    a nested module publishes every symbol read outside of it.
    """
    modules: List[DefModule] = []
    produced: List[PredicateSymbol] = []
    for k in range(1, rng.randint(1, max_defmods) + 1):
        intensional = [PredicateSymbol(name=f"p{k}_{j}", arity=rng.randint(0, 2))
                       for j in range(1, rng.randint(1, 2) + 1)]
        inputs = list(EXTENSIONAL) + produced
        modules.append(random_defmodule(rng, intensional, inputs, constants,
                                        denials=rng.randint(0, 1) if denials else 0, name=f"D{k}"))
        produced.extend(intensional)

    def build(group: List[DefModule], depth: int, label: str) -> List[Member]:
        result: List[Member] = []
        index = 0
        while index < len(group):
            take = rng.randint(1, len(group) - index)
            part = group[index:index + take]
            index += take
            if depth < max_depth and rng.random() < 0.5:
                name = f"{label}{len(result) + 1}"
                inner = build(part, depth + 1, name)
                outside = frozenset(p for m in modules if m not in part for p in _reads(m))
                free = frozenset(p for m in inner for p in free_symbols(m))
                result.append(ModularProgram(public=_public_subset(rng, free, outside),
                                             members=tuple(inner), name=name))
            else:
                result.extend(part)
        return result

    members = build(modules, 1, "m")
    free = frozenset(p for m in members for p in free_symbols(m))
    return ModularProgram(public=_public_subset(rng, free), members=tuple(members))
