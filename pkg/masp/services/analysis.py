"""
Structural analyses of modular programs: dependency graphs and their
strongly connected components, tightness, simplicity, alpha-normal form,
coherence and flattening.
"""

import itertools
import logging
from collections import Counter
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Set, Tuple, TypeVar

from ..models import (
    CoherenceReport,
    DefModule,
    DependencyGraph,
    Diagnostic,
    Member,
    ModularProgram,
    PredicateSymbol,
    Severity,
)
from ..utils.helpers import format_symbols, sorted_symbols
from .formulas import (
    defmod_label,
    defmods,
    intensional_symbols,
    iter_defmods,
    predicates_of,
    rename_predicates,
)

logger = logging.getLogger(__name__)

V = TypeVar("V", bound=Hashable)


def tarjan(vertices: Iterable[V], neighbours: Callable[[V], Iterable[V]]) -> Iterator[Set[V]]:
    """
    Strongly connected components, each yielded after all components it reaches.

    Args:
        vertices: Vertices of the graph, hashable
        neighbours: Function giving the successors of a vertex
    """
    def strongconnect(v):
        index[v] = lowlink[v] = next(indices)
        stack.append(v)
        on_stack.add(v)

        for w in neighbours(v):
            if w not in index:
                yield from strongconnect(w)
                lowlink[v] = min(lowlink[v], lowlink[w])
            elif w in on_stack:
                lowlink[v] = min(lowlink[v], index[w])

        if lowlink[v] == index[v]:
            scc = set()
            while True:
                w = stack.pop()
                on_stack.discard(w)
                scc.add(w)
                if w == v:
                    break
            yield scc

    indices = itertools.count()
    stack: List[V] = []
    on_stack: Set[V] = set()
    index: Dict[V, int] = {}
    lowlink: Dict[V, int] = {}
    for v in vertices:
        if v not in index:
            yield from strongconnect(v)


# ---------------------------------------------------------------------------
# dependency graphs

def _graph(modules: Iterable[DefModule], nodes: FrozenSet[PredicateSymbol],
           include_extensional: bool) -> DependencyGraph:
    edges: Set[Tuple[PredicateSymbol, PredicateSymbol]] = set()
    extensional: Set[PredicateSymbol] = set()
    for module in modules:
        for rule in module.rules:
            for head in rule.head_atoms:
                if head.pred not in nodes:
                    continue
                for body in rule.positive_body:
                    if body.pred in nodes:
                        edges.add((head.pred, body.pred))
                    elif include_extensional:
                        extensional.add(body.pred)
                        edges.add((head.pred, body.pred))
    return DependencyGraph(nodes=nodes, edges=frozenset(edges), extensional=frozenset(extensional))


def dependency_graph(program: ModularProgram, include_extensional: bool = False) -> DependencyGraph:
    """
    Positive dependency graph over int(program).

    An edge (h, b) is added for every rule with head predicate h and
    positive body predicate b, both intensional. With include_extensional,
    body predicates outside int(program) are kept as extensional nodes.
    """
    return _graph(defmods(program), intensional_symbols(program), include_extensional)


def module_graph(module: DefModule) -> DependencyGraph:
    """The dependency graph of a single def-module over its own intensional symbols."""
    return _graph([module], module.intensional, False)


def sccs(graph: DependencyGraph) -> List[FrozenSet[PredicateSymbol]]:
    """Strongly connected components partitioning the node set, in canonical order."""
    components = tarjan(sorted_symbols(graph.nodes), graph.successors)
    return sorted((frozenset(c) for c in components), key=lambda c: [p.key for p in sorted_symbols(c)])


def is_tight(module: DefModule) -> bool:
    """Whether the def-module's dependency graph is acyclic; self-loops are cycles."""
    graph = module_graph(module)
    if any(h == b for h, b in graph.edges):
        return False
    return all(len(c) == 1 for c in sccs(graph))


# ---------------------------------------------------------------------------
# simplicity and alpha-normal form

def _module_path(path: Tuple[str, ...], module: DefModule, index: int) -> str:
    return "/".join(path + (defmod_label(module, index),))


def _simplicity_violations(program: ModularProgram) -> List[Diagnostic]:
    violations = []
    for index, (path, module) in enumerate(iter_defmods(program)):
        outside = sorted_symbols(module.head_predicates() - module.intensional)
        if outside:
            violations.append(Diagnostic(
                severity=Severity.ERROR,
                message=f"head predicate {format_symbols(outside)} is not intensional",
                path=_module_path(path, module, index),
            ))
    return violations


def is_simple(program: ModularProgram) -> bool:
    """Whether every head predicate of every def-module is intensional there."""
    return not _simplicity_violations(program)


def _hiding_conflicts(program: ModularProgram) -> Tuple[List[str], List[str]]:
    """Symbols hidden at more than one node, and symbols hidden somewhere but free at the root."""
    occurrences = _hiding_counts(program)
    root_free = free_symbols(program)
    repeated = [str(p) for p in sorted_symbols(p for p, n in occurrences.items() if n > 1)]
    clashing = [str(p) for p in sorted_symbols(p for p in occurrences if p in root_free)]
    return repeated, clashing


def alpha_nf_check(program: ModularProgram) -> bool:
    """Whether each predicate name of Phi(program) is free or bound by exactly one quantifier."""
    repeated, clashing = _hiding_conflicts(program)
    return not repeated and not clashing


def hidden_symbols(program: ModularProgram) -> FrozenSet[PredicateSymbol]:
    """Symbols hidden at this program node: free in some member but not public."""
    return frozenset(p for m in program.members for p in free_symbols(m)) - program.public


def free_symbols(node: Member) -> FrozenSet[PredicateSymbol]:
    """Free predicate symbols of Phi(node), computed on the tree."""
    if isinstance(node, DefModule):
        return predicates_of(node)
    return frozenset(p for m in node.members for p in free_symbols(m)) & node.public


def _rename_free(node: Member, mapping: Mapping[PredicateSymbol, PredicateSymbol]) -> Member:
    """Rename free occurrences only; symbols hidden at a nested node keep their own scope."""
    if not mapping:
        return node
    if isinstance(node, DefModule):
        return rename_predicates(node, mapping)
    scoped = {p: q for p, q in mapping.items() if p not in hidden_symbols(node)}
    return node.model_copy(update={
        "public": frozenset(scoped.get(p, p) for p in node.public),
        "members": tuple(_rename_free(m, scoped) for m in node.members),
    })


def _hiding_sites(program: ModularProgram) -> Iterator[FrozenSet[PredicateSymbol]]:
    yield hidden_symbols(program)
    for member in program.members:
        if isinstance(member, ModularProgram):
            yield from _hiding_sites(member)


def _hiding_counts(program: ModularProgram) -> Counter:
    """Number of program nodes hiding each symbol."""
    return Counter(p for site in _hiding_sites(program) for p in site)


def alpha_normalize(program: ModularProgram) -> ModularProgram:
    """
    Rename hidden symbols so that the program is in alpha-normal form.

    Every hiding of a symbol that is hidden at several nodes, or hidden
    somewhere and free at the root, gets its own name `<name>__k`. Other
    symbols are left alone, so normalizing twice changes nothing.
    """
    occurrences = _hiding_counts(program)
    root_free = free_symbols(program)
    conflicting = {p for p, n in occurrences.items() if n > 1 or p in root_free}
    if not conflicting:
        return program

    used = {p.name for p in predicates_of(program)} | {p.name for p in program.public}
    counters: Dict[str, itertools.count] = {}

    def fresh_name(pred: PredicateSymbol) -> PredicateSymbol:
        counter = counters.setdefault(pred.name, itertools.count(1))
        while True:
            candidate = f"{pred.name}__{next(counter)}"
            if candidate not in used:
                used.add(candidate)
                return PredicateSymbol(name=candidate, arity=pred.arity)

    def visit(node: ModularProgram) -> ModularProgram:
        renaming = {p: fresh_name(p) for p in sorted_symbols(hidden_symbols(node) & conflicting)}
        if renaming:
            logger.debug(f"renaming {format_symbols(renaming)} in {node.name or '<program>'}")
        members = tuple(_rename_free(m, renaming) for m in node.members)
        members = tuple(visit(m) if isinstance(m, ModularProgram) else m for m in members)
        return node.model_copy(update={"members": members})

    return visit(program)


# ---------------------------------------------------------------------------
# coherence and flattening

def is_coherent(program: ModularProgram) -> CoherenceReport:
    """Check simplicity, alpha-normal form, disjoint intensional sets and SCC coverage."""
    violations = _simplicity_violations(program)
    simple = not violations

    repeated, clashing = _hiding_conflicts(program)
    for name in repeated:
        violations.append(Diagnostic(
            severity=Severity.ERROR, message=f"{name} is hidden by more than one module", path=program.name,
        ))
    for name in clashing:
        violations.append(Diagnostic(
            severity=Severity.ERROR, message=f"{name} is both hidden and free", path=program.name,
        ))
    alpha_nf = not repeated and not clashing

    owners: Dict[PredicateSymbol, List[str]] = {}
    for index, (path, module) in enumerate(iter_defmods(program)):
        for pred in module.intensional:
            owners.setdefault(pred, []).append(_module_path(path, module, index))
    shared = {p: sites for p, sites in owners.items() if len(sites) > 1}
    for pred in sorted_symbols(shared):
        violations.append(Diagnostic(
            severity=Severity.ERROR,
            message=f"{pred} is intensional in {' and '.join(shared[pred])}",
            path=shared[pred][1],
        ))
    disjoint = not shared

    scc_covered = True
    modules = defmods(program)
    for component in sccs(dependency_graph(program)):
        if not any(component <= m.intensional for m in modules):
            scc_covered = False
            violations.append(Diagnostic(
                severity=Severity.ERROR,
                message=f"strongly connected component {{{format_symbols(component)}}} spans several def-modules",
                path=program.name,
            ))

    return CoherenceReport(
        simple=simple,
        alpha_nf=alpha_nf,
        disjoint_intensional=disjoint,
        scc_covered=scc_covered,
        violations=violations,
    )


def flatten(program: ModularProgram) -> ModularProgram:
    """<public(program), defmods(program)>; only meaning-preserving in alpha-normal form."""
    if not alpha_nf_check(program):
        logger.warning(f"flattening {program.name or 'a program'} that is not in alpha-normal form; "
                       f"hidden symbols may be identified")
    return ModularProgram(public=program.public, members=tuple(defmods(program)), name=program.name)
