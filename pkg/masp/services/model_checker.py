"""
Models of Phi(program) computed on the module tree.

Instead of evaluating the second-order formula, each node enumerates the
extents of its free symbols that satisfy its formula: a def-module through
the ground solver, a program node by joining its members in producer
order and projecting the hidden symbols away.
"""

import logging
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Set

from ..models import DefModule, Domain, Extents, GroundTuple, Interpretation, Member, ModularProgram, PredicateSymbol
from ..utils.helpers import interpretation_key, sorted_symbols
from .analysis import free_symbols
from .evaluator import all_extents
from .grounding import stable_extents

logger = logging.getLogger(__name__)


def produced_symbols(node: Member) -> FrozenSet[PredicateSymbol]:
    """Free symbols of node that some def-module inside it defines."""
    if isinstance(node, DefModule):
        return node.intensional
    inner = frozenset(p for m in node.members for p in produced_symbols(m))
    return inner & free_symbols(node)


def _member_order(members: List[Member]) -> List[Member]:
    """Members ordered so that producers of a symbol come before its consumers; ties keep tree order."""
    produced = [produced_symbols(m) for m in members]
    consumed = [free_symbols(m) - produced[i] for i, m in enumerate(members)]
    remaining = list(range(len(members)))
    ordered: List[int] = []
    available: Set[PredicateSymbol] = set()
    pending = set().union(*produced) if produced else set()
    while remaining:
        ready = [i for i in remaining if not (consumed[i] & (pending - available))]
        chosen = ready[0] if ready else remaining[0]
        remaining.remove(chosen)
        ordered.append(chosen)
        available |= produced[chosen]
    return [members[i] for i in ordered]


class ModelChecker:
    """
    Enumerates models of Phi over a fixed domain.

    Args:
        domain: Domain all extents range over
        max_branch: Cap on each solver search and on brute-forced inputs
    """

    def __init__(self, domain: Domain, max_branch: int = 1_000_000):
        self.domain = domain
        self.max_branch = max_branch

    def enumerate(self, node: Member, fixed: Optional[Mapping[PredicateSymbol, FrozenSet[GroundTuple]]] = None) -> Iterator[Extents]:
        """
        Extents of the free symbols of node satisfying Phi(node) and agreeing with fixed.

        Entries of fixed for symbols that are not free in node are ignored,
        so a symbol hidden at node is never confused with an outer one.
        """
        free = free_symbols(node)
        fixed = {p: v for p, v in (fixed or {}).items() if p in free}
        seen: Set[FrozenSet] = set()
        for extents in self._node(node, fixed):
            result = {p: extents.get(p, frozenset()) for p in free}
            key = frozenset(result.items())
            if key not in seen:
                seen.add(key)
                yield result

    def _node(self, node: Member, fixed: Dict[PredicateSymbol, FrozenSet[GroundTuple]]) -> Iterator[Extents]:
        if isinstance(node, DefModule):
            yield from self._defmodule(node, fixed)
        else:
            yield from self._program(_member_order(list(node.members)), 0, fixed)

    def _defmodule(self, module: DefModule, fixed: Dict[PredicateSymbol, FrozenSet[GroundTuple]]) -> Iterator[Extents]:
        inputs = free_symbols(module) - module.intensional
        unknown = sorted_symbols(p for p in inputs if p not in fixed)
        for guessed in all_extents(unknown, self.domain, self.max_branch):
            known = {**fixed, **guessed}
            for solved in stable_extents(module.rules, module.intensional, self.domain, known, self.max_branch):
                if all(fixed.get(p, v) == v for p, v in solved.items()):
                    yield {**known, **solved}

    def _program(self, members: List[Member], index: int,
                 current: Dict[PredicateSymbol, FrozenSet[GroundTuple]]) -> Iterator[Extents]:
        if index == len(members):
            yield current
            return
        member = members[index]
        for extents in self.enumerate(member, current):
            yield from self._program(members, index + 1, {**current, **extents})

    def models(self, program: ModularProgram,
               fixed: Optional[Mapping[PredicateSymbol, FrozenSet[GroundTuple]]] = None) -> List[Interpretation]:
        """Models of Phi(program) as interpretations over its free symbols."""
        found = {
            Interpretation(domain=self.domain, extents=extents)
            for extents in self.enumerate(program, fixed)
        }
        logger.debug(f"{len(found)} models of {program.name or '<program>'} over {self.domain}")
        return sorted(found, key=interpretation_key)

    def holds(self, node: Member, interpretation: Interpretation) -> bool:
        """Whether interpretation satisfies Phi(node); free symbols it lacks are empty."""
        fixed = {p: interpretation.extent(p) for p in free_symbols(node)}
        return next(self.enumerate(node, fixed), None) is not None
