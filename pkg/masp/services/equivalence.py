"""
Module replacement and bounded equivalence checks.

Strong equivalence relative to a context is decided by brute force over
every interpretation of the shared public signature on a finite domain,
smallest interpretations first; a context-respecting interpretation that
satisfies Phi of exactly one side is a counterexample.
"""

import itertools
import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Deque, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from ..exceptions import EmptyDomainError, OccurrenceError, SignatureMismatchError
from ..models import (
    ContextTheory,
    DefModule,
    Direction,
    Domain,
    EquivStatus,
    EquivVerdict,
    GroundTuple,
    Interpretation,
    Member,
    ModularProgram,
    PredicateSymbol,
    SolveOptions,
)
from ..utils.helpers import format_symbols, interpretation_key, powerset, sorted_symbols
from .analysis import free_symbols
from .evaluator import all_extents, answer_sets, evaluate, ground_atoms
from .formulas import constants_of, contains_member, defmods, predicates_of, rule_to_formula
from .model_checker import ModelChecker

logger = logging.getLogger(__name__)

Candidate = Tuple[Tuple[PredicateSymbol, GroundTuple], ...]
Hit = Tuple[int, Interpretation, Direction]


def replace(program: ModularProgram, old: Member, new: Member) -> ModularProgram:
    """
    Substitute new for every occurrence of old in the program tree.

    Raises:
        OccurrenceError: if old does not occur in program
    """
    if not contains_member(program, old):
        raise OccurrenceError(f"module {getattr(old, 'name', None) or '<anonymous>'} does not occur in the program")
    if program == old:
        if isinstance(new, ModularProgram):
            return new
        return ModularProgram(public=program.public, members=(new,), name=program.name)

    def visit(node: ModularProgram) -> ModularProgram:
        members = []
        for member in node.members:
            if member == old:
                members.append(new)
            elif isinstance(member, ModularProgram):
                members.append(visit(member))
            else:
                members.append(member)
        return node.model_copy(update={"members": tuple(members)})

    return visit(program)


def context_from_program(program: ModularProgram) -> ContextTheory:
    """Read the rules of a context file as closed first-order sentences."""
    return ContextTheory(sentences=tuple(rule_to_formula(r) for m in defmods(program) for r in m.rules))


def bounded_domain(nodes: Iterable[Union[Member, ContextTheory]], bound: Union[int, Sequence[str], Domain]) -> Domain:
    """
    Domain for a bounded check.

    An integer n adds fresh constants c1..cn to the constants of nodes; an
    explicit list is extended by any constants of nodes it misses.
    """
    constants = set()
    for node in nodes:
        if isinstance(node, ContextTheory):
            constants |= constants_of(node.sentences)
        else:
            constants |= constants_of(node)
    if isinstance(bound, int):
        fresh = []
        index = 1
        while len(fresh) < bound:
            name = f"c{index}"
            if name not in constants:
                fresh.append(name)
            index += 1
        if not constants and not fresh:
            raise EmptyDomainError("no constants to bound the check with; give a domain bound")
        return Domain.of(constants | set(fresh))
    given = list(bound.constants) if isinstance(bound, Domain) else list(bound)
    missing = sorted(constants - set(given))
    if missing:
        logger.warning(f"bound {{{','.join(given)}}} lacks constants {', '.join(missing)}; adding them")
    if not given and not constants:
        raise EmptyDomainError("no constants to bound the check with; give a domain bound")
    return Domain.of(set(given) | constants)


def _public(node: Member) -> FrozenSet[PredicateSymbol]:
    return node.public if isinstance(node, ModularProgram) else predicates_of(node)


def _context_symbols(gamma: Optional[ContextTheory]) -> FrozenSet[PredicateSymbol]:
    if gamma is None:
        return frozenset()
    return frozenset(p for s in gamma.sentences for p in predicates_of(s))


def _satisfies(gamma: Optional[ContextTheory], interpretation: Interpretation) -> bool:
    return gamma is None or all(evaluate(s, interpretation) for s in gamma.sentences)


def _candidates(atoms: Sequence[Tuple[PredicateSymbol, GroundTuple]]) -> Iterator[Candidate]:
    """Subsets of atoms by increasing size, then in canonical order."""
    return powerset(atoms)


def _chunks(candidates: Iterator[Candidate], size: int) -> Iterator[Tuple[int, List[Candidate]]]:
    offset = 0
    while True:
        chunk = list(itertools.islice(candidates, size))
        if not chunk:
            return
        yield offset, chunk
        offset += len(chunk)


def _first_hit(chunks: Iterator[Tuple[int, List[Candidate]]],
               check: Callable[[int, List[Candidate]], Optional[Hit]], jobs: int) -> Optional[Hit]:
    """Earliest hit over the chunks in order, with up to 2 * jobs chunks in flight."""
    if jobs <= 1:
        for offset, chunk in chunks:
            hit = check(offset, chunk)
            if hit is not None:
                return hit
        return None

    with ThreadPoolExecutor(max_workers=jobs) as executor:
        pending: Deque = deque()
        for offset, chunk in chunks:
            pending.append(executor.submit(check, offset, chunk))
            if len(pending) >= 2 * jobs:
                hit = pending.popleft().result()
                if hit is not None:
                    for future in pending:
                        future.cancel()
                    return hit
        while pending:
            hit = pending.popleft().result()
            if hit is not None:
                for future in pending:
                    future.cancel()
                return hit
    return None


def strong_equiv_bounded(left: ModularProgram, right: ModularProgram, gamma: Optional[ContextTheory],
                         bound: Domain, max_branch: int = 1_000_000, jobs: int = 1,
                         chunk_size: int = 256) -> EquivVerdict:
    """
    Compare Phi(left) and Phi(right) on every interpretation over bound satisfying gamma.

    Interpretations range over the free symbols of both sides and of
    gamma, ordered by number of true atoms, then canonically. The witness
    reported is the first one in that order, whatever the number of jobs.

    Raises:
        SignatureMismatchError: if the public sets differ
        ResourceError: if a side needs more than max_branch guesses
    """
    if _public(left) != _public(right):
        raise SignatureMismatchError(
            f"public sets differ: {{{format_symbols(_public(left))}}} vs {{{format_symbols(_public(right))}}}"
        )
    signature = free_symbols(left) | free_symbols(right) | _context_symbols(gamma)
    atoms = ground_atoms(signature, bound)
    logger.info(f"checking {2 ** len(atoms)} interpretations of {format_symbols(signature)} over {bound}")
    checker = ModelChecker(bound, max_branch)

    def check(offset: int, chunk: List[Candidate]) -> Optional[Hit]:
        for position, candidate in enumerate(chunk):
            extents = {}
            for pred, values in candidate:
                extents.setdefault(pred, set()).add(values)
            interpretation = Interpretation(domain=bound, extents=extents)
            if not _satisfies(gamma, interpretation):
                continue
            in_left = checker.holds(left, interpretation)
            if in_left != checker.holds(right, interpretation):
                direction = Direction.LEFT_ONLY if in_left else Direction.RIGHT_ONLY
                return offset + position, interpretation, direction
        return None

    hit = _first_hit(_chunks(_candidates(atoms), chunk_size), check, jobs)
    if hit is None:
        return EquivVerdict(status=EquivStatus.EQUIVALENT, bound=bound, checked=2 ** len(atoms))
    index, witness, direction = hit
    logger.info(f"counterexample after {index + 1} interpretations")
    return EquivVerdict(status=EquivStatus.COUNTEREXAMPLE, bound=bound, witness=witness,
                        direction=direction, checked=index + 1)


def same_answer_sets(left: ModularProgram, right: ModularProgram, instance: Optional[DefModule] = None,
                     options: Optional[SolveOptions] = None) -> EquivVerdict:
    """
    Whether both programs have the same answer sets on instance.

    Both sides are solved over one domain: the override if given, else
    the constants of both programs and the instance.

    Raises:
        SignatureMismatchError: if the public sets differ and no show override is given
    """
    options = options or SolveOptions()
    if options.show_override is None and left.public != right.public:
        raise SignatureMismatchError(
            f"public sets differ: {{{format_symbols(left.public)}}} vs {{{format_symbols(right.public)}}}"
        )
    nodes = [left, right] + ([instance] if instance is not None else [])
    if options.domain_override is not None:
        domain = bounded_domain(nodes, options.domain_override)
    else:
        domain = bounded_domain(nodes, 0)
    shared = options.model_copy(update={"domain_override": domain})
    ours = set(answer_sets(left, instance, shared))
    theirs = set(answer_sets(right, instance, shared))
    differing = sorted(ours ^ theirs, key=interpretation_key)
    checked = len(ours | theirs)
    if not differing:
        return EquivVerdict(status=EquivStatus.EQUIVALENT, bound=domain, checked=checked)
    witness = differing[0]
    direction = Direction.LEFT_ONLY if witness in ours else Direction.RIGHT_ONLY
    return EquivVerdict(status=EquivStatus.COUNTEREXAMPLE, bound=domain, witness=witness,
                        direction=direction, checked=checked)


def minus_tree(program: ModularProgram, target: Member) -> ModularProgram:
    """
    A program whose Phi is Phi(program) with target removed.

    Nothing is hidden at the rebuilt nodes, matching the conjunction of
    the remaining members' formulas.

    Raises:
        OccurrenceError: if target does not occur in program
    """
    if not contains_member(program, target):
        raise OccurrenceError(f"module {getattr(target, 'name', None) or '<anonymous>'} does not occur in the program")
    removed = set([target] if isinstance(target, DefModule) else defmods(target))

    def visit(node: ModularProgram) -> ModularProgram:
        members: List[Member] = []
        for member in node.members:
            if member == target:
                continue
            inner = set([member] if isinstance(member, DefModule) else defmods(member))
            if removed.isdisjoint(inner):
                members.append(member)
            elif isinstance(member, ModularProgram) and contains_member(member, target):
                members.append(visit(member))
        visible = frozenset(p for m in members for p in free_symbols(m))
        return ModularProgram(public=visible, members=tuple(members), name=node.name)

    return visit(program)


def host_entails(host: ModularProgram, sub: Member, gamma: Optional[ContextTheory], bound: Domain,
                 max_branch: int = 1_000_000) -> bool:
    """
    Whether every model of Phi(host) without sub satisfies gamma on bound.

    Symbols of gamma the remainder leaves free are tried with every extent.
    """
    if gamma is None or not gamma.sentences:
        return True
    remainder = minus_tree(host, sub)
    unconstrained = sorted_symbols(_context_symbols(gamma) - free_symbols(remainder))
    checker = ModelChecker(bound, max_branch)
    for extents in checker.enumerate(remainder):
        for extra in all_extents(unconstrained, bound, max_branch):
            interpretation = Interpretation(domain=bound, extents={**extents, **extra})
            if not _satisfies(gamma, interpretation):
                logger.info(f"the host without the replaced module allows {interpretation.atoms()}")
                return False
    return True


def replacement_safe(host: ModularProgram, old: ModularProgram, new: ModularProgram,
                     gamma: Optional[ContextTheory], bound: Domain,
                     max_branch: int = 1_000_000, jobs: int = 1) -> bool:
    """
    Whether replacing old by new inside host keeps Phi(host) unchanged up to bound.

    Holds when old and new agree under gamma and the rest of the host
    guarantees gamma.
    """
    verdict = strong_equiv_bounded(old, new, gamma, bound, max_branch, jobs)
    return verdict.equivalent and host_entails(host, old, gamma, bound, max_branch)
