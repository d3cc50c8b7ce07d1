"""
Ground solver for a single def-module.

The module's rules are instantiated over a finite domain with every
non-intensional predicate fixed. Intensional atoms are restricted to those
whose rules can fire at all, and stable extents are found by guessing the
atoms that occur under negation, computing the least model of the reduct
and keeping the guesses it reproduces.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from ..exceptions import ResourceError
from ..models import (
    Atom,
    Comparison,
    ComparisonOp,
    Constant,
    Domain,
    Extents,
    GroundTuple,
    PredicateSymbol,
    Rule,
)

logger = logging.getLogger(__name__)

GroundAtom = Tuple[PredicateSymbol, GroundTuple]
Binding = Dict[str, str]
Lookup = Callable[[PredicateSymbol], Iterable[GroundTuple]]


# ---------------------------------------------------------------------------
# instantiation

def _unify(args, values: GroundTuple, binding: Binding) -> Optional[Binding]:
    extended: Optional[Binding] = None
    for arg, value in zip(args, values):
        if isinstance(arg, Constant):
            if arg.name != value:
                return None
            continue
        current = (extended or binding).get(arg.name)
        if current is None:
            if extended is None:
                extended = dict(binding)
            extended[arg.name] = value
        elif current != value:
            return None
    return extended if extended is not None else binding


def match_atoms(atoms: Sequence[Atom], lookup: Lookup, binding: Optional[Binding] = None) -> Iterator[Binding]:
    """All bindings under which every atom is in its lookup extent (a nested-loop join)."""
    binding = binding or {}
    if not atoms:
        yield binding
        return
    first, rest = atoms[0], atoms[1:]
    for values in lookup(first.pred):
        extended = _unify(first.args, values, binding)
        if extended is not None:
            yield from match_atoms(rest, lookup, extended)


def ground_atom(a: Atom, binding: Binding) -> GroundAtom:
    return a.pred, tuple(t.name if isinstance(t, Constant) else binding[t.name] for t in a.args)


def _comparison_holds(c: Comparison, binding: Binding) -> bool:
    left = c.left.name if isinstance(c.left, Constant) else binding[c.left.name]
    right = c.right.name if isinstance(c.right, Constant) else binding[c.right.name]
    return (left == right) if c.op == ComparisonOp.EQ else (left != right)


@dataclass(frozen=True)
class GroundRule:
    """Ground rule over atom indices. An empty, non-choice head is a constraint."""

    head: Tuple[int, ...]
    choice: bool
    positive: Tuple[int, ...]
    negative: Tuple[int, ...]
    double: Tuple[int, ...]

    @property
    def is_constraint(self) -> bool:
        return not self.head

    def atoms(self) -> Tuple[int, ...]:
        return self.head + self.positive + self.negative + self.double


class GroundProgram:
    """
    Instantiation of one def-module over a domain.

    Attributes:
        atoms: possible intensional ground atoms in canonical order
        rules: ground rules with a non-empty head
        constraints: ground rules with an empty head
    """

    def __init__(self, intensional: FrozenSet[PredicateSymbol], atoms: List[GroundAtom],
                 rules: List[GroundRule], constraints: List[GroundRule]):
        self.intensional = intensional
        self.atoms = atoms
        self.index = {a: i for i, a in enumerate(atoms)}
        self.rules = rules
        self.constraints = constraints

    @property
    def disjunctive(self) -> bool:
        return any(len(r.head) > 1 for r in self.rules)

    def extents(self, true_atoms: Iterable[int]) -> Extents:
        result: Dict[PredicateSymbol, Set[GroundTuple]] = {p: set() for p in self.intensional}
        for i in true_atoms:
            pred, values = self.atoms[i]
            result[pred].add(values)
        return {p: frozenset(v) for p, v in result.items()}


def _ordered_positive(rule: Rule, intensional: FrozenSet[PredicateSymbol]) -> List[Atom]:
    # fixed atoms first: they bind variables against known extents
    fixed = [a for a in rule.positive_body if a.pred not in intensional]
    return fixed + [a for a in rule.positive_body if a.pred in intensional]


def ground_module(rules: Sequence[Rule], intensional: Iterable[PredicateSymbol], domain: Domain,
                  fixed: Mapping[PredicateSymbol, FrozenSet[GroundTuple]]) -> GroundProgram:
    """
    Instantiate rules with every non-intensional predicate fixed.

    Literals over fixed predicates are decided here; instances whose body
    is already false or whose head is already true are dropped.
    """
    intensional = frozenset(intensional)
    possible: Dict[PredicateSymbol, Set[GroundTuple]] = {p: set() for p in intensional}
    ordered = [(r, _ordered_positive(r, intensional)) for r in rules]

    def lookup(pred: PredicateSymbol) -> Iterable[GroundTuple]:
        return possible[pred] if pred in intensional else fixed.get(pred, ())

    def is_true(atom: GroundAtom) -> bool:
        pred, values = atom
        if pred in intensional:
            return values in possible[pred]
        return values in fixed.get(pred, ())

    def static_body(rule: Rule, binding: Binding) -> bool:
        if not all(_comparison_holds(c, binding) for c in rule.comparisons):
            return False
        for a in rule.negative_body:
            if a.pred not in intensional and is_true(ground_atom(a, binding)):
                return False
        for a in rule.double_negated_body:
            if not is_true(ground_atom(a, binding)):
                return False
        return True

    # over-approximate the derivable intensional atoms
    while True:
        derived: List[GroundAtom] = []
        for rule, positive in ordered:
            heads = [a for a in rule.head_atoms if a.pred in intensional]
            if not heads:
                continue
            for binding in match_atoms(positive, lookup):
                if static_body(rule, binding):
                    derived.extend(ground_atom(a, binding) for a in heads)
        fresh = [(p, v) for p, v in dict.fromkeys(derived) if v not in possible[p]]
        if not fresh:
            break
        for pred, values in fresh:
            possible[pred].add(values)

    atoms = sorted(
        ((p, v) for p, tuples in possible.items() for v in tuples),
        key=lambda a: (a[0].name, a[0].arity, a[1]),
    )
    index = {a: i for i, a in enumerate(atoms)}

    ground_rules: Dict[GroundRule, None] = {}
    ground_constraints: Dict[GroundRule, None] = {}
    for rule, positive in ordered:
        for binding in match_atoms(positive, lookup):
            if not static_body(rule, binding):
                continue
            head: List[int] = []
            satisfied = False
            for a in rule.head_atoms:
                g = ground_atom(a, binding)
                if a.pred in intensional:
                    head.append(index[g])
                elif rule.choice_flag or is_true(g):
                    # a choice over a fixed atom, or a fixed head already true
                    satisfied = True
            if satisfied:
                continue
            grounded = GroundRule(
                head=tuple(head),
                choice=rule.choice_flag,
                positive=tuple(index[ground_atom(a, binding)] for a in positive if a.pred in intensional),
                negative=tuple(
                    index[g] for g in (ground_atom(a, binding) for a in rule.negative_body)
                    if g[0] in intensional and g in index
                ),
                double=tuple(
                    index[ground_atom(a, binding)] for a in rule.double_negated_body if a.pred in intensional
                ),
            )
            (ground_rules if head else ground_constraints)[grounded] = None

    logger.debug(f"grounded {len(rules)} rules into {len(ground_rules)} rules, "
                 f"{len(ground_constraints)} constraints over {len(atoms)} atoms")
    return GroundProgram(intensional, atoms, list(ground_rules), list(ground_constraints))


# ---------------------------------------------------------------------------
# solving

def least_model(rules: Iterable[Tuple[int, Tuple[int, ...]]]) -> Set[int]:
    """Least model of definite rules (head, positive body), by counting unsatisfied body atoms."""
    missing: List[int] = []
    heads: List[int] = []
    watchers: Dict[int, List[int]] = defaultdict(list)
    queue: List[int] = []
    for position, (head, body) in enumerate(rules):
        body = set(body)
        heads.append(head)
        missing.append(len(body))
        for b in body:
            watchers[b].append(position)
        if not body:
            queue.append(head)
    model: Set[int] = set()
    while queue:
        a = queue.pop()
        if a in model:
            continue
        model.add(a)
        for position in watchers.get(a, ()):
            missing[position] -= 1
            if missing[position] == 0:
                queue.append(heads[position])
    return model


def _violated(rule: GroundRule, model) -> bool:
    """Whether the body holds in model and no head atom does."""
    if rule.choice:
        return False
    return (
        all(a in model for a in rule.positive)
        and not any(a in model for a in rule.negative)
        and all(a in model for a in rule.double)
        and not any(a in model for a in rule.head)
    )


class StableModelSolver:
    """
    Enumerates the stable models of a ground program.

    Non-disjunctive programs guess the atoms occurring under negation in
    rules with a head and check the guess against the least model of the
    reduct. Constraints whose atoms are all guessed prune the search as
    soon as they are decided. Disjunctive programs enumerate classical
    models and test them for minimality against the reduct.
    """

    def __init__(self, program: GroundProgram, max_branch: int = 1_000_000):
        self.program = program
        self.max_branch = max_branch
        self.leaves = 0

    def _count_leaf(self) -> None:
        self.leaves += 1
        if self.leaves > self.max_branch:
            raise ResourceError(
                f"search exceeded {self.max_branch} candidates over {len(self.program.atoms)} atoms"
            )

    def models(self) -> Iterator[FrozenSet[int]]:
        if self.program.disjunctive:
            yield from self._disjunctive_models()
        else:
            yield from self._guess_and_check()

    # normal programs

    def _guesses(self) -> List[int]:
        guessed: Set[int] = set()
        for rule in self.program.rules:
            guessed.update(rule.negative)
            guessed.update(rule.double)
            if rule.choice:
                guessed.update(rule.head)
        return sorted(guessed)

    def reduct_model(self, guess: FrozenSet[int]) -> Set[int]:
        """Least model of the reduct of the rules relative to the guessed atoms."""
        definite = []
        for rule in self.program.rules:
            if any(a in guess for a in rule.negative):
                continue
            if any(a not in guess for a in rule.double):
                continue
            if rule.choice and rule.head[0] not in guess:
                continue
            definite.append((rule.head[0], rule.positive))
        return least_model(definite)

    def _accept(self, guesses: List[int], guess: FrozenSet[int]) -> Optional[FrozenSet[int]]:
        model = self.reduct_model(guess)
        if any((a in model) != (a in guess) for a in guesses):
            return None
        if any(_violated(c, model) for c in self.program.constraints):
            return None
        return frozenset(model)

    def _guess_and_check(self) -> Iterator[FrozenSet[int]]:
        guesses = self._guesses()
        position = {a: i for i, a in enumerate(guesses)}
        early: Dict[int, List[GroundRule]] = defaultdict(list)
        for c in self.program.constraints:
            atoms = c.atoms()
            if atoms and all(a in position for a in atoms):
                early[max(position[a] for a in atoms)].append(c)
        logger.debug(f"guessing over {len(guesses)} atoms with {sum(map(len, early.values()))} early constraints")

        chosen: Set[int] = set()

        def search(depth: int) -> Iterator[FrozenSet[int]]:
            if depth == len(guesses):
                self._count_leaf()
                model = self._accept(guesses, frozenset(chosen))
                if model is not None:
                    yield model
                return
            atom = guesses[depth]
            for value in (False, True):
                if value:
                    chosen.add(atom)
                if not any(_violated(c, chosen) for c in early.get(depth, ())):
                    yield from search(depth + 1)
                if value:
                    chosen.discard(atom)

        yield from search(0)

    # disjunctive programs

    def _reduct(self, model: FrozenSet[int]) -> List[GroundRule]:
        kept = []
        for rule in self.program.rules + self.program.constraints:
            if any(a in model for a in rule.negative):
                continue
            if any(a not in model for a in rule.double):
                continue
            if rule.choice and rule.head[0] not in model:
                continue
            kept.append(GroundRule(head=rule.head, choice=False, positive=rule.positive, negative=(), double=()))
        return kept

    def _classical_models(self, rules: List[GroundRule], atoms: Sequence[int]) -> Iterator[FrozenSet[int]]:
        position = {a: i for i, a in enumerate(atoms)}
        decided_at: Dict[int, List[GroundRule]] = defaultdict(list)
        for rule in rules:
            touched = [position[a] for a in rule.atoms() if a in position]
            decided_at[max(touched) if touched else -1].append(rule)
        if any(_violated(r, frozenset()) for r in decided_at.get(-1, ())):
            return
        chosen: Set[int] = set()

        def search(depth: int) -> Iterator[FrozenSet[int]]:
            if depth == len(atoms):
                self._count_leaf()
                yield frozenset(chosen)
                return
            for value in (False, True):
                if value:
                    chosen.add(atoms[depth])
                if not any(_violated(r, chosen) for r in decided_at.get(depth, ())):
                    yield from search(depth + 1)
                if value:
                    chosen.discard(atoms[depth])

        yield from search(0)

    def _has_smaller_model(self, model: FrozenSet[int]) -> bool:
        reduct = [r for r in self._reduct(model) if set(r.positive) <= model]
        for candidate in self._classical_models(reduct, sorted(model)):
            if candidate != model:
                return True
        return False

    def _disjunctive_models(self) -> Iterator[FrozenSet[int]]:
        everything = self.program.rules + self.program.constraints
        for model in self._classical_models(everything, range(len(self.program.atoms))):
            if not self._has_smaller_model(model):
                yield model

    def is_stable(self, model: FrozenSet[int]) -> bool:
        """Whether the given set of atom indices is a stable model."""
        if self.program.disjunctive:
            if any(_violated(r, model) for r in self.program.rules + self.program.constraints):
                return False
            return not self._has_smaller_model(model)
        guesses = self._guesses()
        return self._accept(guesses, frozenset(a for a in guesses if a in model)) == model


def stable_extents(rules: Sequence[Rule], intensional: Iterable[PredicateSymbol], domain: Domain,
                   fixed: Mapping[PredicateSymbol, FrozenSet[GroundTuple]],
                   max_branch: int = 1_000_000) -> Iterator[Extents]:
    """
    Stable extents of the intensional predicates of a def-module.

    Args:
        rules: Rules of the def-module, possibly with attached denials
        intensional: Intensional predicate symbols
        domain: Domain the rules are instantiated over
        fixed: Extents of every other predicate; absent symbols are empty
        max_branch: Cap on the leaves of the search

    Yields:
        One extent map per stable model, covering every intensional symbol

    Raises:
        ResourceError: if the search exceeds max_branch leaves
    """
    program = ground_module(rules, intensional, domain, fixed)
    solver = StableModelSolver(program, max_branch)
    for model in solver.models():
        yield program.extents(model)


def is_stable(rules: Sequence[Rule], intensional: Iterable[PredicateSymbol], domain: Domain,
              extents: Mapping[PredicateSymbol, FrozenSet[GroundTuple]]) -> bool:
    """Whether the given extents are stable for the intensional predicates, the rest taken as fixed."""
    intensional = frozenset(intensional)
    fixed = {p: v for p, v in extents.items() if p not in intensional}
    program = ground_module(rules, intensional, domain, fixed)
    wanted = set()
    for pred in intensional:
        for values in extents.get(pred, ()):
            if (pred, tuple(values)) not in program.index:
                return False
            wanted.add(program.index[(pred, tuple(values))])
    return StableModelSolver(program).is_stable(frozenset(wanted))


def minimal_models(rules: Sequence[Rule], intensional: Iterable[PredicateSymbol], domain: Domain,
                   fixed: Mapping[PredicateSymbol, FrozenSet[GroundTuple]],
                   max_branch: int = 1_000_000) -> List[Extents]:
    """
    Models of negation-free rules that are minimal on the intensional predicates.

    Choice guards are read classically, so a choice rule never constrains a model.
    """
    program = ground_module(rules, intensional, domain, fixed)
    solver = StableModelSolver(program, max_branch)
    models = sorted(
        solver._classical_models(program.rules + program.constraints, range(len(program.atoms))),
        key=len,
    )
    minimal: List[FrozenSet[int]] = []
    for model in models:
        if not any(smaller < model for smaller in minimal):
            minimal.append(model)
    return [program.extents(m) for m in minimal]
