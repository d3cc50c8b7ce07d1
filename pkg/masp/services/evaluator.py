"""
Evaluation over finite Herbrand domains.

Formulas are compiled once into closures over a three-valued (Kleene)
logic: with a total interpretation they are classical, with a partial one
they return None for undecided subformulas, which lets the enumerations
below prune as soon as a branch is refuted.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from ..exceptions import CoherenceError, EmptyDomainError, ResourceError, SecondOrderError, UnboundVariableError
from ..models import (
    And,
    Atom,
    Bottom,
    Constant,
    DefModule,
    Domain,
    Equal,
    ExistsFO,
    ExistsSO,
    Extents,
    ForallFO,
    ForallSO,
    Formula,
    GroundTuple,
    Implies,
    Interpretation,
    ModularProgram,
    Or,
    PredicateSymbol,
    PredicateVariable,
    PredVarAtom,
    Rule,
    SOAssignment,
    SolveOptions,
    Strategy,
    Term,
)
from ..utils.helpers import gray_code_subsets, interpretation_key, sorted_symbols
from .analysis import alpha_normalize, flatten, is_coherent, tarjan
from .formulas import constants_of, intensional_symbols, is_first_order, predicates_of
from .grounding import stable_extents
from .sm_transform import rules_conjunction, star, star_context

logger = logging.getLogger(__name__)

Truth = Optional[bool]
Env = Dict[object, object]
Compiled = Callable[["Valuation", Env], Truth]

INSTANCE_LABEL = "M_E"


# ---------------------------------------------------------------------------
# valuations

class Valuation:
    """Truth of ground atoms; None marks an undecided atom."""

    def atom(self, pred: PredicateSymbol, values: GroundTuple) -> Truth:
        raise NotImplementedError

    def variable(self, var: PredicateVariable, values: GroundTuple) -> Truth:
        raise UnboundVariableError(f"predicate variable {var} has no value")


class TotalValuation(Valuation):
    def __init__(self, extents: Mapping[PredicateSymbol, FrozenSet[GroundTuple]],
                 so: Optional[SOAssignment] = None):
        self.extents = extents
        self.so = so or {}

    def atom(self, pred, values):
        return values in self.extents.get(pred, ())

    def variable(self, var, values):
        if var not in self.so:
            return super().variable(var, values)
        return values in self.so[var]


class PartialValuation(Valuation):
    """Searched predicates are decided atom by atom; the others are fixed."""

    def __init__(self, fixed: Mapping[PredicateSymbol, FrozenSet[GroundTuple]],
                 searched: Iterable[PredicateSymbol]):
        self.fixed = fixed
        self.true: Dict[PredicateSymbol, Set[GroundTuple]] = {p: set() for p in searched}
        self.false: Dict[PredicateSymbol, Set[GroundTuple]] = {p: set() for p in self.true}

    def atom(self, pred, values):
        if pred not in self.true:
            return values in self.fixed.get(pred, ())
        if values in self.true[pred]:
            return True
        if values in self.false[pred]:
            return False
        return None

    def decide(self, pred: PredicateSymbol, values: GroundTuple, value: Optional[bool]) -> None:
        self.true[pred].discard(values)
        self.false[pred].discard(values)
        if value is True:
            self.true[pred].add(values)
        elif value is False:
            self.false[pred].add(values)


class _WitnessValuation(Valuation):
    """Symbols read the candidate model; their starred variables read a partial subset of it."""

    def __init__(self, extents: Mapping[PredicateSymbol, FrozenSet[GroundTuple]],
                 symbol_of: Mapping[PredicateVariable, PredicateSymbol]):
        self.extents = extents
        self.symbol_of = symbol_of
        self.dropped: Set[Tuple[PredicateSymbol, GroundTuple]] = set()
        self.kept: Set[Tuple[PredicateSymbol, GroundTuple]] = set()

    def atom(self, pred, values):
        return values in self.extents.get(pred, ())

    def variable(self, var, values):
        pred = self.symbol_of.get(var)
        if pred is None:
            return super().variable(var, values)
        if values not in self.extents.get(pred, ()):
            return False
        key = (pred, values)
        if key in self.kept:
            return True
        if key in self.dropped:
            return False
        return None


# ---------------------------------------------------------------------------
# compilation

def _term_getter(t: Term) -> Callable[[Env], str]:
    if isinstance(t, Constant):
        value = t.name
        return lambda env: value
    name = t.name

    def get(env: Env) -> str:
        try:
            return env[name]  # type: ignore[return-value]
        except KeyError:
            raise UnboundVariableError(f"variable {name} is not bound") from None

    return get


def _tuple_getter(args: Sequence[Term]) -> Callable[[Env], GroundTuple]:
    if all(isinstance(t, Constant) for t in args):
        values = tuple(t.name for t in args)
        return lambda env: values
    getters = [_term_getter(t) for t in args]
    return lambda env: tuple(g(env) for g in getters)


def _quantifier(body: Compiled, key, values: Callable[[], Iterable], universal: bool) -> Compiled:
    decisive = False if universal else True

    def run(val: Valuation, env: Env) -> Truth:
        missing = key not in env
        saved = env.get(key)
        result: Truth = not decisive
        try:
            for value in values():
                env[key] = value
                outcome = body(val, env)
                if outcome is decisive:
                    return decisive
                if outcome is None:
                    result = None
        finally:
            if missing:
                env.pop(key, None)
            else:
                env[key] = saved
        return result

    return run


def _build(f: Formula, domain: Domain) -> Compiled:
    match f:
        case Bottom():
            return lambda val, env: False
        case Atom(pred=pred, args=args):
            getter = _tuple_getter(args)
            return lambda val, env: val.atom(pred, getter(env))
        case PredVarAtom(var=var, args=args):
            getter = _tuple_getter(args)

            def predicate_variable(val: Valuation, env: Env) -> Truth:
                values = getter(env)
                if var in env:
                    return values in env[var]  # type: ignore[operator]
                return val.variable(var, values)

            return predicate_variable
        case Equal(left=l, right=r):
            left, right = _term_getter(l), _term_getter(r)
            return lambda val, env: left(env) == right(env)
        case And(left=l, right=r):
            left, right = _build(l, domain), _build(r, domain)

            def conjunction(val: Valuation, env: Env) -> Truth:
                a = left(val, env)
                if a is False:
                    return False
                b = right(val, env)
                if b is False:
                    return False
                return True if (a and b) else None

            return conjunction
        case Or(left=l, right=r):
            left, right = _build(l, domain), _build(r, domain)

            def disjunction(val: Valuation, env: Env) -> Truth:
                a = left(val, env)
                if a is True:
                    return True
                b = right(val, env)
                if b is True:
                    return True
                return False if (a is False and b is False) else None

            return disjunction
        case Implies(left=l, right=r):
            left, right = _build(l, domain), _build(r, domain)

            def implication(val: Valuation, env: Env) -> Truth:
                a = left(val, env)
                if a is False:
                    return True
                b = right(val, env)
                if b is True:
                    return True
                return False if (a is True and b is False) else None

            return implication
        case ForallFO(var=v, body=b) | ExistsFO(var=v, body=b):
            constants = domain.constants
            return _quantifier(_build(b, domain), v.name, lambda: constants, isinstance(f, ForallFO))
        case ForallSO(var=v, body=b) | ExistsSO(var=v, body=b):
            tuples = list(itertools.product(domain.constants, repeat=v.arity))
            return _quantifier(_build(b, domain), v, lambda: gray_code_subsets(tuples), isinstance(f, ForallSO))
    raise TypeError(f"cannot evaluate {type(f).__name__}")


@lru_cache(maxsize=512)
def compile_formula(f: Formula, domain: Domain) -> Compiled:
    """Closure evaluating f over domain in three-valued logic."""
    return _build(f, domain)


def evaluate(f: Formula, interpretation: Interpretation, so: Optional[SOAssignment] = None) -> bool:
    """
    Classical truth of f in interpretation.

    First-order quantifiers range over the domain constants, second-order
    ones over all relations of the right arity on the domain.

    Raises:
        UnboundVariableError: if a free variable of f has no value
    """
    result = compile_formula(f, interpretation.domain)(TotalValuation(interpretation.extents, so), {})
    return bool(result)


# ---------------------------------------------------------------------------
# domains and projection

def herbrand_universe(program: ModularProgram, instance: Optional[DefModule] = None) -> Domain:
    """
    All constants of the program and the instance.

    Raises:
        EmptyDomainError: if there are none
    """
    nodes = [program] + ([instance] if instance is not None else [])
    constants = constants_of(nodes)
    if not constants:
        raise EmptyDomainError("no constants occur in the program or instance; give a domain explicitly")
    return Domain.of(constants)


def resolve_domain(program: ModularProgram, instance: Optional[DefModule] = None,
                   override: Optional[Domain] = None) -> Domain:
    """The override if given, extended by any program constants it misses; else the Herbrand universe."""
    if override is None:
        return herbrand_universe(program, instance)
    constants = constants_of([program] + ([instance] if instance is not None else []))
    missing = sorted(constants - set(override.constants))
    if missing:
        logger.warning(f"domain {override} lacks program constants {', '.join(missing)}; adding them")
        return Domain.of(set(override.constants) | constants)
    return override


def project(interpretation: Interpretation, symbols: Iterable[PredicateSymbol]) -> Interpretation:
    """Restriction of interpretation to symbols, domain preserved."""
    keep = set(symbols)
    return Interpretation(
        domain=interpretation.domain,
        extents={p: t for p, t in interpretation.extents.items() if p in keep},
    )


def ground_atoms(preds: Iterable[PredicateSymbol], domain: Domain) -> List[Tuple[PredicateSymbol, GroundTuple]]:
    """Every ground atom over preds, symbols in canonical order."""
    return [
        (p, values)
        for p in sorted_symbols(set(preds))
        for values in itertools.product(domain.constants, repeat=p.arity)
    ]


def all_extents(preds: Iterable[PredicateSymbol], domain: Domain, cap: int) -> Iterator[Extents]:
    """
    Every assignment of extents to preds.

    Raises:
        ResourceError: if there are more than cap assignments
    """
    atoms = ground_atoms(preds, domain)
    if len(atoms) >= 63 or (1 << len(atoms)) > cap:
        raise ResourceError(
            f"{len(atoms)} open ground atoms give more than {cap} assignments; "
            f"provide an instance or a smaller domain"
        )
    symbols = sorted_symbols(set(preds))
    for subset in itertools.product((False, True), repeat=len(atoms)):
        extents: Dict[PredicateSymbol, Set[GroundTuple]] = {p: set() for p in symbols}
        for (pred, values), chosen in zip(atoms, subset):
            if chosen:
                extents[pred].add(values)
        yield {p: frozenset(v) for p, v in extents.items()}


# ---------------------------------------------------------------------------
# enumeration by three-valued search

def _search(test: Compiled, valuation: PartialValuation,
            atoms: Sequence[Tuple[PredicateSymbol, GroundTuple]]) -> Iterator[Extents]:
    """Total extensions of the searched atoms on which test is true, refuted branches pruned."""
    if test(valuation, {}) is False:
        return

    def descend(depth: int) -> Iterator[Extents]:
        if depth == len(atoms):
            if test(valuation, {}) is True:
                yield {p: frozenset(v) for p, v in valuation.true.items()}
            return
        pred, values = atoms[depth]
        for value in (False, True):
            valuation.decide(pred, values, value)
            if test(valuation, {}) is not False:
                yield from descend(depth + 1)
        valuation.decide(pred, values, None)

    yield from descend(0)


def _fixed_extents(fixed: Optional[Interpretation], exclude: Iterable[PredicateSymbol]) -> Extents:
    if fixed is None:
        return {}
    excluded = set(exclude)
    return {p: t for p, t in fixed.extents.items() if p not in excluded}


def classical_models(f: Formula, preds: Sequence[PredicateSymbol], domain: Domain,
                     fixed: Optional[Interpretation] = None) -> List[Interpretation]:
    """Herbrand models of f extending fixed with extents for preds."""
    preds = sorted_symbols(set(preds))
    base = _fixed_extents(fixed, preds)
    valuation = PartialValuation(base, preds)
    models = [
        Interpretation(domain=domain, extents={**base, **chosen})
        for chosen in _search(compile_formula(f, domain), valuation, ground_atoms(preds, domain))
    ]
    return sorted(models, key=interpretation_key)


def naive_stable_models(f: Formula, preds: Sequence[PredicateSymbol], domain: Domain,
                        fixed: Optional[Interpretation] = None, limit: Optional[int] = None) -> List[Interpretation]:
    """
    Herbrand models of SM_p[f] extending fixed, by search over the p atoms.

    Candidates are models of f; a candidate is stable when no proper
    subset J of its p-extents satisfies f* with J for the starred symbols.

    Raises:
        SecondOrderError: if f is not first-order
        ResourceError: if there are more than limit candidate atoms
    """
    if not is_first_order(f):
        raise SecondOrderError("stable models are defined for first-order formulas")
    preds = sorted_symbols(set(preds))
    atoms = ground_atoms(preds, domain)
    if limit is not None and len(atoms) > limit:
        raise ResourceError(f"naive search over {len(atoms)} ground atoms exceeds the limit of {limit}")

    base = _fixed_extents(fixed, preds)
    ctx = star_context(preds)
    starred = compile_formula(star(f, ctx), domain)
    symbol_of = {var: pred for pred, var in ctx.mapping.items()}

    stable = []
    for chosen in _search(compile_formula(f, domain), PartialValuation(base, preds), atoms):
        extents = {**base, **chosen}
        if not _has_smaller_witness(starred, extents, symbol_of, preds):
            stable.append(Interpretation(domain=domain, extents=extents))
    logger.debug(f"naive search over {len(atoms)} atoms found {len(stable)} stable models")
    return sorted(stable, key=interpretation_key)


def _has_smaller_witness(starred: Compiled, extents: Extents,
                         symbol_of: Mapping[PredicateVariable, PredicateSymbol],
                         preds: Sequence[PredicateSymbol]) -> bool:
    members = [(p, values) for p in preds for values in sorted(extents.get(p, ()))]
    valuation = _WitnessValuation(extents, symbol_of)

    def descend(depth: int, strict: bool) -> bool:
        if depth == len(members):
            return strict and starred(valuation, {}) is True
        key = members[depth]
        # dropping first finds small witnesses early
        valuation.dropped.add(key)
        if starred(valuation, {}) is not False and descend(depth + 1, True):
            return True
        valuation.dropped.discard(key)
        valuation.kept.add(key)
        found = starred(valuation, {}) is not False and descend(depth + 1, strict)
        valuation.kept.discard(key)
        return found

    return bool(members) and descend(0, False)


# ---------------------------------------------------------------------------
# answer sets

def join(program: ModularProgram, instance: Optional[DefModule] = None,
         show: Optional[FrozenSet[PredicateSymbol]] = None) -> ModularProgram:
    """<show, members(program) + [instance]> with show defaulting to the program's public set."""
    members = program.members
    if instance is not None:
        members += (instance.model_copy(update={"name": instance.name or INSTANCE_LABEL}),)
    public = show if show is not None else program.public
    return ModularProgram(public=frozenset(public), members=members, name=program.name)


@dataclass
class _Unit:
    intensional: FrozenSet[PredicateSymbol]
    rules: List[Rule]
    labels: List[str]
    attached: List[Rule] = field(default_factory=list)


def _body_symbols(module: DefModule) -> Set[PredicateSymbol]:
    return {a.pred for r in module.rules for a in r.body_atoms()}


def _units(modules: Sequence[DefModule]) -> List[_Unit]:
    """
    Def-modules grouped into evaluation units, in dependency order.

    Modules whose bodies refer to each other's intensional symbols, in any
    polarity, form one unit.
    """
    owner = {p: i for i, m in enumerate(modules) for p in m.intensional}
    depends = [sorted({owner[p] for p in _body_symbols(m) if p in owner} - {i}) for i, m in enumerate(modules)]
    groups = [sorted(c) for c in tarjan(range(len(modules)), lambda i: depends[i])]
    # tarjan yields a component after everything it depends on
    units = []
    for group in groups:
        units.append(_Unit(
            intensional=frozenset(p for i in group for p in modules[i].intensional),
            rules=[r for i in group for r in modules[i].rules],
            labels=[modules[i].name or ",".join(map(str, sorted_symbols(modules[i].intensional))) for i in group],
        ))
    return units


def _denials_hold(rules: Sequence[Rule], domain: Domain, extents: Extents) -> bool:
    return next(stable_extents(rules, (), domain, extents), None) is not None


class _SplittingSolver:
    """
    Evaluates a flat coherent program unit by unit along the dependency order.

    Each unit is solved by the ground StableModelSolver over the extents fixed
    so far; its answers are the stable models naive_stable_models would find
    for the unit's rules with those extents fixed.
    """

    def __init__(self, flat: ModularProgram, domain: Domain, options: SolveOptions):
        self.domain = domain
        self.options = options
        self.public = flat.public
        modules = list(flat.members)
        self.units = _units([m for m in modules if m.intensional])
        produced = {p: k for k, unit in enumerate(self.units) for p in unit.intensional}
        self.open = sorted_symbols(predicates_of(flat) - set(produced))
        self.upfront: List[Rule] = []
        for module in modules:
            if module.intensional:
                continue
            level = max((produced.get(p, -1) for p in predicates_of(module)), default=-1)
            if level < 0:
                self.upfront.extend(module.rules)
            else:
                self.units[level].attached.extend(module.rules)
        logger.info(f"splitting into {len(self.units)} units over domain {domain}; "
                    f"open symbols: {', '.join(map(str, self.open)) or 'none'}")

    def _extend(self, depth: int, extents: Extents, found: Set[Interpretation]) -> None:
        if depth == len(self.units):
            found.add(project(Interpretation(domain=self.domain, extents=extents), self.public))
            return
        unit = self.units[depth]
        for solved in stable_extents(unit.rules + unit.attached, unit.intensional, self.domain,
                                     extents, self.options.max_branch):
            self._extend(depth + 1, {**extents, **solved}, found)

    def solve_from(self, base: Extents) -> Set[Interpretation]:
        found: Set[Interpretation] = set()
        if self.upfront and not _denials_hold(self.upfront, self.domain, base):
            return found
        self._extend(0, dict(base), found)
        return found

    def solve(self) -> Set[Interpretation]:
        bases = list(all_extents(self.open, self.domain, self.options.max_branch))
        return _merge(self.solve_from, bases, self.options.jobs)


def _merge(task: Callable[[Extents], Set[Interpretation]], bases: List[Extents], jobs: int) -> Set[Interpretation]:
    found: Set[Interpretation] = set()
    if jobs > 1 and len(bases) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            for part in executor.map(task, bases):
                found |= part
    else:
        for base in bases:
            found |= task(base)
    return found


def _naive(joined: ModularProgram, domain: Domain, options: SolveOptions) -> Set[Interpretation]:
    f = rules_conjunction(joined)
    intensional = sorted_symbols(intensional_symbols(joined))
    extensional = sorted_symbols(predicates_of(joined) - set(intensional))

    def task(base: Extents) -> Set[Interpretation]:
        fixed = Interpretation(domain=domain, extents=base)
        models = naive_stable_models(f, intensional, domain, fixed, limit=options.naive_limit)
        return {project(m, joined.public) for m in models}

    return _merge(task, list(all_extents(extensional, domain, options.max_branch)), options.jobs)


def answer_sets(program: ModularProgram, instance: Optional[DefModule] = None,
                options: Optional[SolveOptions] = None) -> List[Interpretation]:
    """
    Answer sets of program joined with instance, projected on the public symbols.

    The splitting strategy requires a coherent program; it alpha-normalizes
    and flattens it and evaluates def-modules along the dependency order.
    The naive strategy alpha-normalizes too, so that symbols hidden in
    different modules stay apart, and searches the stable models of the
    conjunction of all rules directly.

    Returns:
        Interpretations sorted by their canonical atom text

    Raises:
        CoherenceError: for splitting on a program that is not coherent
        ResourceError: when a search exceeds its cap
    """
    options = options or SolveOptions()
    joined = join(program, instance, options.show_override)
    domain = resolve_domain(joined, None, options.domain_override)

    if options.strategy == Strategy.NAIVE:
        found = _naive(alpha_normalize(joined), domain, options)
    else:
        normalized = alpha_normalize(joined)
        report = is_coherent(normalized)
        if not report.coherent:
            raise CoherenceError(
                "program is not coherent; the splitting strategy does not apply (use --naive)",
                diagnostics=report.violations,
            )
        found = _SplittingSolver(flatten(normalized), domain, options).solve()

    answers = sorted(found, key=interpretation_key)
    logger.info(f"{len(answers)} answer sets")
    return answers
