"""
Rewrites of single def-modules that preserve their stable models:
denial extraction, Clark normal form and completion for tight modules,
choice-rule simplification and circumscription for negation-free modules.
"""

import logging
from typing import List, Optional, Sequence, Tuple

from ..exceptions import CircumscriptionError, ReductionError
from ..models import (
    Atom,
    DefModule,
    Domain,
    Equal,
    Extents,
    Formula,
    Interpretation,
    PredicateSymbol,
    ReductionKind,
    ReductionResult,
    Rule,
    Variable,
)
from ..utils.helpers import interpretation_key, sorted_symbols
from .analysis import is_tight, module_graph, sccs
from .evaluator import all_extents, classical_models, evaluate
from .formulas import (
    conjoin,
    defmod_label,
    disjoin,
    exists,
    forall,
    iff,
    implies,
    neg,
    predicates_of,
    rule_body,
    rule_to_formula,
    rules_formula,
)
from .grounding import minimal_models, stable_extents
from .printer import format_rule
from .sm_transform import circumscription

logger = logging.getLogger(__name__)


def extract_denials(module: DefModule) -> Tuple[DefModule, Formula]:
    """Split off the denials: (p : non-denials) and the closed conjunction of the denials."""
    kept = tuple(r for r in module.rules if not r.is_denial)
    denials = module.denials()
    return module.model_copy(update={"rules": kept}), rules_formula(denials)


def _fresh_arguments(module: DefModule, arity: int) -> Tuple[Variable, ...]:
    taken = {v.name for r in module.rules for v in r.variables()}
    names = []
    index = 1
    while len(names) < arity:
        candidate = f"V{index}"
        if candidate not in taken:
            names.append(candidate)
        index += 1
    return tuple(Variable(name=n) for n in names)


def _rules_for(module: DefModule, pred: PredicateSymbol) -> List[Rule]:
    return [r for r in module.rules if any(a.pred == pred for a in r.head_atoms)]


def _check_definitional(module: DefModule) -> None:
    for rule in module.rules:
        if len(rule.head_atoms) > 1:
            raise ReductionError(f"disjunctive head in {format_rule(rule)}")
        if rule.head_atoms and rule.head_atoms[0].pred not in module.intensional:
            raise ReductionError(f"head of {format_rule(rule)} is not intensional")


def _supports(module: DefModule, pred: PredicateSymbol, arguments: Sequence[Variable],
              drop_guard: bool = False) -> Formula:
    """Disjunction over the rules for pred of their bodies, with the head arguments equated to arguments."""
    disjuncts = []
    for rule in _rules_for(module, pred):
        head = rule.head_atoms[0]
        body = rule_body(rule)
        if drop_guard:
            guard = neg(neg(head))
            body = [b for b in body if b != guard]
        if tuple(head.args) == tuple(arguments):
            equalities = []
            local = [v for v in rule.variables() if v not in arguments]
        else:
            equalities = [Equal(left=x, right=t) for x, t in zip(arguments, head.args)]
            local = list(rule.variables())
        disjuncts.append(exists(local, conjoin(equalities + body)))
    return disjoin(disjuncts)


def _head_arguments(module: DefModule, pred: PredicateSymbol) -> Tuple[Variable, ...]:
    """Shared head arguments when every rule for pred uses the same distinct variables, else fresh ones."""
    heads = {tuple(r.head_atoms[0].args) for r in _rules_for(module, pred)}
    if len(heads) == 1:
        (args,) = heads
        if all(isinstance(t, Variable) for t in args) and len(set(args)) == len(args):
            return args  # type: ignore[return-value]
    return _fresh_arguments(module, pred.arity)


def _definitions(module: DefModule, strengthen: bool) -> List[Formula]:
    _check_definitional(module)
    result = []
    for pred in sorted_symbols(module.intensional):
        arguments = _fresh_arguments(module, pred.arity)
        head = Atom(pred=pred, args=arguments)
        support = _supports(module, pred, arguments)
        connective = iff if strengthen else implies
        result.append(forall(arguments, connective(support, head)))
    return result


def clark_normal_form(module: DefModule) -> Formula:
    """
    One formula forall x (G_p -> p(x)) per intensional predicate p.

    G_p is the disjunction over the rules for p of their bodies with the
    rule variables existentially closed and the head arguments equated to
    fresh variables; a predicate without rules gets bottom.

    Raises:
        ReductionError: for disjunctive or non-intensional heads
    """
    return conjoin(_definitions(module, strengthen=False))


def _cycle_reason(module: DefModule) -> str:
    graph = module_graph(module)
    for head, body in sorted(graph.edges, key=lambda e: (e[0].key, e[1].key)):
        if head == body:
            return f"not tight ({head.name} depends on {body.name})"
    for component in sccs(graph):
        if len(component) > 1:
            names = " ".join(p.name for p in sorted_symbols(component))
            return f"not tight (cycle through {names})"
    return "not tight"


def completion(module: DefModule) -> ReductionResult:
    """Completion of a tight def-module, its denials kept as they are."""
    label = defmod_label(module)
    if not is_tight(module):
        return ReductionResult(kind=ReductionKind.COMPLETION, applicable=False,
                               reason=_cycle_reason(module), module=label)
    try:
        definitions = _definitions(module, strengthen=True)
    except ReductionError as e:
        return ReductionResult(kind=ReductionKind.COMPLETION, applicable=False, reason=e.detail, module=label)
    denials = [rule_to_formula(r) for r in module.denials()]
    return ReductionResult(kind=ReductionKind.COMPLETION, applicable=True,
                           residual=conjoin(definitions + denials), module=label)


def _is_choice_shaped(rule: Rule) -> bool:
    if len(rule.head_atoms) != 1:
        return False
    return rule.choice_flag or rule.head_atoms[0] in rule.double_negated_body


def reduce_choice(module: DefModule) -> ReductionResult:
    """
    forall x (p(x) -> G) for a tight module whose rules are all choice rules.

    A rule counts as a choice rule for p when its head is {p(x)} or when
    its body contains not not p(x) for its head p(x).
    """
    label = defmod_label(module)

    def inapplicable(reason: str) -> ReductionResult:
        return ReductionResult(kind=ReductionKind.CHOICE, applicable=False, reason=reason, module=label)

    if not is_tight(module):
        return inapplicable(_cycle_reason(module))
    heads = [r for r in module.rules if not r.is_denial]
    if not heads:
        return inapplicable("no choice rules")
    for rule in heads:
        if not _is_choice_shaped(rule):
            return inapplicable(f"not a choice rule: {format_rule(rule)}")
        if rule.head_atoms[0].pred not in module.intensional:
            return inapplicable(f"head of {format_rule(rule)} is not intensional")

    parts = []
    for pred in sorted_symbols(module.intensional):
        if not _rules_for(module, pred):
            arguments = _fresh_arguments(module, pred.arity)
            parts.append(forall(arguments, neg(Atom(pred=pred, args=arguments))))
            continue
        arguments = _head_arguments(module, pred)
        support = _supports(module, pred, arguments, drop_guard=True)
        parts.append(forall(arguments, implies(Atom(pred=pred, args=arguments), support)))
    parts.extend(rule_to_formula(r) for r in module.denials())
    return ReductionResult(kind=ReductionKind.CHOICE, applicable=True, residual=conjoin(parts), module=label)


def negation_violation(module: DefModule) -> Optional[Rule]:
    """First rule that keeps the module from being negation-free."""
    for rule in module.rules:
        if rule.is_denial or rule.choice_flag or not rule.is_negation_free:
            return rule
    return None


def circumscription_result(module: DefModule) -> ReductionResult:
    """CIRC_p[F] as a second-order formula, for negation-free modules."""
    label = defmod_label(module)
    offending = negation_violation(module)
    if offending is not None:
        return ReductionResult(kind=ReductionKind.CIRCUMSCRIPTION, applicable=False,
                               reason=f"negation in {format_rule(offending)}", module=label)
    residual = circumscription(sorted_symbols(module.intensional), rules_formula(module.rules))
    return ReductionResult(kind=ReductionKind.CIRCUMSCRIPTION, applicable=True, residual=residual, module=label)


def circumscribe(module: DefModule, domain: Domain, fixed: Optional[Interpretation] = None,
                 max_branch: int = 1_000_000) -> List[Interpretation]:
    """
    Models of the module's rules extending fixed whose intensional extents are minimal.

    Raises:
        CircumscriptionError: naming the first rule with negation
    """
    offending = negation_violation(module)
    if offending is not None:
        raise CircumscriptionError(f"circumscription needs negation-free rules; found {format_rule(offending)}")
    base = {p: t for p, t in (fixed.extents if fixed else {}).items() if p not in module.intensional}
    models = minimal_models(module.rules, module.intensional, domain, base, max_branch)
    return sorted(
        (Interpretation(domain=domain, extents={**base, **m}) for m in models),
        key=interpretation_key,
    )


def reductions_for(module: DefModule) -> List[ReductionResult]:
    """Every reduction attempted on the module, in a fixed order."""
    label = defmod_label(module)
    denials = module.denials()
    if denials:
        extracted = ReductionResult(kind=ReductionKind.DENIALS, applicable=True,
                                    residual=rules_formula(denials), module=label)
    else:
        extracted = ReductionResult(kind=ReductionKind.DENIALS, applicable=False,
                                    reason="no denials", module=label)
    return [extracted, completion(module), reduce_choice(module), circumscription_result(module)]


# ---------------------------------------------------------------------------
# verification against the stable models

def _stable_models(module: DefModule, domain: Domain, fixed: Extents, max_branch: int) -> List[Interpretation]:
    return sorted(
        (Interpretation(domain=domain, extents={**fixed, **m})
         for m in stable_extents(module.rules, module.intensional, domain, fixed, max_branch)),
        key=interpretation_key,
    )


def verify_reduction(module: DefModule, result: ReductionResult, domain: Domain,
                     max_branch: int = 1_000_000) -> bool:
    """
    Whether the reduction leaves the module's models unchanged on domain.

    Every extensional assignment is tried; for each, the stable models are
    compared with the models the reduction describes.
    """
    if not result.applicable:
        return True
    intensional = sorted_symbols(module.intensional)
    extensional = sorted_symbols(predicates_of(module) - module.intensional)
    non_denials, denials = extract_denials(module)
    for fixed in all_extents(extensional, domain, max_branch):
        expected = _stable_models(module, domain, fixed, max_branch)
        context = Interpretation(domain=domain, extents=fixed)
        if result.kind == ReductionKind.DENIALS:
            candidates = _stable_models(non_denials, domain, fixed, max_branch)
            actual = [m for m in candidates if evaluate(denials, m)]
        elif result.kind == ReductionKind.CIRCUMSCRIPTION:
            actual = circumscribe(module, domain, context, max_branch)
        else:
            actual = classical_models(result.residual, intensional, domain, context)
        if actual != expected:
            logger.warning(f"{result.kind.value} changes the models of {result.module} under {fixed}")
            return False
    return True
