"""
Compilation of modular programs into second-order formulas.

star and sm implement the stable model operator, hide quantifies hidden
predicates away, and phi applies both recursively over the program tree.
"""

import itertools
import logging
from typing import Iterable, List, Sequence, Tuple

from ..exceptions import OccurrenceError, SecondOrderError
from ..models import (
    And,
    Atom,
    Bottom,
    DefModule,
    Equal,
    ExistsFO,
    ExistsSO,
    ForallFO,
    ForallSO,
    Formula,
    Implies,
    Member,
    ModularProgram,
    Or,
    PredicateSymbol,
    PredicateVariable,
    PredVarAtom,
    StarContext,
    Variable,
)
from ..utils.helpers import sorted_symbols
from .formulas import (
    conjoin,
    contains_member,
    defmods,
    forall,
    implies,
    neg,
    predicates_of,
    rename_predicates,
    rules_formula,
)

logger = logging.getLogger(__name__)

_fresh = itertools.count(1)


def fresh_variable(pred: PredicateSymbol) -> PredicateVariable:
    """A predicate variable named after pred that no earlier call returned."""
    return PredicateVariable(name=f"{pred.name}__{next(_fresh)}", arity=pred.arity)


def star_context(preds: Iterable[PredicateSymbol]) -> StarContext:
    return StarContext(mapping={p: fresh_variable(p) for p in preds})


def star(f: Formula, ctx: StarContext) -> Formula:
    """
    The starred formula F*(u).

    Raises:
        SecondOrderError: if f contains predicate variables or second-order quantifiers
    """
    match f:
        case Atom(pred=pred, args=args):
            var = ctx.mapping.get(pred)
            return PredVarAtom(var=var, args=args) if var else f
        case Equal() | Bottom():
            return f
        case And(left=l, right=r):
            return And(left=star(l, ctx), right=star(r, ctx))
        case Or(left=l, right=r):
            return Or(left=star(l, ctx), right=star(r, ctx))
        case Implies(left=l, right=r):
            return And(left=Implies(left=star(l, ctx), right=star(r, ctx)), right=f)
        case ForallFO(var=v, body=b):
            return ForallFO(var=v, body=star(b, ctx))
        case ExistsFO(var=v, body=b):
            return ExistsFO(var=v, body=star(b, ctx))
    raise SecondOrderError(f"star expects a first-order formula, got {type(f).__name__}")


def _arguments(arity: int) -> Tuple[Variable, ...]:
    return tuple(Variable(name=f"X{i}") for i in range(1, arity + 1))


def _pointwise(sources: Sequence[Formula], targets: Sequence[Formula], variables) -> Formula:
    return conjoin(
        forall(xs, implies(s, t)) for s, t, xs in zip(sources, targets, variables)
    )


def _comparison_parts(preds: Sequence[PredicateSymbol], ctx: StarContext) -> Tuple[Formula, Formula]:
    """The formulas U <= p and p <= U."""
    variables = [_arguments(p.arity) for p in preds]
    p_atoms = [Atom(pred=p, args=xs) for p, xs in zip(preds, variables)]
    u_atoms = [PredVarAtom(var=ctx.mapping[p], args=xs) for p, xs in zip(preds, variables)]
    return _pointwise(u_atoms, p_atoms, variables), _pointwise(p_atoms, u_atoms, variables)


def _exists_so(variables: Iterable[PredicateVariable], body: Formula) -> Formula:
    for var in reversed(list(variables)):
        body = ExistsSO(var=var, body=body)
    return body


def sm(preds: Sequence[PredicateSymbol], f: Formula) -> Formula:
    """
    SM_p[F] = F & not exists U (U < p & F*(U)).

    U < p is expanded to (U <= p) & not (p <= U). With no intensional
    symbols the formula is returned unchanged.
    """
    preds = list(dict.fromkeys(preds))
    if not preds:
        return f
    ctx = star_context(preds)
    below, above = _comparison_parts(preds, ctx)
    smaller = And(left=below, right=neg(above))
    witness = _exists_so(ctx.mapping.values(), And(left=smaller, right=star(f, ctx)))
    return And(left=f, right=neg(witness))


def circumscription(preds: Sequence[PredicateSymbol], f: Formula) -> Formula:
    """CIRC_p[F] = F & not exists U (U < p & F(U))."""
    preds = list(dict.fromkeys(preds))
    if not preds:
        return f
    ctx = star_context(preds)
    below, above = _comparison_parts(preds, ctx)
    smaller = And(left=below, right=neg(above))
    replaced = rename_predicates(f, ctx.mapping)
    witness = _exists_so(ctx.mapping.values(), And(left=smaller, right=replaced))
    return And(left=f, right=neg(witness))


def hide(preds: Sequence[PredicateSymbol], f: Formula, fresh: bool = True) -> Formula:
    """
    Existentially quantify the symbols preds away.

    Each symbol becomes a predicate variable, fresh unless fresh is False,
    in which case it keeps the symbol's own name.
    """
    preds = list(dict.fromkeys(preds))
    if not preds:
        return f
    if fresh:
        mapping = {p: fresh_variable(p) for p in preds}
    else:
        mapping = {p: PredicateVariable(name=p.name, arity=p.arity) for p in preds}
    return _exists_so(mapping.values(), rename_predicates(f, mapping))


def phi(node: Member, fresh: bool = True) -> Formula:
    """
    The second-order formula of a def-module or modular program.

    A def-module (q : F) maps to SM_q[F]. A program <S, M> maps to the
    conjunction of its members' formulas with every free symbol outside S
    hidden.
    """
    if isinstance(node, DefModule):
        return sm(sorted_symbols(node.intensional), rules_formula(node.rules))
    body = conjoin(phi(m, fresh) for m in node.members)
    hidden = sorted_symbols(predicates_of(body) - node.public)
    if hidden:
        logger.debug(f"hiding {', '.join(map(str, hidden))} in {node.name or '<program>'}")
    return hide(hidden, body, fresh)


def _defmod_set(node: Member) -> List[DefModule]:
    return [node] if isinstance(node, DefModule) else defmods(node)


def phi_minus(program: ModularProgram, target: Member) -> Formula:
    """
    Phi of program with target removed.

    Members sharing no def-module with target contribute their formula;
    a member enclosing target contributes its own phi_minus.

    Raises:
        OccurrenceError: if target does not occur in program
    """
    if not contains_member(program, target):
        raise OccurrenceError(f"module {getattr(target, 'name', None) or '<anonymous>'} does not occur in the program")
    removed = set(_defmod_set(target))
    parts: List[Formula] = []
    for member in program.members:
        if member == target:
            continue
        if removed.isdisjoint(_defmod_set(member)):
            parts.append(phi(member))
        elif isinstance(member, ModularProgram) and contains_member(member, target):
            parts.append(phi_minus(member, target))
    return conjoin(parts)


def rules_conjunction(program: Member) -> Formula:
    """Conjunction of the rule formulas of every def-module, in tree order."""
    return rules_formula(r for m in _defmod_set(program) for r in m.rules)


def bound_predicate_variables(f: Formula) -> List[PredicateVariable]:
    """Binders of second-order quantifiers, pre-order."""
    match f:
        case ForallSO(var=v, body=b) | ExistsSO(var=v, body=b):
            return [v] + bound_predicate_variables(b)
        case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
            return bound_predicate_variables(l) + bound_predicate_variables(r)
        case ForallFO(body=b) | ExistsFO(body=b):
            return bound_predicate_variables(b)
    return []
