"""
Operations on the abstract syntax: formula builders, rule desugaring,
signature extraction, predicate renaming and alpha-equivalence.
"""

import itertools
from functools import reduce
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from ..exceptions import ArityError, SafetyError
from ..models import (
    BOTTOM,
    TOP,
    And,
    Atom,
    Bottom,
    Comparison,
    ComparisonOp,
    Constant,
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
    Rule,
    Term,
    Variable,
)
from ..utils.helpers import is_variable_name, symbol_key

Node = Union[Formula, Rule, DefModule, ModularProgram]
PredicateTarget = Union[PredicateSymbol, PredicateVariable]


# ---------------------------------------------------------------------------
# builders

def term(text: str) -> Term:
    """Constant or variable according to the lexical convention."""
    return Variable(name=text) if is_variable_name(text) else Constant(name=text)


def atom(name: str, *args: str) -> Atom:
    """Shorthand: atom("in", "X", "b") is in(X,b)."""
    return Atom(pred=PredicateSymbol(name=name, arity=len(args)), args=tuple(term(a) for a in args))


def neg(f: Formula) -> Formula:
    return Implies(left=f, right=BOTTOM)


def implies(left: Formula, right: Formula) -> Formula:
    return Implies(left=left, right=right)


def iff(left: Formula, right: Formula) -> Formula:
    return And(left=Implies(left=left, right=right), right=Implies(left=right, right=left))


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is top."""
    items = list(formulas)
    if not items:
        return TOP
    return reduce(lambda acc, f: And(left=acc, right=f), items)


def disjoin(formulas: Iterable[Formula]) -> Formula:
    """Left-nested disjunction; the empty disjunction is bottom."""
    items = list(formulas)
    if not items:
        return BOTTOM
    return reduce(lambda acc, f: Or(left=acc, right=f), items)


def forall(variables: Sequence[Variable], body: Formula) -> Formula:
    for var in reversed(variables):
        body = ForallFO(var=var, body=body)
    return body


def exists(variables: Sequence[Variable], body: Formula) -> Formula:
    for var in reversed(variables):
        body = ExistsFO(var=var, body=body)
    return body


def is_negation(f: Formula) -> bool:
    return isinstance(f, Implies) and isinstance(f.right, Bottom)


def is_top(f: Formula) -> bool:
    return f == TOP


def conjuncts(f: Formula) -> List[Formula]:
    """Operands of a (nested) conjunction."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def comparison_formula(comparison: Comparison) -> Formula:
    equality = Equal(left=comparison.left, right=comparison.right)
    if comparison.op == ComparisonOp.NEQ:
        return neg(equality)
    return equality


# ---------------------------------------------------------------------------
# rules

def unsafe_variables(rule: Rule) -> List[Variable]:
    """Variables of the rule that occur in no positive body atom."""
    bound = {t for a in rule.positive_body for t in a.args if isinstance(t, Variable)}
    return [v for v in rule.variables() if v not in bound]


def rule_body(rule: Rule) -> List[Formula]:
    """Body conjuncts in desugaring order: choice guard, positive, negative, double-negated, comparisons."""
    body: List[Formula] = []
    if rule.choice_flag:
        body.append(neg(neg(rule.head_atoms[0])))
    body.extend(rule.positive_body)
    body.extend(neg(a) for a in rule.negative_body)
    body.extend(neg(neg(a)) for a in rule.double_negated_body)
    body.extend(comparison_formula(c) for c in rule.comparisons)
    return body


def rule_to_formula(rule: Rule) -> Formula:
    """
    Universally closed implication body -> head.

    A choice head {a} contributes the guard not not a to the body, an empty
    head yields bottom, and a rule with empty body is its bare head.

    Raises:
        SafetyError: if a variable does not occur in a positive body atom
    """
    unsafe = unsafe_variables(rule)
    if unsafe:
        raise SafetyError(
            f"unsafe rule: variable {unsafe[0].name} does not occur in a positive body atom",
            variable=unsafe[0].name,
        )
    head = disjoin(rule.head_atoms)
    body = rule_body(rule)
    matrix = implies(conjoin(body), head) if body else head
    return forall(rule.variables(), matrix)


def rules_formula(rules: Iterable[Rule]) -> Formula:
    return conjoin(rule_to_formula(r) for r in rules)


# ---------------------------------------------------------------------------
# traversal of program trees

def iter_defmods(program: ModularProgram, path: Tuple[str, ...] = ()) -> Iterator[Tuple[Tuple[str, ...], DefModule]]:
    """Def-modules of the tree in member order, with the names of enclosing modules."""
    here = path + ((program.name,) if program.name else ())
    for member in program.members:
        if isinstance(member, DefModule):
            yield here, member
        else:
            yield from iter_defmods(member, here)


def defmods(program: ModularProgram) -> List[DefModule]:
    return [m for _, m in iter_defmods(program)]


def iter_modules(program: ModularProgram) -> Iterator[ModularProgram]:
    """All program nodes, pre-order."""
    yield program
    for member in program.members:
        if isinstance(member, ModularProgram):
            yield from iter_modules(member)


def find_member(program: ModularProgram, name: str) -> Optional[Member]:
    """First def-module label or module name equal to name, pre-order."""
    for node in iter_modules(program):
        if node.name == name:
            return node
        for member in node.members:
            if isinstance(member, DefModule) and member.name == name:
                return member
    return None


def contains_member(program: ModularProgram, target: Member) -> bool:
    if program == target:
        return True
    for member in program.members:
        if member == target:
            return True
        if isinstance(member, ModularProgram) and contains_member(member, target):
            return True
    return False


def defmod_label(module: DefModule, index: Optional[int] = None) -> str:
    """Display label: the given name, else the intensional list, else a positional tag."""
    if module.name:
        return module.name
    if module.intensional:
        return "def(" + ",".join(str(p) for p in sorted(module.intensional, key=symbol_key)) + ")"
    return f"denials#{index}" if index is not None else "denials"


def intensional_symbols(program: ModularProgram) -> FrozenSet[PredicateSymbol]:
    """int(program): union of the intensional sets of its def-modules."""
    return frozenset(p for m in defmods(program) for p in m.intensional)


# ---------------------------------------------------------------------------
# signatures

def _formula_predicates(f: Formula, out: Set[PredicateSymbol]) -> None:
    match f:
        case Atom(pred=pred):
            out.add(pred)
        case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
            _formula_predicates(l, out)
            _formula_predicates(r, out)
        case ForallFO(body=b) | ExistsFO(body=b) | ForallSO(body=b) | ExistsSO(body=b):
            _formula_predicates(b, out)


def predicates_of(node: Node) -> FrozenSet[PredicateSymbol]:
    """
    Predicate symbols occurring in a formula, rule, def-module or program.

    For formulas these are the free symbols: equality and predicate
    variables are not symbols. For def-modules the intensional set is
    included; for programs the symbols of all def-modules are collected.
    """
    out: Set[PredicateSymbol] = set()
    if isinstance(node, Formula):
        _formula_predicates(node, out)
    elif isinstance(node, Rule):
        out.update(a.pred for a in node.atoms())
    elif isinstance(node, DefModule):
        out.update(node.intensional)
        for rule in node.rules:
            out.update(a.pred for a in rule.atoms())
    else:
        for module in defmods(node):
            out.update(predicates_of(module))
    return frozenset(out)


def free_variables(f: Formula) -> FrozenSet[Variable]:
    """Free first-order variables."""
    match f:
        case Atom(args=args) | PredVarAtom(args=args):
            return frozenset(t for t in args if isinstance(t, Variable))
        case Equal(left=l, right=r):
            return frozenset(t for t in (l, r) if isinstance(t, Variable))
        case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
            return free_variables(l) | free_variables(r)
        case ForallFO(var=v, body=b) | ExistsFO(var=v, body=b):
            return free_variables(b) - {v}
        case ForallSO(body=b) | ExistsSO(body=b):
            return free_variables(b)
    return frozenset()


def free_predicate_variables(f: Formula) -> FrozenSet[PredicateVariable]:
    match f:
        case PredVarAtom(var=v):
            return frozenset({v})
        case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
            return free_predicate_variables(l) | free_predicate_variables(r)
        case ForallFO(body=b) | ExistsFO(body=b):
            return free_predicate_variables(b)
        case ForallSO(var=v, body=b) | ExistsSO(var=v, body=b):
            return free_predicate_variables(b) - {v}
    return frozenset()


def is_first_order(f: Formula) -> bool:
    match f:
        case PredVarAtom() | ForallSO() | ExistsSO():
            return False
        case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
            return is_first_order(l) and is_first_order(r)
        case ForallFO(body=b) | ExistsFO(body=b):
            return is_first_order(b)
    return True


def _terms_constants(terms: Iterable[Term]) -> Set[str]:
    return {t.name for t in terms if isinstance(t, Constant)}


def constants_of(node: Union[Node, Iterable[Node]]) -> FrozenSet[str]:
    """Constant names occurring anywhere in the node(s)."""
    out: Set[str] = set()

    def visit(n) -> None:
        match n:
            case Atom(args=args) | PredVarAtom(args=args):
                out.update(_terms_constants(args))
            case Equal(left=l, right=r):
                out.update(_terms_constants((l, r)))
            case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
                visit(l)
                visit(r)
            case ForallFO(body=b) | ExistsFO(body=b) | ForallSO(body=b) | ExistsSO(body=b):
                visit(b)
            case Rule():
                for a in n.atoms():
                    out.update(_terms_constants(a.args))
                for c in n.comparisons:
                    out.update(_terms_constants((c.left, c.right)))
            case DefModule():
                for r in n.rules:
                    visit(r)
            case ModularProgram():
                for m in n.members:
                    visit(m)

    if isinstance(node, (Formula, Rule, DefModule, ModularProgram)):
        visit(node)
    else:
        for item in node:
            visit(item)
    return frozenset(out)


# ---------------------------------------------------------------------------
# renaming

_fresh_binders = itertools.count(1)


def _check_mapping(mapping: Mapping[PredicateSymbol, PredicateTarget]) -> None:
    for source, target in mapping.items():
        if source.arity != target.arity:
            raise ArityError(f"cannot rename {source} to {target}: arity differs")


def _rename_atom(a: Atom, mapping: Mapping[PredicateSymbol, PredicateTarget]) -> Formula:
    target = mapping.get(a.pred)
    if target is None:
        return a
    if isinstance(target, PredicateVariable):
        return PredVarAtom(var=target, args=a.args)
    return Atom(pred=target, args=a.args)


def substitute_predicate_variable(f: Formula, old: PredicateVariable, new: PredicateVariable) -> Formula:
    """Replace free occurrences of one predicate variable by another."""
    match f:
        case PredVarAtom(var=v, args=args):
            return PredVarAtom(var=new, args=args) if v == old else f
        case And() | Or() | Implies():
            return type(f)(
                left=substitute_predicate_variable(f.left, old, new),
                right=substitute_predicate_variable(f.right, old, new),
            )
        case ForallFO(var=v, body=b) | ExistsFO(var=v, body=b):
            return type(f)(var=v, body=substitute_predicate_variable(b, old, new))
        case ForallSO(var=v, body=b) | ExistsSO(var=v, body=b):
            if v == old:
                return f
            return type(f)(var=v, body=substitute_predicate_variable(b, old, new))
    return f


def _rename_formula(f: Formula, mapping: Mapping[PredicateSymbol, PredicateTarget],
                    targets: FrozenSet[PredicateVariable]) -> Formula:
    match f:
        case Atom():
            return _rename_atom(f, mapping)
        case And() | Or() | Implies():
            return type(f)(
                left=_rename_formula(f.left, mapping, targets),
                right=_rename_formula(f.right, mapping, targets),
            )
        case ForallFO(var=v, body=b) | ExistsFO(var=v, body=b):
            return type(f)(var=v, body=_rename_formula(b, mapping, targets))
        case ForallSO(var=v, body=b) | ExistsSO(var=v, body=b):
            if v in targets:
                # the binder would capture a renamed occurrence
                fresh = PredicateVariable(name=f"{v.name}__b{next(_fresh_binders)}", arity=v.arity)
                b = substitute_predicate_variable(b, v, fresh)
                v = fresh
            return type(f)(var=v, body=_rename_formula(b, mapping, targets))
    return f


def _rename_rule(rule: Rule, mapping: Mapping[PredicateSymbol, PredicateTarget]) -> Rule:
    def atoms(seq: Tuple[Atom, ...]) -> Tuple[Atom, ...]:
        renamed = []
        for a in seq:
            target = mapping.get(a.pred)
            if isinstance(target, PredicateVariable):
                raise ArityError(f"rules cannot mention predicate variable {target}")
            renamed.append(Atom(pred=target, args=a.args) if target else a)
        return tuple(renamed)

    return rule.model_copy(update={
        "head_atoms": atoms(rule.head_atoms),
        "positive_body": atoms(rule.positive_body),
        "negative_body": atoms(rule.negative_body),
        "double_negated_body": atoms(rule.double_negated_body),
    })


def _rename_symbols(symbols: FrozenSet[PredicateSymbol],
                    mapping: Mapping[PredicateSymbol, PredicateTarget]) -> FrozenSet[PredicateSymbol]:
    return frozenset(mapping.get(p, p) for p in symbols)  # type: ignore[misc]


def rename_predicates(node: Node, mapping: Mapping[PredicateSymbol, PredicateTarget]) -> Node:
    """
    Capture-avoiding replacement of predicate symbols.

    Formulas may map symbols to predicate variables; rules, def-modules and
    programs take symbol-to-symbol maps only.

    Raises:
        ArityError: if the mapping changes an arity
    """
    _check_mapping(mapping)
    if not mapping:
        return node
    if isinstance(node, Formula):
        targets = frozenset(t for t in mapping.values() if isinstance(t, PredicateVariable))
        return _rename_formula(node, mapping, targets)
    if isinstance(node, Rule):
        return _rename_rule(node, mapping)
    if isinstance(node, DefModule):
        return node.model_copy(update={
            "intensional": _rename_symbols(node.intensional, mapping),
            "rules": tuple(_rename_rule(r, mapping) for r in node.rules),
        })
    return node.model_copy(update={
        "public": _rename_symbols(node.public, mapping),
        "members": tuple(rename_predicates(m, mapping) for m in node.members),
    })


# ---------------------------------------------------------------------------
# alpha-equivalence

def alpha_canonical(f: Formula) -> Formula:
    """Rename bound variables (both orders) to positional names."""
    fo_counter = itertools.count()
    so_counter = itertools.count()

    def term_of(t: Term, env: Dict[Variable, Variable]) -> Term:
        return env.get(t, t) if isinstance(t, Variable) else t

    def walk(g: Formula, env: Dict[Variable, Variable], so_env: Dict[PredicateVariable, PredicateVariable]) -> Formula:
        match g:
            case Atom(pred=p, args=args):
                return Atom(pred=p, args=tuple(term_of(t, env) for t in args))
            case PredVarAtom(var=v, args=args):
                return PredVarAtom(var=so_env.get(v, v), args=tuple(term_of(t, env) for t in args))
            case Equal(left=l, right=r):
                return Equal(left=term_of(l, env), right=term_of(r, env))
            case And() | Or() | Implies():
                return type(g)(left=walk(g.left, env, so_env), right=walk(g.right, env, so_env))
            case ForallFO(var=v, body=b) | ExistsFO(var=v, body=b):
                fresh = Variable(name=f"_V{next(fo_counter)}")
                return type(g)(var=fresh, body=walk(b, {**env, v: fresh}, so_env))
            case ForallSO(var=v, body=b) | ExistsSO(var=v, body=b):
                fresh = PredicateVariable(name=f"_P{next(so_counter)}", arity=v.arity)
                return type(g)(var=fresh, body=walk(b, env, {**so_env, v: fresh}))
        return g

    return walk(f, {}, {})


def alpha_equivalent(a: Formula, b: Formula) -> bool:
    return alpha_canonical(a) == alpha_canonical(b)
