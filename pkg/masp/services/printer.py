"""
Text rendering: programs in the concrete module syntax, formulas in the
ASCII smf format, interpretations in answer-set format.
"""

import itertools
import json
from typing import Dict, Iterable, List, Tuple

from ..models import (
    And,
    Atom,
    Bottom,
    CoherenceReport,
    Comparison,
    DefModule,
    DependencyGraph,
    Direction,
    Equal,
    EquivVerdict,
    ExistsFO,
    ExistsSO,
    ForallFO,
    ForallSO,
    Formula,
    Implies,
    Interpretation,
    ModularProgram,
    Or,
    PredicateVariable,
    PredVarAtom,
    ReductionResult,
    Rule,
    Term,
)
from ..utils.helpers import format_symbols, interpretation_atoms, sorted_symbols
from .formulas import is_negation, is_top

INDENT = "  "

_ATOMIC = 5
_NOT = 4
_AND = 3
_OR = 2
_ARROW = 1
_BINDER = 0


# ---------------------------------------------------------------------------
# programs

def format_terms(args: Iterable[Term]) -> str:
    args = list(args)
    if not args:
        return ""
    return "(" + ",".join(t.name for t in args) + ")"


def format_atom(a: Atom) -> str:
    return a.pred.name + format_terms(a.args)


def format_comparison(c: Comparison) -> str:
    return f"{c.left.name} {c.op.value} {c.right.name}"


def format_rule(rule: Rule) -> str:
    """One rule in concrete syntax, terminated by a period."""
    if rule.choice_flag:
        head = "{ " + format_atom(rule.head_atoms[0]) + " }"
    else:
        head = " ; ".join(format_atom(a) for a in rule.head_atoms)
    body = [format_atom(a) for a in rule.positive_body]
    body += ["not " + format_atom(a) for a in rule.negative_body]
    body += ["not not " + format_atom(a) for a in rule.double_negated_body]
    body += [format_comparison(c) for c in rule.comparisons]
    if not body:
        return head + "."
    if not head:
        return ":- " + ", ".join(body) + "."
    return head + " :- " + ", ".join(body) + "."


def _format_defblock(module: DefModule, depth: int) -> List[str]:
    pad = INDENT * depth
    header = "def "
    if module.name:
        header += module.name + ": "
    if module.intensional:
        header += format_symbols(module.intensional) + " "
    lines = [pad + header + "{"]
    lines += [pad + INDENT + format_rule(r) for r in module.rules]
    lines.append(pad + "}")
    return lines


def _format_module(program: ModularProgram, depth: int) -> List[str]:
    pad = INDENT * depth
    show = format_symbols(program.public)
    header = f"module {program.name or '_'} show"
    header += f" {show} {{" if show else " {"
    lines = [pad + header]
    lines += _format_members(program, depth + 1)
    lines.append(pad + "}")
    return lines


def _format_members(program: ModularProgram, depth: int) -> List[str]:
    lines: List[str] = []
    for member in program.members:
        if isinstance(member, DefModule):
            lines += _format_defblock(member, depth)
        else:
            lines += _format_module(member, depth)
    return lines


def print_program(program: ModularProgram) -> str:
    """
    Canonical program text.

    The root prints its public set as a #show line; implicit def-modules
    print as explicit def blocks; symbol lists are sorted.
    """
    show = format_symbols(program.public)
    lines = [f"#show {show}." if show else "#show."]
    lines += _format_members(program, 0)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# formulas

def _so_display_names(f: Formula) -> Dict[PredicateVariable, str]:
    """Positional display names for bound predicate variables, in binder order."""
    names: Dict[PredicateVariable, str] = {}
    counter = itertools.count(1)

    def walk(g: Formula) -> None:
        match g:
            case ForallSO(var=v, body=b) | ExistsSO(var=v, body=b):
                if v not in names:
                    base = v.name.split("__")[0] or "U"
                    names[v] = f"{base.upper()}{next(counter)}"
                walk(b)
            case And(left=l, right=r) | Or(left=l, right=r) | Implies(left=l, right=r):
                walk(l)
                walk(r)
            case ForallFO(body=b) | ExistsFO(body=b):
                walk(b)

    walk(f)
    return names


class _FormulaPrinter:
    def __init__(self, so_names: Dict[PredicateVariable, str]):
        self.so_names = so_names

    def wrap(self, f: Formula, minimum: int) -> str:
        text, prec = self.render(f)
        return f"({text})" if prec < minimum else text

    def var_name(self, v: PredicateVariable) -> str:
        return self.so_names.get(v, v.name)

    def chain(self, f: Formula, cls) -> List[Formula]:
        if isinstance(f, cls) and not self.is_iff(f):
            return self.chain(f.left, cls) + self.chain(f.right, cls)
        return [f]

    @staticmethod
    def is_iff(f: Formula) -> bool:
        return (
            isinstance(f, And)
            and isinstance(f.left, Implies)
            and isinstance(f.right, Implies)
            and not is_negation(f.left)
            and not is_negation(f.right)
            and f.left.left == f.right.right
            and f.left.right == f.right.left
        )

    def binder(self, f: Formula, keyword: str, cls) -> Tuple[str, int]:
        names = []
        while isinstance(f, cls):
            if isinstance(f.var, PredicateVariable):
                names.append(f"{self.var_name(f.var)}/{f.var.arity}")
            else:
                names.append(f.var.name)
            f = f.body
        text, _ = self.render(f)
        return f"{keyword} {' '.join(names)} ({text})", _BINDER

    def render(self, f: Formula) -> Tuple[str, int]:
        if is_top(f):
            return "top", _ATOMIC
        if is_negation(f):
            inner = f.left
            if isinstance(inner, Equal):
                return f"{inner.left.name} != {inner.right.name}", _ATOMIC
            return "not " + self.wrap(inner, _NOT), _NOT
        if self.is_iff(f):
            return f"{self.wrap(f.left.left, _ARROW + 1)} <-> {self.wrap(f.left.right, _ARROW + 1)}", _ARROW
        match f:
            case Bottom():
                return "bot", _ATOMIC
            case Atom():
                return format_atom(f), _ATOMIC
            case PredVarAtom(var=v, args=args):
                return self.var_name(v) + format_terms(args), _ATOMIC
            case Equal(left=l, right=r):
                return f"{l.name} = {r.name}", _ATOMIC
            case And():
                return " & ".join(self.wrap(c, _AND) for c in self.chain(f, And)), _AND
            case Or():
                return " | ".join(self.wrap(c, _OR) for c in self.chain(f, Or)), _OR
            case Implies(left=l, right=r):
                return f"{self.wrap(l, _ARROW + 1)} -> {self.wrap(r, _ARROW + 1)}", _ARROW
            case ForallFO():
                return self.binder(f, "forall", ForallFO)
            case ExistsFO():
                return self.binder(f, "exists", ExistsFO)
            case ForallSO():
                return self.binder(f, "forallP", ForallSO)
            case ExistsSO():
                return self.binder(f, "existsP", ExistsSO)
        raise TypeError(f"cannot print {type(f).__name__}")


def format_formula(f: Formula) -> str:
    """Formula in the ASCII smf format, bound predicate variables renamed positionally."""
    text, _ = _FormulaPrinter(_so_display_names(f)).render(f)
    return text


# ---------------------------------------------------------------------------
# interpretations

def format_answer_sets(answers: List[Interpretation]) -> str:
    """Answer sets as `Answer: k` lines each followed by the atoms."""
    lines = []
    for index, answer in enumerate(answers, start=1):
        lines.append(f"Answer: {index}")
        lines.append(" ".join(interpretation_atoms(answer)))
    return "\n".join(lines)


def answers_json(answers: List[Interpretation]) -> str:
    """Answer sets as a compact JSON array of atom-text arrays."""
    return json.dumps([interpretation_atoms(a) for a in answers], separators=(",", ":"))


# ---------------------------------------------------------------------------
# reports

def format_dot(graph: DependencyGraph) -> str:
    """DOT digraph with nodes and edges in canonical order; extensional nodes dashed."""
    lines = ["digraph {"]
    for node in sorted_symbols(graph.nodes):
        lines.append(f'{INDENT}"{node.name}";')
    for node in sorted_symbols(graph.extensional):
        lines.append(f'{INDENT}"{node.name}" [style=dashed];')
    for head, body in sorted(graph.edges, key=lambda e: (e[0].key, e[1].key)):
        lines.append(f'{INDENT}"{head.name}" -> "{body.name}";')
    lines.append("}")
    return "\n".join(lines)


def format_coherence(report: CoherenceReport, tight: List[str], non_tight: List[str]) -> str:
    lines = [
        f"coherent: {'yes' if report.coherent else 'no'}; "
        f"tight modules: {' '.join(tight) or '-'}; non-tight: {' '.join(non_tight) or '-'}"
    ]
    lines.extend(str(d) for d in report.violations)
    return "\n".join(lines)


def format_reduction(result: ReductionResult) -> str:
    if result.applicable:
        return f"{result.module} {result.kind.value}: {format_formula(result.residual)}"
    return f"{result.module} {result.kind.value}: not applicable ({result.reason})"


def format_verdict(verdict: EquivVerdict) -> str:
    if verdict.equivalent:
        return f"equivalent up to bound {verdict.bound} ({verdict.checked} interpretations checked)"
    side = "left" if verdict.direction == Direction.LEFT_ONLY else "right"
    atoms = " ".join(interpretation_atoms(verdict.witness)) or "(empty interpretation)"
    return f"counterexample over {verdict.bound}: holds in the {side} program only\n{atoms}"


def verdict_json(verdict: EquivVerdict) -> str:
    payload = {
        "status": verdict.status.value,
        "bound": list(verdict.bound.constants),
        "checked": verdict.checked,
        "direction": verdict.direction.value if verdict.direction else None,
        "witness": interpretation_atoms(verdict.witness) if verdict.witness else None,
    }
    return json.dumps(payload, separators=(",", ":"), sort_keys=True)
