"""
Parser for modular programs and instance files.

The grammar is LALR; a transformer turns the parse tree into the pydantic
syntax models. Syntax errors, duplicate #show declarations and unsafe rules
are reported as located Diagnostics inside a ParseError.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from ..exceptions import ParseError
from ..models import (
    Atom,
    Comparison,
    ComparisonOp,
    DefModule,
    Diagnostic,
    ModularProgram,
    PredicateSymbol,
    Rule,
    Severity,
    SourceKind,
    SourceUnit,
    Variable,
)
from .formulas import predicates_of, term, unsafe_variables

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    start: _item*

    _item: module
         | defblock
         | rule
         | show

    show: "#show" predlist "."

    module: "module" modname "show" predlist "{" _item* "}"
    modname: NAME | VARIABLE

    defblock: "def" label? predlist "{" rule* "}"
    label: (NAME | VARIABLE) ":"

    predlist: (predspec ("," predspec)*)?
    predspec: NAME "/" INT

    rule: head ":-" body "."
        | head "."
        | ":-" body "."

    head: atom (";" atom)*      -> disjunctive_head
        | "{" atom "}"          -> choice_head

    body: literal ("," literal)*

    literal: atom               -> positive
           | "not" atom         -> negative
           | "not" "not" atom   -> double_negative
           | term COMPARE term  -> comparison

    atom: NAME ("(" term ("," term)* ")")?

    term: NAME | VARIABLE

    COMPARE: "!=" | "="
    NAME: /[a-z][A-Za-z0-9_]*/
    VARIABLE: /[A-Z_][A-Za-z0-9_]*/
    COMMENT: /%[^\n]*/

    %import common.INT
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True)

ANONYMOUS_MODULE = "_"


@dataclass(frozen=True)
class _Head:
    atoms: Tuple[Atom, ...]
    choice: bool


@dataclass(frozen=True)
class _Located:
    node: Union[Rule, DefModule, ModularProgram]
    line: int
    column: int


@dataclass(frozen=True)
class _Show:
    symbols: frozenset
    line: int
    column: int


class _ProgramBuilder(Transformer):
    """Builds syntax models bottom-up and collects diagnostics on the way."""

    def __init__(self, path: str):
        super().__init__()
        self.path = path
        self.diagnostics: List[Diagnostic] = []
        self._variable_positions = {}

    def _report(self, severity: Severity, message: str, line: int, column: int) -> None:
        self.diagnostics.append(
            Diagnostic(severity=severity, message=message, line=line, column=column, path=self.path)
        )

    # terms and atoms

    def term(self, children):
        token: Token = children[0]
        value = term(str(token))
        if isinstance(value, Variable) and value.name not in self._variable_positions:
            self._variable_positions[value.name] = (token.line, token.column)
        return value

    def atom(self, children):
        name, *args = children
        return Atom(pred=PredicateSymbol(name=str(name), arity=len(args)), args=tuple(args))

    def positive(self, children):
        return ("positive", children[0])

    def negative(self, children):
        return ("negative", children[0])

    def double_negative(self, children):
        return ("double", children[0])

    def comparison(self, children):
        left, op, right = children
        return ("comparison", Comparison(left=left, op=ComparisonOp(str(op)), right=right))

    def body(self, children):
        return list(children)

    def disjunctive_head(self, children):
        return _Head(atoms=tuple(children), choice=False)

    def choice_head(self, children):
        return _Head(atoms=tuple(children), choice=True)

    @v_args(meta=True)
    def rule(self, meta, children):
        head = next((c for c in children if isinstance(c, _Head)), None)
        body = next((c for c in children if isinstance(c, list)), [])
        parts = {"positive": [], "negative": [], "double": [], "comparison": []}
        for kind, item in body:
            parts[kind].append(item)
        rule = Rule(
            head_atoms=head.atoms if head else (),
            choice_flag=head.choice if head else False,
            positive_body=tuple(parts["positive"]),
            negative_body=tuple(parts["negative"]),
            double_negated_body=tuple(parts["double"]),
            comparisons=tuple(parts["comparison"]),
        )
        unsafe = unsafe_variables(rule)
        if unsafe:
            line, column = self._variable_positions.get(unsafe[0].name, (meta.line, meta.column))
            self._report(
                Severity.ERROR,
                f"unsafe rule: variable {unsafe[0].name} does not occur in a positive body atom",
                line,
                column,
            )
        self._variable_positions = {}
        return _Located(node=rule, line=meta.line, column=meta.column)

    # declarations

    def predspec(self, children):
        name, arity = children
        return PredicateSymbol(name=str(name), arity=int(arity))

    def predlist(self, children):
        return frozenset(children)

    def label(self, children):
        return str(children[0])

    def modname(self, children):
        name = str(children[0])
        return None if name == ANONYMOUS_MODULE else name

    @v_args(meta=True)
    def show(self, meta, children):
        return _Show(symbols=children[0], line=meta.line, column=meta.column)

    @v_args(meta=True)
    def defblock(self, meta, children):
        label = children[0] if isinstance(children[0], str) else None
        intensional = next(c for c in children if isinstance(c, frozenset))
        rules = [c for c in children if isinstance(c, _Located)]
        for located in rules:
            outside = sorted(
                str(a.pred) for a in located.node.head_atoms if a.pred not in intensional
            )
            if outside:
                self._report(
                    Severity.WARNING,
                    f"head predicate {outside[0]} is not in the intensional list of this def block",
                    located.line,
                    located.column,
                )
        module = DefModule(intensional=intensional, rules=tuple(r.node for r in rules), name=label)
        return _Located(node=module, line=meta.line, column=meta.column)

    @v_args(meta=True)
    def module(self, meta, children):
        name, public, *items = children
        for item in items:
            if isinstance(item, _Show):
                self._report(Severity.ERROR, "#show is only allowed at the top level", item.line, item.column)
        program = ModularProgram(public=public, members=_members(items), name=name)
        return _Located(node=program, line=meta.line, column=meta.column)

    def start(self, children):
        return list(children)


def _members(items: list) -> Tuple[Union[DefModule, ModularProgram], ...]:
    """Members of one nesting level; bare rules become one implicit def-module at the first rule's place."""
    members: List[Union[DefModule, ModularProgram, None]] = []
    bare: List[Rule] = []
    slot: Optional[int] = None
    for item in items:
        if not isinstance(item, _Located):
            continue
        if isinstance(item.node, Rule):
            if slot is None:
                slot = len(members)
                members.append(None)
            bare.append(item.node)
        else:
            members.append(item.node)
    if slot is not None:
        implicit = DefModule(rules=tuple(bare))
        members[slot] = implicit.model_copy(update={"intensional": predicates_of(implicit)})
    return tuple(members)  # type: ignore[arg-type]


def _syntax_diagnostic(error: UnexpectedInput, source: SourceUnit) -> Diagnostic:
    if isinstance(error, UnexpectedCharacters):
        message = f"unexpected character {source.content[error.pos_in_stream]!r}"
        line, column = error.line, error.column
    elif isinstance(error, UnexpectedEOF):
        message = "unexpected end of input"
        lines = source.content.splitlines() or [""]
        line, column = len(lines), max(len(lines[-1]), 1)
    elif isinstance(error, UnexpectedToken):
        expected = ", ".join(sorted(error.accepts or error.expected))
        message = f"unexpected {error.token!s:.20}"
        if expected:
            message += f"; expected one of: {expected}"
        line, column = error.line, error.column
    else:
        message = "syntax error"
        line, column = getattr(error, "line", 1), getattr(error, "column", 1)
    return Diagnostic(
        severity=Severity.ERROR,
        message=message,
        line=max(line or 1, 1),
        column=max(column or 1, 1),
        path=source.path,
    )


def _parse_items(source: SourceUnit) -> Tuple[list, List[Diagnostic]]:
    try:
        tree = _parser.parse(source.content)
    except UnexpectedInput as e:
        diagnostic = _syntax_diagnostic(e, source)
        raise ParseError(diagnostic.message, diagnostics=[diagnostic]) from e
    builder = _ProgramBuilder(source.path)
    try:
        items = builder.transform(tree)
    except VisitError as e:
        # model validation inside a callback, e.g. a choice head with several atoms
        raise ParseError(f"{source.path}: {e.orig_exc}") from e
    return items, builder.diagnostics


def _raise_on_errors(diagnostics: List[Diagnostic]) -> None:
    errors = [d for d in diagnostics if d.severity == Severity.ERROR]
    if errors:
        raise ParseError(str(errors[0]), diagnostics=errors)


def parse_program_with_diagnostics(source: SourceUnit) -> Tuple[ModularProgram, List[Diagnostic]]:
    """
    Parse a program file.

    Returns:
        The program tree and the warnings met while parsing

    Raises:
        ParseError: on syntax errors, misplaced or duplicate #show, unsafe rules
    """
    items, diagnostics = _parse_items(source)
    shows = [item for item in items if isinstance(item, _Show)]
    for duplicate in shows[1:]:
        diagnostics.append(
            Diagnostic(
                severity=Severity.ERROR,
                message="duplicate #show declaration",
                line=duplicate.line,
                column=duplicate.column,
                path=source.path,
            )
        )
    _raise_on_errors(diagnostics)

    members = _members(items)
    public = shows[0].symbols if shows else predicates_of(ModularProgram(members=members))
    program = ModularProgram(public=public, members=members)
    return program, diagnostics


def parse_program(source: Union[SourceUnit, str]) -> ModularProgram:
    """Parse a program file, logging warnings. Strings are taken as program text."""
    if isinstance(source, str):
        source = SourceUnit(content=source)
    program, diagnostics = parse_program_with_diagnostics(source)
    for diagnostic in diagnostics:
        logger.warning(str(diagnostic))
    return program


def parse_instance(source: Union[SourceUnit, str]) -> DefModule:
    """
    Parse an instance file of ground facts.

    Returns:
        The def-module whose intensional set is the fact predicates

    Raises:
        ParseError: on anything other than ground facts
    """
    if isinstance(source, str):
        source = SourceUnit(content=source, kind=SourceKind.INSTANCE)
    items, diagnostics = _parse_items(source)
    for item in items:
        line, column = item.line, item.column
        if not isinstance(item, _Located) or not isinstance(item.node, Rule):
            message = "instance files contain facts only"
        elif not item.node.is_fact:
            message = "instance files contain facts only"
        elif any(isinstance(t, Variable) for t in item.node.head_atoms[0].args):
            message = "non-ground fact"
        else:
            continue
        diagnostic = Diagnostic(
            severity=Severity.ERROR, message=message, line=line, column=column, path=source.path
        )
        raise ParseError(str(diagnostic), diagnostics=[diagnostic])
    _raise_on_errors(diagnostics)

    members = _members(items)
    return members[0] if members else DefModule()
