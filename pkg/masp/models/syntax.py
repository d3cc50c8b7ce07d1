"""
Abstract syntax for terms, formulas, rules, def-modules and modular programs.

All nodes are frozen pydantic models: equality is structural and nodes are
hashable, so they can be shared freely between threads.
"""

from enum import Enum
from typing import Dict, FrozenSet, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Node(BaseModel):
    model_config = ConfigDict(frozen=True)


class PredicateSymbol(_Node):
    """Predicate symbol of the program signature."""

    name: str = Field(..., min_length=1, description="Symbol name")
    arity: int = Field(..., ge=0, description="Number of arguments")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"

    @property
    def key(self) -> Tuple[str, int]:
        return (self.name, self.arity)


class PredicateVariable(_Node):
    """Second-order variable ranging over relations of a fixed arity."""

    name: str = Field(..., min_length=1, description="Variable name")
    arity: int = Field(..., ge=0, description="Arity of the relations it ranges over")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"

    @property
    def key(self) -> Tuple[str, int]:
        return (self.name, self.arity)


class Constant(_Node):
    """Object constant (lowercase-initial in the concrete syntax)."""

    name: str = Field(..., min_length=1)

    def __str__(self) -> str:
        return self.name


class Variable(_Node):
    """First-order variable (uppercase-initial in the concrete syntax)."""

    name: str = Field(..., min_length=1)

    def __str__(self) -> str:
        return self.name


Term = Union[Constant, Variable]


class Formula(_Node):
    """Base class of all first- and second-order formulas."""


class Bottom(Formula):
    """Falsity. Negation and truth are encoded with it."""


class Atom(Formula):
    """Atom over a predicate symbol."""

    pred: PredicateSymbol
    args: Tuple[Term, ...] = ()

    @model_validator(mode="after")
    def _check_arity(self) -> "Atom":
        if len(self.args) != self.pred.arity:
            raise ValueError(f"{self.pred} applied to {len(self.args)} arguments")
        return self


class PredVarAtom(Formula):
    """Atom over a predicate variable."""

    var: PredicateVariable
    args: Tuple[Term, ...] = ()

    @model_validator(mode="after")
    def _check_arity(self) -> "PredVarAtom":
        if len(self.args) != self.var.arity:
            raise ValueError(f"{self.var} applied to {len(self.args)} arguments")
        return self


class Equal(Formula):
    left: Term
    right: Term


class And(Formula):
    left: Formula
    right: Formula


class Or(Formula):
    left: Formula
    right: Formula


class Implies(Formula):
    left: Formula
    right: Formula


class ForallFO(Formula):
    var: Variable
    body: Formula


class ExistsFO(Formula):
    var: Variable
    body: Formula


class ForallSO(Formula):
    var: PredicateVariable
    body: Formula


class ExistsSO(Formula):
    var: PredicateVariable
    body: Formula


BOTTOM = Bottom()
TOP = Implies(left=BOTTOM, right=BOTTOM)


class ComparisonOp(str, Enum):
    """Comparison operators allowed in rule bodies."""
    EQ = "="
    NEQ = "!="


class Comparison(_Node):
    """Body comparison between two terms."""

    left: Term
    op: ComparisonOp
    right: Term


class Rule(_Node):
    """A rule `head :- body.` with a disjunctive or choice head."""

    head_atoms: Tuple[Atom, ...] = Field(default=(), description="Disjunctive head; empty means bottom")
    choice_flag: bool = Field(default=False, description="Head written as {a}")
    positive_body: Tuple[Atom, ...] = ()
    negative_body: Tuple[Atom, ...] = ()
    double_negated_body: Tuple[Atom, ...] = ()
    comparisons: Tuple[Comparison, ...] = ()

    @model_validator(mode="after")
    def _check_choice(self) -> "Rule":
        if self.choice_flag and len(self.head_atoms) != 1:
            raise ValueError("a choice head holds exactly one atom")
        return self

    @property
    def is_denial(self) -> bool:
        return not self.head_atoms

    @property
    def is_fact(self) -> bool:
        return (
            len(self.head_atoms) == 1
            and not self.choice_flag
            and not self.positive_body
            and not self.negative_body
            and not self.double_negated_body
            and not self.comparisons
        )

    @property
    def is_negation_free(self) -> bool:
        return not self.negative_body and not self.double_negated_body

    def body_atoms(self) -> Tuple[Atom, ...]:
        return self.positive_body + self.negative_body + self.double_negated_body

    def atoms(self) -> Tuple[Atom, ...]:
        return self.head_atoms + self.body_atoms()

    def variables(self) -> Tuple[Variable, ...]:
        """Variables in order of first occurrence, head first."""
        seen = {}
        terms = [t for atom in self.atoms() for t in atom.args]
        for comparison in self.comparisons:
            terms.extend((comparison.left, comparison.right))
        for term in terms:
            if isinstance(term, Variable) and term not in seen:
                seen[term] = None
        return tuple(seen)


class DefModule(_Node):
    """Def-module (p : F): intensional symbols and a conjunction of rules."""

    intensional: FrozenSet[PredicateSymbol] = frozenset()
    rules: Tuple[Rule, ...] = ()
    name: Optional[str] = Field(default=None, description="Optional label")

    def head_predicates(self) -> FrozenSet[PredicateSymbol]:
        return frozenset(a.pred for r in self.rules for a in r.head_atoms)

    def denials(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.is_denial)


class ModularProgram(_Node):
    """Program tree <S, M> with public symbols S and members M."""

    public: FrozenSet[PredicateSymbol] = frozenset()
    members: Tuple[Union[DefModule, "ModularProgram"], ...] = ()
    name: Optional[str] = None


Member = Union[DefModule, ModularProgram]

ModularProgram.model_rebuild()


class StarContext(_Node):
    """Correspondence between intensional symbols and the predicate variables replacing them."""

    mapping: Dict[PredicateSymbol, PredicateVariable] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_mapping(self) -> "StarContext":
        if len(set(self.mapping.values())) != len(self.mapping):
            raise ValueError("star context must be injective")
        for pred, var in self.mapping.items():
            if pred.arity != var.arity:
                raise ValueError(f"{pred} cannot correspond to {var}")
        return self

    def __hash__(self) -> int:
        return hash(frozenset(self.mapping.items()))
