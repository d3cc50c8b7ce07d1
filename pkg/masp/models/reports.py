"""
Report models produced by the parser, analyses, reductions and equivalence checks.
"""

from enum import Enum
from pathlib import Path
from typing import FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from .semantics import Domain, Interpretation
from .syntax import Formula, PredicateSymbol


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class Diagnostic(BaseModel):
    """A located message about source text or program structure."""

    severity: Severity = Field(..., description="error or warning")
    message: str = Field(..., description="Human-readable message")
    line: Optional[int] = Field(None, ge=1, description="1-based line")
    column: Optional[int] = Field(None, ge=1, description="1-based column")
    path: Optional[str] = Field(None, description="Source path or structural location")

    def __str__(self) -> str:
        location = self.path or "<input>"
        if self.line is not None:
            location += f":{self.line}"
            if self.column is not None:
                location += f":{self.column}"
        return f"{location}: {self.severity.value}: {self.message}"


class SourceKind(str, Enum):
    PROGRAM = "program"
    INSTANCE = "instance"


class SourceUnit(BaseModel):
    """Source text together with its origin and kind."""

    path: str = Field(default="<string>", description="File path or pseudo-name")
    content: str = Field(..., description="Source text")
    kind: SourceKind = Field(default=SourceKind.PROGRAM, description="program or instance")

    @classmethod
    def from_file(cls, path: str, kind: SourceKind = SourceKind.PROGRAM) -> "SourceUnit":
        return cls(path=path, content=Path(path).read_text(encoding="utf-8"), kind=kind)


class DependencyGraph(BaseModel):
    """Positive dependency graph over intensional predicate symbols."""

    model_config = ConfigDict(frozen=True)

    nodes: FrozenSet[PredicateSymbol] = frozenset()
    edges: FrozenSet[Tuple[PredicateSymbol, PredicateSymbol]] = frozenset()
    extensional: FrozenSet[PredicateSymbol] = Field(
        default=frozenset(), description="Body-only symbols drawn for display; empty unless requested"
    )

    @model_validator(mode="after")
    def _check_edges(self) -> "DependencyGraph":
        known = self.nodes | self.extensional
        for head, body in self.edges:
            if head not in self.nodes or body not in known:
                raise ValueError(f"edge {head} -> {body} leaves the node set")
        return self

    def successors(self, node: PredicateSymbol) -> List[PredicateSymbol]:
        return sorted((b for h, b in self.edges if h == node), key=lambda p: p.key)


class CoherenceReport(BaseModel):
    """Outcome of the coherence conditions on a modular program."""

    simple: bool
    alpha_nf: bool
    disjoint_intensional: bool
    scc_covered: bool
    violations: List[Diagnostic] = Field(default_factory=list)

    @computed_field  # type: ignore[misc]
    @property
    def coherent(self) -> bool:
        return self.simple and self.alpha_nf and self.disjoint_intensional and self.scc_covered


class ReductionKind(str, Enum):
    DENIALS = "denials"
    COMPLETION = "completion"
    CHOICE = "choice"
    CIRCUMSCRIPTION = "circumscription"


class ReductionResult(BaseModel):
    """Result of applying one reduction to a def-module."""

    kind: ReductionKind
    applicable: bool
    residual: Optional[Formula] = Field(None, description="Rewritten formula when applicable")
    reason: Optional[str] = Field(None, description="Why the reduction does not apply")
    module: Optional[str] = Field(None, description="Label of the def-module")

    @model_validator(mode="after")
    def _check_residual(self) -> "ReductionResult":
        if not self.applicable and self.residual is not None:
            raise ValueError("an inapplicable reduction has no residual")
        if self.applicable and self.residual is None:
            raise ValueError("an applicable reduction carries a residual")
        return self


class EquivStatus(str, Enum):
    EQUIVALENT = "equivalent_up_to_bound"
    COUNTEREXAMPLE = "counterexample"


class Direction(str, Enum):
    """Which side the witness satisfies."""
    LEFT_ONLY = "left_not_right"
    RIGHT_ONLY = "right_not_left"


class EquivVerdict(BaseModel):
    """Verdict of a bounded equivalence check."""

    status: EquivStatus
    bound: Domain
    witness: Optional[Interpretation] = None
    direction: Optional[Direction] = None
    checked: int = Field(default=0, ge=0, description="Interpretations examined")

    @model_validator(mode="after")
    def _check_witness(self) -> "EquivVerdict":
        if self.status == EquivStatus.COUNTEREXAMPLE and (self.witness is None or self.direction is None):
            raise ValueError("a counterexample verdict carries a witness and a direction")
        return self

    @property
    def equivalent(self) -> bool:
        return self.status == EquivStatus.EQUIVALENT


class ContextTheory(BaseModel):
    """Finite theory of closed first-order sentences."""

    model_config = ConfigDict(frozen=True)

    sentences: Tuple[Formula, ...] = ()

    @model_validator(mode="after")
    def _check_sentences(self) -> "ContextTheory":
        from ..services.formulas import free_variables, is_first_order

        for sentence in self.sentences:
            if not is_first_order(sentence):
                raise ValueError("context sentences are first-order")
            if free_variables(sentence):
                raise ValueError("context sentences are closed")
        return self
