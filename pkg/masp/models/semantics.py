"""
Semantic data models: Herbrand domains, interpretations and solve options.
"""

from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .syntax import PredicateSymbol, PredicateVariable

GroundTuple = Tuple[str, ...]
Extents = Dict[PredicateSymbol, FrozenSet[GroundTuple]]
SOAssignment = Dict[PredicateVariable, FrozenSet[GroundTuple]]


class Strategy(str, Enum):
    """Answer-set enumeration strategies."""
    SPLITTING = "splitting"
    NAIVE = "naive"


class OutputFormat(str, Enum):
    """Output formats understood by the CLI."""
    TEXT = "text"
    JSON = "json"
    DOT = "dot"


class Domain(BaseModel):
    """Finite Herbrand domain: an ordered set of constant names."""

    model_config = ConfigDict(frozen=True)

    constants: Tuple[str, ...] = Field(..., description="Constants in canonical order")

    @field_validator("constants")
    @classmethod
    def _check_constants(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if not value:
            raise ValueError("a domain holds at least one constant")
        if len(set(value)) != len(value):
            raise ValueError("domain constants must be distinct")
        return value

    @classmethod
    def of(cls, constants: Iterable[str]) -> "Domain":
        return cls(constants=tuple(sorted(set(constants))))

    def __iter__(self) -> Iterator[str]:  # type: ignore[override]
        return iter(self.constants)

    def __len__(self) -> int:
        return len(self.constants)

    def __contains__(self, constant: object) -> bool:
        return constant in self.constants

    def __str__(self) -> str:
        return "{" + ",".join(self.constants) + "}"


class Interpretation(BaseModel):
    """
    Herbrand interpretation: a domain plus an extent per predicate symbol.

    Absent symbols denote the empty extent; empty extents are dropped on
    construction so that equality and hashing ignore them.
    """

    model_config = ConfigDict(frozen=True)

    domain: Domain
    extents: Dict[PredicateSymbol, FrozenSet[GroundTuple]] = Field(default_factory=dict)

    @field_validator("extents", mode="before")
    @classmethod
    def _normalize(cls, value: Mapping) -> Dict:
        return {
            pred: frozenset(tuple(t) for t in tuples)
            for pred, tuples in dict(value).items()
            if tuples
        }

    @model_validator(mode="after")
    def _check_tuples(self) -> "Interpretation":
        constants = set(self.domain.constants)
        for pred, tuples in self.extents.items():
            for t in tuples:
                if len(t) != pred.arity:
                    raise ValueError(f"tuple {t} does not fit {pred}")
                if not constants.issuperset(t):
                    raise ValueError(f"tuple {t} of {pred} leaves domain {self.domain}")
        return self

    def extent(self, pred: PredicateSymbol) -> FrozenSet[GroundTuple]:
        return self.extents.get(pred, frozenset())

    def symbols(self) -> FrozenSet[PredicateSymbol]:
        return frozenset(self.extents)

    def atoms(self) -> List[Tuple[PredicateSymbol, GroundTuple]]:
        """True ground atoms in canonical order."""
        return sorted(
            ((pred, t) for pred, tuples in self.extents.items() for t in tuples),
            key=lambda item: (item[0].name, item[0].arity, item[1]),
        )

    def size(self) -> int:
        return sum(len(tuples) for tuples in self.extents.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return self.domain == other.domain and self.extents == other.extents

    def __hash__(self) -> int:
        return hash((self.domain, frozenset(self.extents.items())))


class SolveOptions(BaseModel):
    """Options for answer-set enumeration."""

    strategy: Strategy = Field(default=Strategy.SPLITTING, description="Enumeration strategy")
    domain_override: Optional[Domain] = Field(None, description="Domain replacing the Herbrand universe")
    max_branch: int = Field(default=1_000_000, ge=1, description="Cap on candidate subsets per def-module")
    show_override: Optional[FrozenSet[PredicateSymbol]] = Field(None, description="Public set replacing #show")
    jobs: int = Field(default=1, ge=1, description="Worker threads")
    naive_limit: int = Field(default=24, ge=1, description="Cap on ground atoms searched by the naive oracle")
