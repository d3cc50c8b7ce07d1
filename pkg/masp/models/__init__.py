"""
Data models for the modular ASP toolkit.
"""

from .syntax import (
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
    StarContext,
    Term,
    Variable,
)
from .semantics import (
    Domain,
    Extents,
    GroundTuple,
    Interpretation,
    OutputFormat,
    SOAssignment,
    SolveOptions,
    Strategy,
)
from .reports import (
    CoherenceReport,
    ContextTheory,
    DependencyGraph,
    Diagnostic,
    Direction,
    EquivStatus,
    EquivVerdict,
    ReductionKind,
    ReductionResult,
    Severity,
    SourceKind,
    SourceUnit,
)

__all__ = [
    "BOTTOM", "TOP", "And", "Atom", "Bottom", "Comparison", "ComparisonOp",
    "Constant", "DefModule", "Equal", "ExistsFO", "ExistsSO", "ForallFO",
    "ForallSO", "Formula", "Implies", "Member", "ModularProgram", "Or",
    "PredicateSymbol", "PredicateVariable", "PredVarAtom", "Rule", "StarContext", "Term",
    "Variable",
    "Domain", "Extents", "GroundTuple", "Interpretation", "OutputFormat",
    "SOAssignment", "SolveOptions", "Strategy",
    "CoherenceReport", "ContextTheory", "DependencyGraph", "Diagnostic",
    "Direction", "EquivStatus", "EquivVerdict", "ReductionKind",
    "ReductionResult", "Severity", "SourceKind", "SourceUnit",
]
