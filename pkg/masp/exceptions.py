"""
Exception hierarchy for the toolkit.

Every error carries the process exit code the CLI reports for it and,
where the error stems from source text, a list of diagnostics.
"""

from typing import List, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .models import Diagnostic


class MaspError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = 2

    def __init__(self, detail: str, diagnostics: Optional[List["Diagnostic"]] = None):
        super().__init__(detail)
        self.detail = detail
        self.diagnostics = list(diagnostics or [])


class ParseError(MaspError):
    """Lexical or syntax error in a program or instance file."""


class SafetyError(MaspError):
    """A rule variable does not occur in any positive body atom."""

    def __init__(self, detail: str, variable: str):
        super().__init__(detail)
        self.variable = variable


class ArityError(MaspError):
    """An atom or a renaming disagrees with a symbol's arity."""


class SecondOrderError(MaspError):
    """A first-order-only operation received a second-order construct."""


class UnboundVariableError(MaspError):
    """A free variable has no value during evaluation."""


class EmptyDomainError(MaspError):
    """No constants are available to build a Herbrand domain."""


class CoherenceError(MaspError):
    """The splitting strategy was requested for a non-coherent program."""


class ResourceError(MaspError):
    """An enumeration exceeded its configured cap."""


class ReductionError(MaspError):
    """A reduction does not apply to the given def-module."""


class CircumscriptionError(MaspError):
    """Circumscription was requested for a def-module with negation."""


class OccurrenceError(MaspError):
    """A module expected inside a program does not occur there."""


class SignatureMismatchError(MaspError):
    """Two programs compared for equivalence expose different public sets."""


class ConfigurationError(MaspError):
    """Invalid command configuration or configuration file."""
