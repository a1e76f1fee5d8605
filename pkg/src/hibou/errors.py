"""Error types shared by the parser, reasoner, form generator and portal.

Every error carries a machine-readable ``category`` (stable strings, used in
CLI output and in the server's JSON error bodies) and, where it originates
from a document, a ``location``.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Location:
    """1-based line/column position inside a source document."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class PortalError(Exception):
    """Base class for all domain errors."""

    category = "error"

    def __init__(self, message: str, location: Location | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self) -> str:
        if self.location is not None:
            return f"{self.category} at {self.location}: {self.message}"
        return f"{self.category}: {self.message}"


class SyntaxParseError(PortalError):
    category = "syntax"


class UndeclaredNameError(PortalError):
    category = "undeclared-name"


class DuplicateDeclarationError(PortalError):
    category = "duplicate-declaration"


class EmptyIntervalError(PortalError):
    category = "empty-interval"


class DuplicateDataAssertionError(PortalError):
    category = "duplicate-data-assertion"


class RangeViolationError(PortalError):
    category = "range-violation"


class KindConflictError(PortalError):
    category = "kind-conflict"


class UnknownNameError(PortalError):
    category = "unknown-name"


class UnknownIndividualError(PortalError):
    category = "unknown-individual"


class NotRecommendedError(PortalError):
    category = "not-recommended"


class CyclicExtendsError(PortalError):
    category = "cyclic-extends"


class UnknownWidgetError(PortalError):
    category = "unknown-widget"


class UnknownOntologyError(PortalError):
    category = "unknown-ontology"


class UnknownSessionError(PortalError):
    category = "unknown-session"


class UnknownPropertyError(PortalError):
    category = "unknown-property"


class PropertyNotVisibleError(PortalError):
    category = "property-not-visible"


class SessionLimitError(PortalError):
    category = "session-limit"


class BadRequestError(PortalError):
    category = "bad-request"


class JournalError(PortalError):
    category = "corrupt-journal"

    def __init__(self, message: str, line_no: int):
        super().__init__(message, Location(line_no, 1))
        self.line_no = line_no
