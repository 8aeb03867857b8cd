"""Error types shared across the package.

Every failure mode that callers are expected to catch gets its own class so
the CLI can map them to exit codes without string matching.
"""

from __future__ import annotations


class StrataError(Exception):
    """Base class for all package errors."""


class DomainError(StrataError):
    """Input outside an operation's domain (division by zero, bad interval, ...)."""


class RepresentationError(StrataError):
    """A value representation violates its structural contract."""


class DemotionError(DomainError):
    """Attempt to lower a rank tag; promotion only ever increases rank."""


class BudgetExhaustedError(StrataError):
    """A decision could not be reached within the configured complexity budget."""


class CoverFailureError(StrataError):
    """No admissible cover exists under the budget; carries a witness point."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotRepresentableError(DomainError):
    """A catalogue entry that deliberately refuses numeric evaluation."""
