"""Error hierarchy shared across the package.

Every error carries a stable ``code`` string; the HTTP layer maps codes to
status codes and error bodies, the CLI maps them to exit codes.
"""

from __future__ import annotations


class CredenceError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ValidationError(CredenceError):
    """Input rejected before any state change."""

    code = "validation-failure"


class UnknownEntityError(CredenceError):
    """A referenced user / hypothesis / evidence item does not exist."""

    code = "unknown-entity"


class DomainError(CredenceError):
    """Numeric argument outside the mathematical domain."""

    code = "domain-error"


class StorageError(CredenceError):
    """The event log could not be read or written."""

    code = "storage-failure"


class GapError(StorageError):
    """Event sequence numbers are not gapless from 1."""

    code = "gap-detected"
