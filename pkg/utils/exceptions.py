"""Exception hierarchy shared by the library, the agents and the CLI."""

from typing import Any, Dict, Optional


class NewformDimensionError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NewformDimensionError, ValueError):
    """An argument lies outside the mathematical domain (n <= 0, divergent product)."""


class UsageError(NewformDimensionError, ValueError):
    """Unknown function, character, family or malformed range syntax."""


class UnsupportedWeightError(NewformDimensionError, ValueError):
    """Weight k is not an integer >= 2."""


class PreconditionError(NewformDimensionError):
    """A documented precondition of an operation does not hold.

    Args:
        message: Human readable description
        required_cutoff: Smallest cutoff that would satisfy the operation, when known
    """

    def __init__(self, message: str, required_cutoff: Optional[int] = None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class ResourceError(NewformDimensionError, MemoryError):
    """The configured memory budget does not allow the requested batch."""


class InternalConsistencyError(NewformDimensionError):
    """A formula produced a value it provably cannot produce (non-integral or negative)."""


class SequencingError(InternalConsistencyError):
    """The oracle table was asked for a level before all of its divisors were solved."""


class VerificationFailure(NewformDimensionError):
    """A verification check found violations or mismatches.

    Args:
        message: Summary line shown to the user
        details: Optional machine-readable payload of the failing report
    """

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}
