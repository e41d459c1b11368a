"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration and input problems exit
with 2, numerical problems with 3.
"""

from __future__ import annotations


class RydgateError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(RydgateError):
    """Malformed or inconsistent configuration input."""


class DomainError(RydgateError):
    """Arguments outside the physical or documented domain of an operation."""


class SingularInputError(RydgateError):
    """Inputs that put an expression exactly on a pole."""


class UndefinedConditionalError(RydgateError):
    """Conditional quantity requested with zero success probability."""


class NumericalFailureError(RydgateError):
    """A numerical routine could not reach its accuracy target."""

    def __init__(self, message: str, achieved: float | None = None,
                 required: float | None = None):
        super().__init__(message)
        self.achieved = achieved
        self.required = required
