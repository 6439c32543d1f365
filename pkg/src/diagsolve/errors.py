"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: domain errors exit 2, resource/budget
errors exit 3 and numerical-consistency errors exit 4.
"""


class DiagsolveError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(DiagsolveError, ValueError):
    """An input lies outside the domain of the requested operation."""

    exit_code = 2


class ResourceError(DiagsolveError, RuntimeError):
    """A configured enumeration cap or search budget would be exceeded."""

    exit_code = 3

    def __init__(self, message, *, cap=None, estimate=None):
        super().__init__(message)
        self.cap = cap
        self.estimate = estimate


class NumericalError(DiagsolveError, ArithmeticError):
    """A floating-point computation failed its own consistency check."""

    exit_code = 4
