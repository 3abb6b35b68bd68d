"""Exception hierarchy shared by every module in the package."""


class CsError(Exception):
    """Base class for all package errors."""


class DimensionError(CsError, ValueError):
    """Invalid dimension or mismatched shapes."""


class DomainError(CsError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularMatrixError(CsError, ArithmeticError):
    """A compound-symmetric matrix is singular."""


class NumericError(CsError, ArithmeticError):
    """A numerical routine failed to converge.

    ``diagnostics`` carries whatever the routine knew when it gave up.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class DataError(CsError, ValueError):
    """Malformed, degenerate or unidentifiable input data."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MethodError(CsError, ValueError):
    """The requested method does not apply to the data (e.g. DIRECT on unbalanced groups)."""
