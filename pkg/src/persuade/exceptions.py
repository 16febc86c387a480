"""Exception hierarchy shared across the package.

``PersuadeError`` is the base for everything raised deliberately; the CLI
maps ``SchemaError`` (malformed input files) to exit code 2 and every other
``PersuadeError`` (domain or solver rejection) to exit code 3.
"""


class PersuadeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PersuadeError):
    """Arguments outside the documented domain of an operation."""


class DegenerateIntervalError(DomainError):
    """An interval statistic was requested on a zero-mass interval."""


class InfeasibleTargetError(DomainError):
    """A conditional-mean target lies outside the achievable range."""


class SolverToleranceError(PersuadeError):
    """An iterative solver terminated without meeting its tolerance."""


class InvalidPolicyError(PersuadeError):
    """A policy violates its structural invariants."""


class BudgetExceededError(PersuadeError):
    """An exhaustive enumeration would exceed its combinatorial budget."""


class ConversionError(PersuadeError):
    """Bi-pooling to partitional conversion failed; carries diagnostics."""


class SchemaError(PersuadeError):
    """A JSON document does not match the expected schema."""
