"""Exception hierarchy.

Validation problems derive from :class:`ValidationError`; numerical failures of
the construction derive from :class:`SolverError`. The CLI maps the two families
to exit codes 1 and 2.
"""

from __future__ import annotations


class ForwardPerfError(Exception):
    pass


class ValidationError(ForwardPerfError, ValueError):
    pass


class ArbitrageViolation(ValidationError):
    pass


class ProbabilityOutOfRange(ValidationError):
    pass


class NonpositiveWealth(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class ThetaOne(ValidationError):
    pass


class WrongSignRegime(ValidationError):
    pass


class ParseError(ValidationError):
    """Malformed input. ``line`` (1-based) and ``field`` locate the problem when known."""

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        super().__init__(message)
        self.line = line
        self.field = field


class SolverError(ForwardPerfError, ArithmeticError):
    pass


class BracketFailure(SolverError):
    pass


class PathologicalTheta(SolverError):
    pass


class NoConstructiveBranch(SolverError):
    pass


class DivergenceDetected(SolverError):
    pass


class QuadratureFailure(SolverError):
    pass


class AdmissibilityViolation(SolverError):
    pass


class NonConcaveDetected(SolverError):
    pass


class StepFailure(SolverError):
    """A forward step failed; ``index`` is the zero-based period index."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"period {index}: {type(cause).__name__}: {cause}")
        self.index = index
        self.cause = cause
