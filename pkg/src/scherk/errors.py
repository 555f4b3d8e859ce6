"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ScherkError(Exception):
    """Base class for every error raised by the package."""


class DomainError(ScherkError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """Evaluation at (or numerically on top of) a singularity."""


class DegenerateError(ScherkError):
    """The input configuration is degenerate (zero derivative, collided points)."""


class ConditioningError(ScherkError):
    """A local linear system is too ill-conditioned to trust."""


class BracketError(ScherkError, ValueError):
    """The supplied bracket does not enclose a sign change."""


class EvaluationError(ScherkError, ArithmeticError):
    """A user function returned a non-finite value."""


class AccuracyError(ScherkError):
    """Requested accuracy could not be reached within the resource limits."""


class IterationLimitError(ScherkError):
    """An iterative solver stopped without meeting its tolerance.

    Carries the best iterate seen so the caller can inspect or restart from it.
    """

    def __init__(self, message, best_x, residual_norm, iterations):
        super().__init__(message)
        self.best_x = best_x
        self.residual_norm = residual_norm
        self.iterations = iterations


class ContinuationError(ScherkError):
    """A continuation path could not be followed to its end."""

    def __init__(self, message, last_good_w, last_good=None):
        super().__init__(message)
        self.last_good_w = last_good_w
        self.last_good = last_good
