"""Minimal graphs over the unit disk: the Scherk-type trapezoid family, Enneper-Weierstrass
curvature tools, the inscribed-quadrilateral solver and the centre-curvature bounds."""

from . import bounds, family, numerics, quad, weierstrass
from .errors import (
    AccuracyError,
    BracketError,
    ConditioningError,
    ContinuationError,
    DegenerateError,
    DomainError,
    EvaluationError,
    IterationLimitError,
    PoleError,
    ScherkError,
)

__version__ = "0.1.0"
