"""Closed-form curvature bounds at the centre of a minimal graph over the unit disk.

``G(r)`` is Hall's estimate sharpened by the Schwarz-Pick inequality for the
dilatation root ``r = |q(0)|``; ``H(r)`` comes from the lower bound on
``|f_z(0)|`` through the harmonic Schwarz lemma. The best uniform constant is
``min(G, H)`` maximized over ``r``, reached where the two cross.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ScherkError
from .numerics import RootBracket, find_root_bisect

FINN_OSSERMAN = 0.5 * math.pi**2
HALL = 16.0 * math.pi**2 / 27.0


def _unit_interval(r, name="r"):
    arr = np.asarray(r, float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr >= 1):
        raise DomainError(f"{name} must lie in [0, 1)")
    return arr


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def hall_chain(q0_abs):
    """``(16 pi^2/27)(1 - r^2)^2 (1 + r^4)/(1 + r^2)^4`` with ``r = |q(0)|``."""
    r2 = _unit_interval(q0_abs, "q0_abs") ** 2
    return _out(HALL * (1 - r2) ** 2 * (1 + r2 * r2) / (1 + r2) ** 4)


def schwarz_harmonic(r):
    """Harmonic Schwarz lemma bound ``(4/pi) arctan r`` on ``|f(w)|`` for ``|w| = r``."""
    return _out(4.0 / math.pi * np.arctan(_unit_interval(r)))


def _h(r):
    r = _unit_interval(r)
    r2 = r * r
    gap = 1.0 - 4.0 / math.pi * np.arctan(r)
    with np.errstate(divide="ignore"):
        out = np.where(gap > 0, FINN_OSSERMAN * (1 - r2) ** 4 / ((1 + r2) ** 4 * np.where(gap > 0, gap, 1.0) ** 2), np.inf)
    return _out(out)


class BoundValues(NamedTuple):
    G: float
    H: float
    min_GH: float


def bound_functions(r) -> BoundValues:
    """``G(r)``, ``H(r)`` and their minimum. ``H`` is reported as ``inf`` at its pole."""
    g = hall_chain(r)
    h = _h(r)
    return BoundValues(g, h, _out(np.minimum(g, h)))


def fz0_improved_bound(w, f_at_reflected) -> float:
    """Lower bound ``(2 sqrt 2/pi)(1 - |f|)/(1 - |w|^2)`` on ``|f_z(0)|``."""
    w, f = complex(w), complex(f_at_reflected)
    if not abs(w) < 1:
        raise DomainError("|w| must be < 1")
    if not abs(f) < 1:
        raise DomainError("|f_at_reflected| must be < 1")
    return 2.0 * math.sqrt(2.0) / math.pi * (1 - abs(f)) / (1 - abs(w) ** 2)


@dataclass(frozen=True)
class BoundsReport:
    finn_osserman: float
    hall: float
    r_diamond: float
    g_at_r_diamond: float
    hopf_value: float

    def to_dict(self) -> dict:
        return asdict(self)


def crossing_point(tol: float = 1e-15) -> float:
    """The root of ``G - H`` in ``[0.01, 0.5]``."""

    def diff(r):
        v = bound_functions(r)
        return v.G - v.H

    try:
        return find_root_bisect(diff, RootBracket(0.01, 0.5, tol))
    except ScherkError as err:  # the bracket is fixed, so this is a defect
        raise RuntimeError(f"crossing-point bracket failed: {err}") from err


def corollary_constants() -> BoundsReport:
    r = crossing_point()
    r2 = r * r
    return BoundsReport(
        finn_osserman=FINN_OSSERMAN,
        hall=HALL,
        r_diamond=r,
        g_at_r_diamond=hall_chain(r),
        hopf_value=HALL * (1 + r2 * r2) / (1 + r2) ** 2,
    )
