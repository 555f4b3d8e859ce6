"""Small numeric substrate: bisection, damped least squares, adaptive quadrature, finite differences.

Everything here is pure and reentrant. Functions passed to ``integrate_adaptive``
are called with a numpy array of nodes and must return an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AccuracyError, BracketError, EvaluationError, IterationLimitError

__all__ = [
    "RootBracket",
    "LeastSquaresOptions",
    "LeastSquaresResult",
    "QuadratureInfo",
    "find_root_bisect",
    "solve_least_squares",
    "integrate_adaptive",
    "fd_derivative",
]


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = 1e-14

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"empty bracket [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise BracketError("bracket tolerance must be positive")


@dataclass(frozen=True)
class LeastSquaresOptions:
    max_iterations: int = 200
    residual_tol: float = 1e-12
    step_tol: float = 1e-15
    initial_damping: float = 1e-3

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("residual_tol", "step_tol", "initial_damping"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class LeastSquaresResult:
    x: np.ndarray
    residual_norm: float  # infinity norm
    iterations: int
    nfev: int
    history: list  # 2-norms of accepted iterates, first entry is x0


@dataclass
class QuadratureInfo:
    intervals: int
    error_estimate: float


def _checked(value, where):
    value = float(value)
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite function value at {where}")
    return value


def find_root_bisect(f: Callable[[float], float], bracket: RootBracket) -> float:
    """Root of ``f`` inside ``bracket`` by plain bisection.

    Stops once the enclosing interval is no wider than ``bracket.tol`` or can no
    longer be split in floating point. An exact zero at an endpoint is returned
    as is.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    flo = _checked(f(lo), lo)
    fhi = _checked(f(hi), hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    while hi - lo > bracket.tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = _checked(f(mid), mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _fd_jacobian(residual, x, r0):
    n = x.size
    jac = np.empty((r0.size, n))
    for j in range(n):
        h = 1e-7 * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(residual(xp), float) - np.asarray(residual(xm), float)) / (2 * h)
    return jac


def solve_least_squares(
    residual: Callable[[np.ndarray], np.ndarray],
    x0,
    opts: LeastSquaresOptions | None = None,
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
) -> LeastSquaresResult:
    """Levenberg-Marquardt on a small dense residual.

    The damped step solves the augmented system ``[J; sqrt(lam) D] dx = [-r; 0]``
    in least squares, with ``D`` the column norms of ``J``. A step is accepted
    only if it lowers the 2-norm of the residual; damping is divided by 10 on
    acceptance and multiplied by 10 on rejection. Central differences are used
    when no ``jacobian`` is given.

    Raises:
        IterationLimitError: tolerance not met within ``opts.max_iterations``,
            or the step collapsed below ``opts.step_tol`` first.
    """
    opts = opts or LeastSquaresOptions()
    x = np.array(x0, dtype=float, copy=True).ravel()
    r = np.asarray(residual(x), float)
    nfev = 1
    if not np.all(np.isfinite(r)):
        raise EvaluationError("non-finite residual at the initial point")
    cost = float(r @ r)
    history = [math.sqrt(cost)]
    lam = opts.initial_damping
    it = 0
    while it < opts.max_iterations:
        if np.max(np.abs(r)) <= opts.residual_tol:
            break
        it += 1
        jac = jacobian(x) if jacobian is not None else _fd_jacobian(residual, x, r)
        nfev += 0 if jacobian is not None else 2 * x.size
        if not np.all(np.isfinite(jac)):
            norm = float(np.max(np.abs(r)))
            raise IterationLimitError(f"non-finite Jacobian after {it} iterations", x, norm, it)
        scale = np.linalg.norm(jac, axis=0)
        scale[scale == 0] = 1.0
        accepted = False
        while lam < 1e16:
            aug = np.vstack([jac, math.sqrt(lam) * np.diag(scale)])
            rhs = np.concatenate([-r, np.zeros(x.size)])
            dx = np.linalg.lstsq(aug, rhs, rcond=None)[0]
            x_new = x + dx
            r_new = np.asarray(residual(x_new), float)
            nfev += 1
            if np.all(np.isfinite(r_new)):
                cost_new = float(r_new @ r_new)
                if cost_new < cost:
                    x, r, cost = x_new, r_new, cost_new
                    lam = max(lam / 10.0, 1e-15)
                    history.append(math.sqrt(cost))
                    accepted = True
                    break
            lam *= 10.0
            if np.linalg.norm(dx) <= opts.step_tol * (np.linalg.norm(x) + opts.step_tol):
                break
        if not accepted:
            norm = float(np.max(np.abs(r)))
            raise IterationLimitError(
                f"least squares stalled at residual {norm:.3e} after {it} iterations",
                x, norm, it,
            )
    norm = float(np.max(np.abs(r)))
    if norm > opts.residual_tol:
        raise IterationLimitError(
            f"least squares hit {opts.max_iterations} iterations at residual {norm:.3e}",
            x, norm, it,
        )
    return LeastSquaresResult(x=x, residual_norm=norm, iterations=it, nfev=nfev, history=history)


# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes.
_GW = np.zeros(15)
_GW[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.asarray(f(mid + half * _NODES), float)
    if not np.all(np.isfinite(vals)):
        raise EvaluationError(f"non-finite integrand on [{a}, {b}]")
    k = half * float(_KW @ vals)
    g = half * float(_GW @ vals)
    return k, abs(k - g)


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    tol: float = 1e-12,
    max_depth: int = 60,
    max_intervals: int = 20000,
    breakpoints=(),
    full_output: bool = False,
):
    """Adaptive Gauss-Kronrod (7/15) quadrature by interval halving.

    Each panel must meet its share ``tol * width / (b - a)`` of the tolerance.
    ``breakpoints`` inside ``(a, b)`` seed the initial partition, which is how
    jump locations of piecewise smooth integrands are honoured.

    Returns the integral, or ``(integral, QuadratureInfo)`` with ``full_output``.

    Raises:
        AccuracyError: a panel still fails its tolerance at ``max_depth``, or
            more than ``max_intervals`` panels were evaluated.
    """
    a, b = float(a), float(b)
    if a == b:
        return (0.0, QuadratureInfo(0, 0.0)) if full_output else 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    width = b - a
    cuts = sorted({a, b, *(float(x) for x in breakpoints if a < x < b)})
    stack = [(lo, hi, 0) for lo, hi in zip(cuts[:-1], cuts[1:])]
    total = 0.0
    err_total = 0.0
    intervals = 0
    evaluated = 0
    while stack:
        lo, hi, depth = stack.pop()
        evaluated += 1
        if evaluated > max_intervals:
            raise AccuracyError(f"quadrature tolerance {tol:g} not met within {max_intervals} panels")
        k, err = _gk15(f, lo, hi)
        budget = tol * (hi - lo) / width
        if err <= budget or err <= 50 * np.finfo(float).eps * abs(k):
            total += k
            err_total += err
            intervals += 1
            continue
        if depth >= max_depth:
            raise AccuracyError(
                f"quadrature tolerance {tol:g} not met on [{lo}, {hi}] at depth {depth}"
            )
        mid = 0.5 * (lo + hi)
        stack.append((mid, hi, depth + 1))
        stack.append((lo, mid, depth + 1))
    total *= sign
    if full_output:
        return total, QuadratureInfo(intervals, err_total)
    return total


def fd_derivative(f: Callable[[float], float], x: float, h: float = 1e-4, order: int = 1) -> float:
    """Central difference of order 1 or 2 with one Richardson step (error O(h^4)).

    The step is adjusted so that ``x + h`` is exactly representable.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if not h > 0:
        raise ValueError("step must be positive")
    x = float(x)

    def stencil(step):
        step = (x + step) - x
        fp = _checked(f(x + step), x + step)
        fm = _checked(f(x - step), x - step)
        if order == 1:
            return (fp - fm) / (2 * step)
        f0 = _checked(f(x), x)
        return (fp - 2 * f0 + fm) / (step * step)

    coarse = stencil(h)
    fine = stencil(h / 2)
    return (4 * fine - coarse) / 3
