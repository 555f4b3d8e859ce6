"""Surface-level Enneper-Weierstrass machinery for minimal graphs over the disk.

Given data ``(p, q)`` with ``p = f_z`` and ``q**2`` the second dilatation of the
planar map ``f = u + i v``, the graph ``(u, v, F(u, v))`` with height
``Im int 2 p q`` has

* slopes ``F_u = 2 Im q / (1 - |q|^2)``, ``F_v = 2 Re q / (1 - |q|^2)``,
* upward normal ``-(2 Im q, 2 Re q, |q|^2 - 1) / (1 + |q|^2)``,
* Gaussian curvature ``-4 |q'|^2 / (|p|^2 (1 + |q|^2)^4)``.

The module also carries closed-form test surfaces and the symmetric-point test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import family
from .errors import ConditioningError, DegenerateError, DomainError, PoleError, ScherkError
from .numerics import RootBracket, find_root_bisect


def _arr(x):
    return np.asarray(x, complex)


def curvature_hg(hprime, gprime, omega, omega_prime):
    """Curvature in terms of the canonical decomposition ``f = h + conj(g)``, ``omega = g'/h'``."""
    return -np.abs(omega_prime) ** 2 / (np.abs(hprime * gprime) * (1 + np.abs(omega)) ** 4)


def curvature(p, q, qprime):
    """Gaussian curvature from Enneper-Weierstrass data.

    Where ``q != 0`` the value is recomputed through :func:`curvature_hg` and the
    two are required to agree to 1e-12 relative.
    """
    p, q, qprime = _arr(p), _arr(q), _arr(qprime)
    if np.any(p == 0):
        raise DegenerateError("p = 0: degenerate parameterization")
    if np.any(np.abs(q) >= 1):
        raise DomainError("|q| must be < 1")
    k = -4 * np.abs(qprime) ** 2 / (np.abs(p) ** 2 * (1 + np.abs(q) ** 2) ** 4)
    mask = q != 0
    if np.any(mask):
        pm, qm, qpm = np.broadcast_arrays(p, q, qprime)
        alt = curvature_hg(pm[mask], pm[mask] * qm[mask] ** 2, qm[mask] ** 2, 2 * qm[mask] * qpm[mask])
        ref = np.broadcast_to(k, mask.shape)[mask]
        if not np.allclose(alt, ref, rtol=1e-12, atol=0):
            raise ScherkError("curvature formulas disagree")
    return float(k) if k.ndim == 0 else k


def unit_normal(q):
    """Upward unit normal of the graph at a point with dilatation root ``q``."""
    q = _arr(q)
    if np.any(np.abs(q) >= 1):
        raise DomainError("|q| must be < 1")
    m = np.abs(q) ** 2
    n = -np.stack([2 * q.imag, 2 * q.real, m - 1], axis=-1) / (1 + m)[..., None]
    return n


def slopes(q):
    """Graph slopes ``(F_u, F_v)``."""
    q = _arr(q)
    den = 1 - np.abs(q) ** 2
    if np.any(den <= 0):
        raise PoleError("|q| = 1: slopes diverge")
    fu, fv = 2 * q.imag / den, 2 * q.real / den
    if q.ndim == 0:
        return float(fu), float(fv)
    return fu, fv


def w_factor(q):
    """``W = sqrt(1 + F_u^2 + F_v^2) = (1 + |q|^2)/(1 - |q|^2)``."""
    m = np.abs(_arr(q)) ** 2
    if np.any(m >= 1):
        raise DomainError("|q| must be < 1")
    w = (1 + m) / (1 - m)
    return float(w) if w.ndim == 0 else w


def mixed_second(p, q, qprime):
    """Mixed partial ``F_uv`` of the graph, straight from ``(p, q, q')``."""
    p, q, qprime = _arr(p), _arr(q), _arr(qprime)
    m = np.abs(q) ** 2
    if np.any(p == 0) or np.any(m >= 1):
        raise DegenerateError("need p != 0 and |q| < 1")
    out = 2 * np.real(p * (1 - q**4) * np.conj(qprime)) / (np.abs(p) ** 2 * (1 - m) ** 3 * (1 + m))
    return float(out) if out.ndim == 0 else out


def _slope_gradients(a, b):
    # partials of (F_u, F_v) = (2b, 2a)/(1 - a^2 - b^2) with respect to (a, b)
    d2 = (1 - a * a - b * b) ** 2
    du_da, du_db = 4 * a * b / d2, 2 * (1 - a * a + b * b) / d2
    dv_da, dv_db = 2 * (1 + a * a - b * b) / d2, 4 * a * b / d2
    return du_da, du_db, dv_da, dv_db


def _hessian_system(ux, vx, uy, vy, dfu_dx, dfu_dy, dfv_dx, dfv_dy):
    planar = np.array([[ux, vx], [uy, vy]])
    cond = np.linalg.cond(planar)
    if not np.isfinite(cond) or cond > 1e10:
        raise ConditioningError(f"planar Jacobian condition number {cond:.3e}")
    mat = np.array([
        [ux, vx, 0.0],
        [uy, vy, 0.0],
        [0.0, ux, vx],
        [0.0, uy, vy],
    ])
    rhs = np.array([dfu_dx, dfu_dy, dfv_dx, dfv_dy])
    sol, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    defect = float(np.linalg.norm(mat @ sol - rhs))
    return sol, defect


class SecondDerivatives(NamedTuple):
    f_uu: float
    f_uv: float
    f_vv: float
    mse_residual: float
    consistency_defect: float


def _mse(fu, fv, fuu, fuv, fvv):
    return (1 + fu * fu) * fvv - 2 * fu * fv * fuv + (1 + fv * fv) * fuu


def second_derivatives(t, z, h=1e-4) -> SecondDerivatives:
    """Graph Hessian of S^t at the image of ``z`` by differentiating the slope relations.

    The four chain-rule equations (x- and y-derivatives of both slopes) are
    assembled from second-order central differences of ``q`` and of the planar
    map, then solved in least squares for ``(F_uu, F_uv, F_vv)``. The minimal
    surface equation is *not* imposed, so its residual measures the
    discretization error (O(h^2)).
    """
    if not 1e-5 <= h <= 1e-2:
        raise DomainError("h must lie in [1e-5, 1e-2]")
    z = complex(z)

    def q_at(w):
        return complex(family.ew_data(t, w).q)

    def f_at(w):
        return complex(family.map_point(t, w))

    steps = (h, 1j * h)
    dq = [(q_at(z + d) - q_at(z - d)) / (2 * h) for d in steps]
    df = [(f_at(z + d) - f_at(z - d)) / (2 * h) for d in steps]
    q0 = q_at(z)
    a, b = q0.real, q0.imag
    du_da, du_db, dv_da, dv_db = _slope_gradients(a, b)
    (qx, qy), (fx, fy) = dq, df
    sol, defect = _hessian_system(
        fx.real, fx.imag, fy.real, fy.imag,
        du_da * qx.real + du_db * qx.imag,
        du_da * qy.real + du_db * qy.imag,
        dv_da * qx.real + dv_db * qx.imag,
        dv_da * qy.real + dv_db * qy.imag,
    )
    fu, fv = slopes(q0)
    fuu, fuv, fvv = (float(x) for x in sol)
    return SecondDerivatives(fuu, fuv, fvv, float(_mse(fu, fv, fuu, fuv, fvv)), defect)


def analytic_hessian(t, z):
    """Exact ``(F_uu, F_uv, F_vv)`` of S^t at the image of ``z`` from ``p, q, q'``."""
    ew = family.ew_data(t, complex(z))
    p, q, qp = ew.p, ew.q, ew.qprime
    fzb = np.conj(p * q * q)
    fx, fy = p + fzb, 1j * (p - fzb)
    qx, qy = qp, 1j * qp
    du_da, du_db, dv_da, dv_db = _slope_gradients(q.real, q.imag)
    sol, _ = _hessian_system(
        fx.real, fx.imag, fy.real, fy.imag,
        du_da * qx.real + du_db * qx.imag,
        du_da * qy.real + du_db * qy.imag,
        dv_da * qx.real + dv_db * qx.imag,
        dv_da * qy.real + dv_db * qy.imag,
    )
    return tuple(float(x) for x in sol)


def invert_map(t, w, z0=0j, tol=1e-15, max_iter=100):
    """Disk point ``z`` with ``map_point(t, z) = w``, by damped Newton on the planar map."""
    w = complex(w)
    z = complex(z0)
    for _ in range(max_iter):
        r = w - complex(family.map_point(t, z))
        if abs(r) <= tol:
            return z
        ew = family.ew_data(t, z)
        fzb = np.conj(ew.p * ew.q**2)
        # r = p dz + conj(p q^2) conj(dz): solve as a real 2x2 system
        jac = np.array([[(ew.p + fzb).real, (1j * (ew.p - fzb)).real],
                        [(ew.p + fzb).imag, (1j * (ew.p - fzb)).imag]])
        dx, dy = np.linalg.solve(jac, [r.real, r.imag])
        step = complex(dx, dy)
        while abs(z + step) >= 1:
            step *= 0.5
        z_new = z + step
        if abs(z_new - z) <= 1e-17:
            return z_new
        z = z_new
    r = abs(w - complex(family.map_point(t, z)))
    if r > 1e-12:
        raise ScherkError(f"planar map inversion did not converge (residual {r:.2e})")
    return z


def graph_height(t, u, v, z0=0j):
    """Non-parametric height ``F(u, v)`` of S^t over its trapezoid."""
    return family.height(t, invert_map(t, complex(u, v), z0))


@dataclass(frozen=True)
class SurfaceSample:
    z: complex
    position: tuple
    normal: tuple
    slopes: tuple
    W: float
    curvature: float


def surface_point(t, z) -> SurfaceSample:
    z = complex(z)
    if abs(z) > 0.999:
        raise DomainError("surface samples are restricted to |z| <= 0.999")
    w = complex(family.map_point(t, z))
    ew = family.ew_data(t, z)
    return SurfaceSample(
        z=z,
        position=(w.real, w.imag, family.height(t, z)),
        normal=tuple(float(x) for x in unit_normal(ew.q)),
        slopes=slopes(ew.q),
        W=w_factor(ew.q),
        curvature=curvature(ew.p, ew.q, ew.qprime),
    )


@dataclass
class Mesh:
    vertices: np.ndarray  # (N, 3) rows of (u, v, T)
    faces: np.ndarray  # (M, 3) zero-based triangles
    clamp_count: int
    meta: dict = field(default_factory=dict)

    def to_obj(self) -> str:
        lines = [f"# {k}={v}" for k, v in sorted(self.meta.items())]
        lines += [f"v {x:.17g} {y:.17g} {h:.17g}" for x, y, h in self.vertices]
        lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in self.faces]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["u,v,T"] + [f"{x:.17g},{y:.17g},{h:.17g}" for x, y, h in self.vertices]
        return "\n".join(rows) + "\n"


def sample_mesh(t, n_r=64, n_theta=64, r_max=0.999, t_cap=math.inf) -> Mesh:
    """Polar-grid triangle mesh of S^t; heights clamped to ``|T| <= t_cap``.

    Rings run from the centre (``r = 0``) to ``r_max``; vertex ``i * n_theta + j``
    sits at ring ``i`` and angle ``2 pi j / n_theta``.
    """
    if n_r < 2 or n_theta < 2:
        raise DomainError("need n_r, n_theta >= 2")
    if not 0 < r_max <= 0.999:
        raise DomainError("r_max must lie in (0, 0.999]")
    radii = np.linspace(0.0, r_max, n_r)
    angles = 2 * math.pi * np.arange(n_theta) / n_theta
    z = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    w = family.map_point(t, z)
    heights = np.asarray(family.height(t, z), float)
    clamped = np.abs(heights) > t_cap
    heights = np.clip(heights, -t_cap, t_cap)
    verts = np.column_stack([w.real, w.imag, heights])
    faces = []
    for i in range(n_r - 1):
        for j in range(n_theta):
            a = i * n_theta + j
            b = i * n_theta + (j + 1) % n_theta
            c = a + n_theta
            d = b + n_theta
            faces.append((a, b, d))
            faces.append((a, d, c))
    meta = {"t": t, "n_r": n_r, "n_theta": n_theta, "r_max": r_max, "t_cap": t_cap}
    return Mesh(verts, np.array(faces, dtype=np.int64), int(clamped.sum()), meta)


@dataclass(frozen=True)
class ClosedFormSurface:
    kind: str
    height: Callable[[float, float], float]
    gradient: Callable[[float, float], tuple]
    hessian: Callable[[float, float], tuple]  # (f_uu, f_uv, f_vv)


def catenoid() -> ClosedFormSurface:
    """Upper half of the catenoid, ``arccosh(rho)`` over ``rho > 1``."""

    def parts(u, v):
        rho = math.hypot(u, v)
        if rho <= 1:
            raise DomainError("catenoid graph needs u^2 + v^2 > 1")
        return rho, 1 / math.sqrt(rho * rho - 1), -rho / (rho * rho - 1) ** 1.5

    def grad(u, v):
        rho, g1, _ = parts(u, v)
        return g1 * u / rho, g1 * v / rho

    def hess(u, v):
        rho, g1, g2 = parts(u, v)
        radial = g2 - g1 / rho
        return (radial * u * u / rho**2 + g1 / rho,
                radial * u * v / rho**2,
                radial * v * v / rho**2 + g1 / rho)

    return ClosedFormSurface("catenoid", lambda u, v: math.acosh(math.hypot(u, v)), grad, hess)


def scherk_saddle() -> ClosedFormSurface:
    """Scherk's doubly periodic surface ``log(cos v / cos u)`` on ``|u|, |v| < pi/2``."""
    return ClosedFormSurface(
        "scherk-saddle",
        lambda u, v: math.log(math.cos(v) / math.cos(u)),
        lambda u, v: (math.tan(u), -math.tan(v)),
        lambda u, v: (1 / math.cos(u) ** 2, 0.0, -1 / math.cos(v) ** 2),
    )


def helicoid() -> ClosedFormSurface:
    """Helicoid ``arctan(v/u)`` on ``u != 0``."""

    def grad(u, v):
        r2 = u * u + v * v
        return -v / r2, u / r2

    def hess(u, v):
        r4 = (u * u + v * v) ** 2
        return 2 * u * v / r4, (v * v - u * u) / r4, -2 * u * v / r4

    return ClosedFormSurface("helicoid", lambda u, v: math.atan(v / u), grad, hess)


def scherk_graph(t) -> ClosedFormSurface:
    """S^t as a graph over its trapezoid; partials come from the Weierstrass data."""

    def locate(u, v):
        return invert_map(t, complex(u, v))

    def grad(u, v):
        return slopes(family.ew_data(t, locate(u, v)).q)

    return ClosedFormSurface(
        f"scherk-family({t})",
        lambda u, v: family.height(t, locate(u, v)),
        grad,
        lambda u, v: analytic_hessian(t, locate(u, v)),
    )


class SymmetryCheck(NamedTuple):
    is_symmetric: bool
    grad_h: float
    hess_h_ih: float


def directional_parts(surface: ClosedFormSurface, zeta, c):
    """``(grad_h F, hess_{h, ih} F)`` at ``zeta`` for the direction ``h = exp(ic)``."""
    zeta = complex(zeta)
    fu, fv = surface.gradient(zeta.real, zeta.imag)
    fuu, fuv, fvv = surface.hessian(zeta.real, zeta.imag)
    cc, sc = math.cos(c), math.sin(c)
    return cc * fu + sc * fv, math.cos(2 * c) * fuv + cc * sc * (fvv - fuu)


def symmetric_point_check(surface: ClosedFormSurface, zeta, direction, tol=1e-8) -> SymmetryCheck:
    """Is ``zeta`` an ``h``-symmetric point for the unit direction ``h``?"""
    direction = complex(direction)
    if abs(abs(direction) - 1) > 1e-12:
        raise DomainError("direction must be a unit complex number")
    g, hs = directional_parts(surface, zeta, math.atan2(direction.imag, direction.real))
    return SymmetryCheck(abs(g) <= tol and abs(hs) <= tol, g, hs)


def scan_symmetric_directions(surface: ClosedFormSurface, zeta, n_directions=720, tol=1e-8):
    """Directions ``exp(2 pi i k / n)`` that pass :func:`symmetric_point_check`."""
    directions = np.exp(2j * math.pi * np.arange(n_directions) / n_directions)
    return [h for h in directions if symmetric_point_check(surface, zeta, h, tol).is_symmetric]


def zero_mixed_direction(surface: ClosedFormSurface, zeta) -> float:
    """Angle ``c`` in ``[0, pi/2]`` whose rotated frame kills the mixed derivative.

    The rotated mixed derivative changes sign between ``c = 0`` and ``c = pi/2``,
    so a root always exists.
    """
    return find_root_bisect(
        lambda c: directional_parts(surface, zeta, c)[1],
        RootBracket(0.0, 0.5 * math.pi, 1e-15),
    )
