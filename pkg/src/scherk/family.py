"""The explicit family S^t of Scherk-type minimal graphs over inscribed isosceles trapezoids.

Conventions
-----------
* ``t`` is the vertex angle, valid on ``(0, pi/2]``; curvature quantities need
  ``t >= t_critical()`` so that the preimage of the origin lies in the disk.
* The planar harmonic map is ``f = exp(-i tau) P[F]`` where ``F`` takes the values
  ``1, e^{it}, e^{is}, e^{i(t+s)}`` on the four quarter arcs of the circle.
* ``p = f_z`` and ``q`` is the holomorphic square root of the second dilatation,
  so ``conj(f)_z = p q^2``.
* The height is ``Im int_0^z 2 p q``; it tends to ``+inf`` at ``z -> +-i`` and to
  ``-inf`` at ``z -> +-1``.

Most functions accept scalars or numpy arrays for ``t`` and ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PoleError
from .numerics import RootBracket, find_root_bisect, integrate_adaptive

HALF_PI = 0.5 * math.pi
_T_SLACK = 1e-14


def t_critical() -> float:
    """Smallest ``t`` whose trapezoid still has the origin's preimage inside the disk."""
    return 2.0 * math.atan(math.sqrt(0.5 * (math.sqrt(5.0) - 1.0)))


def _cos(t):
    # exact zero at t = pi/2; cos(pi/2) in floating point is 6e-17 and its sqrt is not small
    return np.sin(HALF_PI - np.asarray(t, float))


def _check_t(t, lower=0.0, closed_lower=False, what="t"):
    arr = np.asarray(t, float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} must be finite")
    bad_low = arr < lower - _T_SLACK if closed_lower else arr <= lower
    if np.any(bad_low) or np.any(arr > HALF_PI + _T_SLACK):
        bound = "[" if closed_lower else "("
        raise DomainError(f"{what}={t!r} outside {bound}{lower:.12g}, pi/2]")
    return np.minimum(arr, HALF_PI)


def _check_family_t(t):
    return _check_t(t, t_critical(), closed_lower=True)


def _check_disk(z, radius=1.0, strict=True):
    z = np.asarray(z, complex)
    mod = np.abs(z)
    if np.any(mod >= radius if strict else mod > radius):
        raise DomainError(f"point outside the {'open' if strict else 'closed'} disk of radius {radius}")
    return z


def _check_poles(z):
    if np.any(np.abs(1.0 - z**4) < 1e-15):
        raise PoleError("z^4 = 1 is a pole of the Weierstrass data")


def second_angle(t):
    """``s(t) = arccos((3 cos t - 1)/(1 + cos t))`` with the argument clamped to [-1, 1]."""
    c = _cos(t)
    return np.arccos(np.clip((3.0 * c - 1.0) / (1.0 + c), -1.0, 1.0))


@dataclass(frozen=True)
class TrapezoidFamilyParam:
    t: float
    s: float
    tau: float
    vertices: tuple  # four unit complex numbers, counter-clockwise
    t_critical: float

    def contains(self, w, tol=0.0) -> np.ndarray:
        """Point-in-convex-polygon test; ``tol > 0`` admits points up to ``tol`` outside."""
        w = np.asarray(w, complex)
        inside = np.ones(w.shape, bool)
        verts = self.vertices
        for k in range(4):
            a, b = verts[k], verts[(k + 1) % 4]
            edge = b - a
            cross = edge.real * (w - a).imag - edge.imag * (w - a).real
            inside &= cross >= -tol * abs(edge)
        return inside

    def contains_origin(self) -> bool:
        verts = self.vertices
        for k in range(4):
            a, b = verts[k], verts[(k + 1) % 4]
            if (b - a).real * (-a).imag - (b - a).imag * (-a).real <= 0:
                return False
        return True


def trapezoid_geometry(t: float) -> TrapezoidFamilyParam:
    """Angles and rotated vertices of the trapezoid carrying S^t."""
    t = float(_check_t(t))
    s = float(second_angle(t))
    tau = 0.5 * (t + s - math.pi)
    rot = complex(math.cos(tau), -math.sin(tau))
    verts = tuple(rot * complex(math.cos(a), math.sin(a)) for a in (0.0, t, s, t + s))
    return TrapezoidFamilyParam(t=t, s=s, tau=tau, vertices=verts, t_critical=t_critical())


def map_point(t, z):
    """Closed-form harmonic map of the disk onto the trapezoid, ``f(0) = i sqrt(cos t)``."""
    t = float(_check_t(t))
    z = _check_disk(z)
    s = float(second_angle(t))
    # split logarithms: each factor has positive real part on the disk, so no branch cut is crossed
    log_sq = np.log(1 + z * z)
    lower = np.imag((log_sq - 2 * np.log(1 + z)) * math.sin(0.5 * (s - t))
                    + (2 * np.log(1 - z) - log_sq) * math.sin(0.5 * (s + t)))
    u = -lower / math.pi
    v = -4.0 * np.real(np.arctan(z)) * math.sin(0.5 * s) * math.sin(0.5 * t) / math.pi
    return u + 1j * (v + math.sqrt(float(_cos(t))))


def _poisson_kernel(r, phase):
    def kernel(sigma):
        half = np.sin(0.5 * (phase - sigma))
        return (1 - r * r) / ((1 - r) ** 2 + 4 * r * half * half) / (2 * math.pi)
    return kernel


def harmonic_measures(z, breaks=(0.0, HALF_PI, math.pi, 1.5 * math.pi), tol=1e-13):
    """Harmonic measure of each arc ``(breaks[k], breaks[k+1])`` at ``z`` by quadrature."""
    z = complex(z)
    r, phase = abs(z), math.atan2(z.imag, z.real) % (2 * math.pi)
    kernel = _poisson_kernel(r, phase)
    edges = list(breaks) + [breaks[0] + 2 * math.pi]
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        peaks = [phase + 2 * math.pi * j for j in (-1, 0, 1)]
        out.append(integrate_adaptive(kernel, lo, hi, tol / len(breaks), breakpoints=peaks))
    return np.array(out)


def poisson_oracle(t, z, tol=1e-12):
    """``exp(-i tau) P[F](z)`` by per-arc quadrature of the Poisson kernel.

    Independent of the closed form in :func:`map_point`; used to check it.
    """
    geo = trapezoid_geometry(t)
    z = complex(z)
    if abs(z) > 0.999:
        raise DomainError("poisson_oracle is limited to |z| <= 0.999")
    values = np.exp(1j * np.array([0.0, geo.t, geo.s, geo.t + geo.s]))
    weights = harmonic_measures(z, tol=tol)
    return complex(np.exp(-1j * geo.tau) * np.sum(values * weights))


class PreRotation(NamedTuple):
    gprime: complex
    hprime: complex
    omega1: complex
    q1: complex


def prerotation_data(t, z) -> PreRotation:
    """Analytic data of the unrotated map ``f1 = g + conj(h)`` from the jump residues."""
    t = float(_check_t(t))
    z = np.asarray(z, complex)
    _check_poles(z)
    s = float(second_angle(t))
    values = np.exp(1j * np.array([0.0, t, s, t + s]))
    nxt = np.roll(values, -1)
    poles = np.array([1j, -1, -1j, 1])  # i^k for k = 1..4
    zz = z[..., None]
    gprime = np.sum((values - nxt) / (zz - poles), axis=-1) / (2j * math.pi)
    # conj(f1)_z = -sum conj(d_k)/(z - b_k) with d_k = (a_k - a_{k+1})/(2 pi i)
    hprime = np.sum(np.conj(values - nxt) / (zz - poles), axis=-1) / (2j * math.pi)
    amob = mobius_parameter(t)
    mu = -0.5 * (t + s - math.pi)
    q1 = np.exp(1j * mu) * (z + amob) / (1 + z * amob)
    return PreRotation(gprime, hprime, hprime / gprime, q1)


def mobius_parameter(t):
    """Real parameter ``sqrt(cos t)/(cos(t/2) + sin(t/2))`` of the dilatation root."""
    t = np.asarray(t, float)
    return np.sqrt(_cos(t)) / (np.cos(0.5 * t) + np.sin(0.5 * t))


@dataclass(frozen=True)
class EWSample:
    z: complex
    p: complex
    q: complex
    qprime: complex

    @property
    def omega(self):
        return self.p * self.q**2 / self.p

    @property
    def jacobian(self):
        return np.abs(self.p) ** 2 * (1 - np.abs(self.q) ** 4)


def ew_data(t, z) -> EWSample:
    """Enneper-Weierstrass data ``(p, q, q')`` of S^t at ``z``."""
    t = float(_check_t(t))
    z = np.asarray(z, complex)
    _check_poles(z)
    c = float(_cos(t))
    cs = math.cos(0.5 * t) + math.sin(0.5 * t)
    amob = math.sqrt(c) / cs
    p = -2j * cs * math.sin(t) * (1 + z * amob) ** 2 / (math.pi * (1 - z**4) * (1 + c))
    den = 1 + z * amob
    q = (z + amob) / den
    qprime = (1 - amob * amob) / den**2
    if z.ndim == 0:
        return EWSample(complex(z), complex(p), complex(q), complex(qprime))
    return EWSample(z, p, q, qprime)


def height(t, z):
    """Third coordinate ``T(z) = Im int_0^z 2 p q`` of the conformal parameterization."""
    t = float(_check_t(t))
    z = _check_disk(z)
    _check_poles(z)
    c = float(_cos(t))
    first = math.sin(0.5 * t) * np.log(np.abs(1 - z * z) / np.abs(1 + z * z))
    second = math.sqrt(c) * math.tan(0.5 * t) * np.log(np.abs(1 + z) / np.abs(1 - z))
    out = 2.0 * (first - second) / math.pi
    return float(out) if out.ndim == 0 else out


def _centre_argument(t):
    half = 0.5 * np.asarray(t, float)
    return 0.125 * math.pi * np.sqrt(_cos(t)) * np.sin(2 * half) / np.sin(half) ** 3


def z_center(t):
    """Real preimage ``z0(t)`` of the origin: ``f(z0) = 0``."""
    t = _check_t(t, what="t")
    if np.any(t < t_critical() - _T_SLACK):
        raise DomainError(f"t below t_critical = {t_critical():.6f}: the preimage of 0 leaves the disk")
    r = np.tan(_centre_argument(t))
    r = np.minimum(r, 1.0)
    return float(r) if r.ndim == 0 else r


def kappa(t):
    """Square root of minus the centre curvature of S^t."""
    t = _check_family_t(t)
    r = z_center(t)
    c = _cos(t)
    ch = np.cos(0.5 * t)
    out = math.pi * (1 - r**4) * ch / (2 * ((1 + r * r) * ch + 2 * r * np.sqrt(c)) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def a_of_t(t):
    """``|q(z0(t))|``: fixes the unit normal at the centre. Decreasing from 1 to 0."""
    t = _check_family_t(t)
    sc = np.sqrt(_cos(t))
    cs = np.cos(0.5 * t) + np.sin(0.5 * t)
    r = np.minimum(np.tan(_centre_argument(t)), 1.0)
    out = (sc + cs * r) / (cs + sc * r)
    return float(out) if np.ndim(out) == 0 else out


def t_of_a(a: float, tol: float = 1e-15) -> float:
    """Inverse of :func:`a_of_t` on ``[0, 1]`` by bisection."""
    a = float(a)
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"a={a} outside [0, 1]")
    lo = t_critical()
    if a >= a_of_t(lo):
        return lo
    return find_root_bisect(lambda t: a_of_t(t) - a, RootBracket(lo, HALF_PI, tol))


def normal_angle(t):
    """Angle between the centre normal of S^t and the vertical: ``arccos((1-a^2)/(1+a^2))``."""
    return 2.0 * np.arctan(a_of_t(t))


def kappa_in_u(u):
    """``kappa`` written in ``u = tan(t/2)``."""
    u = np.asarray(u, float)
    root = np.sqrt(np.clip(1 - u * u, 0.0, None))
    x = math.pi * root / (2 * u * u)
    return math.pi * np.sqrt(1 + u * u) * np.cos(x) / (2 * (1 + root * np.sin(x)) ** 2)


def kappa_in_u_slope(u):
    """Derivative of :func:`kappa_in_u` by the chain rule, finite at ``u = 1``."""
    u = np.asarray(u, float)
    root = np.sqrt(np.clip(1 - u * u, 0.0, None))
    x = math.pi * root / (2 * u * u)
    sx, cx = np.sin(x), np.cos(x)
    sin_over_root = math.pi / (2 * u * u) * np.sinc(x / math.pi)
    amp = np.sqrt(1 + u * u)
    base = 1 + root * sx
    d_base = -u * sin_over_root - 0.5 * math.pi * cx * (1 / u + 2 * root * root / u**3)
    sx_dx = -0.5 * math.pi / u * sin_over_root - math.pi * root * sx / u**3
    out = (u / amp * cx - amp * sx_dx) / base**2 - 2 * amp * cx * d_base / base**3
    return 0.5 * math.pi * out


class InequalityProfile(NamedTuple):
    Phi: float
    phi: float
    psi: float
    vartheta: float


def inequality_profile(t) -> InequalityProfile:
    """The auxiliary functions behind the monotonicity of kappa and the bound on W*kappa."""
    t = _check_family_t(t)
    if np.any(t <= t_critical()):
        raise DomainError("inequality_profile needs t > t_critical")
    half = 0.5 * t
    sc = np.sqrt(_cos(t))
    arg = 2 * _centre_argument(t)
    psi = np.sin(half) + sc * np.sin(arg) * np.tan(half)
    phi = math.pi / (2 * psi)
    vartheta = np.cos(half) / np.tan(half)
    return InequalityProfile(kappa_in_u(np.tan(half)), phi, psi, vartheta)


def psi_of_theta(theta):
    """Sharp centre-curvature bound as a function of the normal angle ``theta`` in [0, pi/2]."""
    arr = np.asarray(theta, float)
    if np.any(arr < 0) or np.any(arr > HALF_PI + _T_SLACK) or not np.all(np.isfinite(arr)):
        raise DomainError("theta must lie in [0, pi/2]")
    flat = [kappa(t_of_a(min(math.tan(0.5 * th), 1.0))) ** 2 for th in np.atleast_1d(arr).ravel()]
    out = np.array(flat).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out
