"""Harmonic maps onto inscribed quadrilaterals with a prescribed Blaschke-square dilatation.

For a target ``w`` in the disk the dilatation root is ``q_w(z) = (w + mu z)/(1 + conj(w) mu z)``
with ``mu = i (1 - w^4)/|1 - w^4|``. The harmonic map sends the arc
``(alpha_k, alpha_{k+1})`` of the circle to the vertex ``a_k = exp(i theta_k)``,
so with jump points ``b_k = exp(i alpha_k)``

    f_z = sum d_k/(z - b_k),   conj(f)_z = -sum conj(d_k)/(z - b_k),
    d_k = (a_{k-1} - a_k)/(2 pi i).

The eight angles are found by damped least squares from the exact trapezoid
solutions, continued in ``w``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import family
from .errors import (
    ContinuationError,
    DegenerateError,
    DomainError,
    EvaluationError,
    IterationLimitError,
    PoleError,
    ScherkError,
)
from .numerics import LeastSquaresOptions, solve_least_squares

TWO_PI = 2.0 * math.pi
DEFAULT_CAP = 0.95
RESIDUAL_GATE = 1e-10
_MIN_GAP = 1e-6


def _wrap(x):
    # representative in (-pi, pi]
    return -((-np.asarray(x, float) + math.pi) % TWO_PI - math.pi)


def _check_angles(name, values, strict=True):
    arr = np.asarray(values, float)
    if arr.shape != (4,) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} needs four finite angles")
    steps = np.diff(arr)
    if np.any(steps <= 0 if strict else steps < 0) or arr[3] - arr[0] >= TWO_PI:
        kind = "strictly increasing" if strict else "nondecreasing"
        raise DomainError(f"{name} must be {kind} within one turn")
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class QuadConfig:
    """Target ``w`` with preimage angles ``alpha`` and vertex angles ``theta``.

    Both angle lists span less than one turn. Preimage angles increase strictly;
    vertex angles may repeat, which merges two vertices and removes the pole between them.
    """

    w: complex
    alpha: tuple
    theta: tuple

    def __post_init__(self):
        w = complex(self.w)
        if not abs(w) < 1:
            raise DomainError("|w| must be < 1")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "alpha", _check_angles("alpha", self.alpha))
        object.__setattr__(self, "theta", _check_angles("theta", self.theta, strict=False))

    @property
    def a(self) -> np.ndarray:
        return np.exp(1j * np.array(self.theta))

    @property
    def b(self) -> np.ndarray:
        return np.exp(1j * np.array(self.alpha))

    @property
    def d(self) -> np.ndarray:
        a = self.a
        return (np.roll(a, 1) - a) / (2j * math.pi)

    @property
    def fz0(self) -> complex:
        return complex(-np.sum(self.d / self.b))

    @property
    def alpha_gaps(self) -> np.ndarray:
        return np.diff(np.append(self.alpha, self.alpha[0] + TWO_PI))

    @property
    def theta_gaps(self) -> np.ndarray:
        return np.diff(np.append(self.theta, self.theta[0] + TWO_PI))

    def contains_origin(self) -> bool:
        # an inscribed polygon with ordered vertices is convex; 0 is inside iff no arc reaches pi
        return bool(np.all(self.theta_gaps < math.pi))

    def canonical(self) -> "QuadConfig":
        """Cyclic relabeling with the smallest preimage angle first, taken in ``[0, 2 pi)``."""
        alpha = np.mod(np.array(self.alpha), TWO_PI)
        k = int(np.argmin(alpha))
        alpha = np.roll(alpha, -k)
        theta = np.roll(np.array(self.theta), -k)
        theta = theta[0] + np.concatenate([[0.0], np.cumsum(np.roll(self.theta_gaps, -k)[:3])])
        shift = math.floor(theta[0] / TWO_PI) * TWO_PI
        return QuadConfig(self.w, tuple(alpha), tuple(theta - shift))

    def to_dict(self) -> dict:
        return {"w": [self.w.real, self.w.imag], "alpha": list(self.alpha), "theta": list(self.theta)}

    @classmethod
    def from_dict(cls, data) -> "QuadConfig":
        return cls(complex(*data["w"]), tuple(data["alpha"]), tuple(data["theta"]))


def config_distance(c1: QuadConfig, c2: QuadConfig) -> float:
    """Largest angle discrepancy (wrapped) after the best cyclic relabeling, plus ``|w1 - w2|``."""
    a1, t1 = np.array(c1.alpha), np.array(c1.theta)
    a2, t2 = np.array(c2.alpha), np.array(c2.theta)
    best = min(
        max(np.max(np.abs(_wrap(a1 - np.roll(a2, k)))), np.max(np.abs(_wrap(t1 - np.roll(t2, k)))))
        for k in range(4)
    )
    return float(best + abs(c1.w - c2.w))


@dataclass(frozen=True)
class DilatationTarget:
    w: complex
    mu: complex

    def q(self, z):
        z = np.asarray(z, complex)
        return (self.w + self.mu * z) / (1 + np.conj(self.w) * self.mu * z)

    def qprime(self, z):
        z = np.asarray(z, complex)
        return self.mu * (1 - abs(self.w) ** 2) / (1 + np.conj(self.w) * self.mu * z) ** 2

    def omega(self, z):
        return self.q(z) ** 2


def target_dilatation(w) -> DilatationTarget:
    w = complex(w)
    if not abs(w) < 1:
        raise DomainError("|w| must be < 1")
    m = 1 - w**4
    return DilatationTarget(w, 1j * m / abs(m))


class RationalEW(NamedTuple):
    fz: complex
    gprime: complex


def rational_ew(config: QuadConfig, z) -> RationalEW:
    """``f_z`` and ``conj(f)_z`` of the step-data harmonic map at ``z``."""
    z = np.asarray(z, complex)
    diff = z[..., None] - config.b
    if np.any(np.abs(diff) < 1e-15):
        raise PoleError("z coincides with a jump point")
    d = config.d
    fz = np.sum(d / diff, axis=-1)
    gp = -np.sum(np.conj(d) / diff, axis=-1)
    if z.ndim == 0:
        return RationalEW(complex(fz), complex(gp))
    return RationalEW(fz, gp)


def _cofactor_matrix(b):
    # row k: coefficients of prod_{j != k} (z - b_j), highest degree first,
    # by synthetic division of the monic quartic with roots b
    e1 = b.sum()
    e2 = b[0] * (b[1] + b[2] + b[3]) + b[1] * (b[2] + b[3]) + b[2] * b[3]
    e3 = b[0] * b[1] * (b[2] + b[3]) + b[2] * b[3] * (b[0] + b[1])
    q1 = b - e1
    q2 = e2 + b * q1
    q3 = -e3 + b * q2
    return np.stack([np.ones(4, complex), q1, q2, q3], axis=1)


def _residual_parts(w, alpha, theta):
    alpha = np.asarray(alpha, float)
    theta = np.asarray(theta, float)
    gaps = np.diff(np.append(alpha, alpha[0] + TWO_PI))
    if np.min(gaps) < _MIN_GAP:
        raise DegenerateError("coincident preimage points")
    a = np.exp(1j * theta)
    b = np.exp(1j * alpha)
    d = (np.roll(a, 1) - a) / (2j * math.pi)
    tgt = target_dilatation(w)
    mu, w = tgt.mu, tgt.w
    cof = _cofactor_matrix(b)
    big_a = -np.conj(d) @ cof
    big_b = d @ cof
    den = np.array([np.conj(w) * mu, 1.0])
    num = np.array([mu, w])
    poly = np.convolve(big_a, np.convolve(den, den)) - np.convolve(np.convolve(num, num), big_b)
    f0 = np.sum(a * gaps) / TWO_PI
    fz0 = -np.sum(d / b)
    return poly, f0, fz0


def residual(config: QuadConfig) -> np.ndarray:
    """Real residual vector; it vanishes exactly on solutions.

    Layout: real and imaginary parts of the six coefficients of
    ``A (1 + conj(w) mu z)^2 - (w + mu z)^2 B``, then ``Re f(0)``, ``Im f(0)``
    and ``Im f_z(0)``.
    """
    poly, f0, fz0 = _residual_parts(config.w, config.alpha, config.theta)
    poly = np.concatenate([np.zeros(6 - poly.size, complex), poly])
    return np.concatenate([poly.real, poly.imag, [f0.real, f0.imag, fz0.imag]])


def trapezoid_seed(t) -> QuadConfig:
    """Exact solution at ``w = i a(t)``: the closed-form trapezoid map, rotated and recentred."""
    t = float(t)
    tc = family.t_critical()
    if not tc < t <= 0.5 * math.pi + 1e-15:
        raise DomainError(f"trapezoid_seed needs t in (t_critical, pi/2], got {t}")
    geo = family.trapezoid_geometry(t)
    zc = family.z_center(t)
    theta = np.array([0.0, t, geo.s, t + geo.s]) - geo.tau + 0.5 * math.pi
    b = np.array([1, 1j, -1, -1j])
    pre = np.unwrap(np.angle((b - zc) / (1 - zc * b)))
    pre = pre - pre[0]
    return QuadConfig(1j * family.a_of_t(t), tuple(pre), tuple(theta))


def _pack(config: QuadConfig) -> np.ndarray:
    # first angle plus three positive increments, for both angle lists
    return np.concatenate([[config.alpha[0]], np.diff(config.alpha), [config.theta[0]], np.diff(config.theta)])


def _unpack(x, w) -> QuadConfig:
    return QuadConfig(w, tuple(np.cumsum(x[0:4])), tuple(np.cumsum(x[4:8])))


def _packed_residual(w):
    def fn(x):
        try:
            return residual(_unpack(x, w))
        except (DegenerateError, DomainError):
            return np.full(15, np.inf)

    return fn


def _polish(w, x0, max_iterations=60):
    opts = LeastSquaresOptions(max_iterations=max_iterations, residual_tol=1e-13)
    fn = _packed_residual(w)
    try:
        res = solve_least_squares(fn, x0, opts)
        x, norm = res.x, res.residual_norm
    except IterationLimitError as err:
        x, norm = err.best_x, err.residual_norm
    except EvaluationError:
        x, norm = np.asarray(x0, float), math.inf
    return x, norm


def _acceptable(config: QuadConfig):
    fz0 = config.fz0
    return fz0.real > 0 and config.contains_origin()


def rotate_config(config: QuadConfig, k: int) -> QuadConfig:
    """Solution for ``i^k w`` from one for ``w``: ``z -> i^k f(i^-k z)`` shifts every angle by ``k pi/2``."""
    shift = 0.5 * math.pi * k
    return QuadConfig(config.w * 1j**k, tuple(np.add(config.alpha, shift)), tuple(np.add(config.theta, shift)))


def _continue(x, path, max_step, fz_prev):
    """Follow ``w = path(s)`` for ``s`` from 0 to 1 starting from the solved iterate ``x``.

    Steps are predicted by secant extrapolation and halved whenever the polish
    fails, leaves the convex/normalized branch or makes ``|f_z(0)|`` jump.
    """
    s = 0.0
    ds = 1.0
    w_prev = path(0.0)
    velocity = None
    while s < 1.0:
        ds = min(ds, 1.0 - s)
        while abs(path(s + ds) - w_prev) > max_step:
            ds *= 0.5
        while True:
            if ds < 1e-7:
                raise ContinuationError(
                    f"continuation stalled near w = {w_prev:.6g}", w_prev, _unpack(x, w_prev)
                )
            w_new = path(min(s + ds, 1.0))
            guess = x if velocity is None else x + ds * velocity
            x_new, norm = _polish(w_new, guess)
            ok = norm <= RESIDUAL_GATE
            if ok:
                cand = _unpack(x_new, w_new)
                fz_new = cand.fz0
                ok = _acceptable(cand) and abs(abs(fz_new) - abs(fz_prev)) <= 10 * abs(w_new - w_prev) + 1e-9
            if ok:
                break
            ds *= 0.5
            velocity = None
        velocity = (x_new - x) / ds
        s = min(s + ds, 1.0)
        x, w_prev, fz_prev = x_new, w_new, fz_new
        ds *= 2.0
    return x


def _arc_path(radius, start, stop):
    return lambda s: radius * complex(math.cos(start + s * (stop - start)), math.sin(start + s * (stop - start)))


def _finish(x, w) -> QuadConfig:
    x, norm = _polish(w, x)
    config = _unpack(x, w)
    if norm > RESIDUAL_GATE or not _acceptable(config):
        raise ContinuationError(f"final polish failed at w = {w:.6g} (residual {norm:.2e})", w, config)
    return config.canonical()


def _axis_seed(radius, k):
    # exact solution at radius * i^(k+1)
    base = trapezoid_seed(family.t_of_a(radius) if radius > 0 else 0.5 * math.pi)
    return rotate_config(base, k)


def solve_quad(w, seed: QuadConfig | None = None, cap: float = DEFAULT_CAP, max_step: float = 0.05) -> QuadConfig:
    """Solve for the inscribed quadrilateral and jump points belonging to ``w``.

    Without a seed the walk starts at the exact trapezoid with ``a(t*) = |w|``,
    turned by a multiple of ``pi/2`` to the nearest of ``+-|w|, +-i|w|``, and
    follows the circle ``|w| = const`` to ``arg w`` (at most an eighth of a turn).
    With a seed it follows the segment from ``seed.w`` to ``w``. Each step moves
    ``w`` by at most ``max_step`` and is halved on failure.

    Raises:
        DomainError: ``|w| > cap``.
        ContinuationError: the walk could not be completed; carries the last good ``w``.
    """
    w = complex(w)
    if not 0 < cap < 1:
        raise DomainError("cap must lie in (0, 1)")
    if abs(w) > cap:
        raise DomainError(f"|w| = {abs(w):.6g} exceeds the cap {cap}")
    if seed is not None:
        seed = QuadConfig(seed.w, seed.alpha, seed.theta)
        x0, norm = _polish(seed.w, _pack(seed))
        if norm > RESIDUAL_GATE:
            raise ContinuationError("seed does not solve its own target", seed.w, seed)
        w0 = seed.w
        x = _continue(x0, lambda s: w0 + s * (w - w0), max_step, _unpack(x0, w0).fz0)
        return _finish(x, w)
    r = abs(w)
    if r == 0:
        return _finish(_pack(trapezoid_seed(0.5 * math.pi)), 0j)
    rel = math.atan2(w.imag, w.real) - 0.5 * math.pi
    k = int(round(rel / (0.5 * math.pi)))
    start = _axis_seed(r, k)
    phi0 = 0.5 * math.pi * (k + 1)
    phi1 = phi0 + float(_wrap(rel - 0.5 * math.pi * k))
    x = _continue(_pack(start), _arc_path(r, phi0, phi1), max_step, start.fz0)
    return _finish(x, w)


class CenterCurvature(NamedTuple):
    curvature: float
    hopf_form: float  # W^2 |K| at the centre


def center_curvature(config: QuadConfig) -> CenterCurvature:
    """Gaussian curvature at the point over 0 and the Hopf form ``W^2 |K|`` there."""
    fz0 = abs(config.fz0)
    if fz0 == 0:
        raise DegenerateError("f_z(0) = 0")
    m = abs(config.w) ** 2
    hopf = 4.0 / ((1 + m) ** 2 * fz0**2)
    return CenterCurvature(-hopf * (1 - m) ** 2 / (1 + m) ** 2, hopf)


def hopf_form(config: QuadConfig) -> float:
    return center_curvature(config).hopf_form


class ScanRecord(NamedTuple):
    w: complex
    c0: float
    c1: float
    status: str
    residual: float


@dataclass
class ScanResult:
    records: list
    c0_max: float
    c0_argmax: complex
    c1_max: float
    c1_argmax: complex

    @property
    def converged_fraction(self) -> float:
        return sum(r.status == "ok" for r in self.records) / len(self.records)


def _record(config: QuadConfig) -> ScanRecord:
    cc = center_curvature(config)
    norm = float(np.max(np.abs(residual(config))))
    return ScanRecord(config.w, -cc.curvature, cc.hopf_form, "ok", norm)


def _failed(w) -> ScanRecord:
    return ScanRecord(w, math.nan, math.nan, "failed", math.nan)


def _walk(start: QuadConfig, radius, phi_start, targets):
    x, phi_prev, fz_prev = _pack(start), phi_start, start.fz0
    out = {}
    for j, phi in targets:
        w = radius * complex(math.cos(phi), math.sin(phi))
        try:
            x_new = _continue(x, _arc_path(radius, phi_prev, phi), 0.05, fz_prev)
            config = _finish(x_new, w)
        except ScherkError:
            out[j] = _failed(w)
            continue
        out[j] = _record(config)
        x, phi_prev, fz_prev = _pack(config), phi, config.fz0
    return out


def scan_ring(radius: float, n_theta: int) -> list:
    """Solve every ``w = radius * exp(2 pi i j / n_theta)``.

    Each point is reached from the nearest exact seed on ``+-radius, +-i radius``,
    walking away from the seed in both directions.
    """
    angles = TWO_PI * np.arange(n_theta) / n_theta
    if radius == 0:
        try:
            rec = _record(solve_quad(0j))
        except ScherkError:
            rec = _failed(0j)
        return [rec] * n_theta
    found = {}
    rel = angles - 0.5 * math.pi
    nearest = np.round(rel / (0.5 * math.pi)).astype(int)
    for k in sorted(set(nearest.tolist())):
        seed = _axis_seed(radius, k)
        phi0 = 0.5 * math.pi * (k + 1)
        offsets = [(j, float(_wrap(rel[j] - 0.5 * math.pi * k))) for j in range(n_theta) if nearest[j] == k]
        up = sorted(((j, phi0 + o) for j, o in offsets if o >= 0), key=lambda p: p[1])
        down = sorted(((j, phi0 + o) for j, o in offsets if o < 0), key=lambda p: -p[1])
        found.update(_walk(seed, radius, phi0, up))
        found.update(_walk(seed, radius, phi0, down))
    return [found[j] for j in range(n_theta)]


def _scan_ring_args(args):
    return scan_ring(*args)


def default_workers() -> int:
    raw = os.environ.get("SCHERK_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def heinz_hopf_scan(grid_n: int, r_max: float, workers: int | None = None) -> ScanResult:
    """Heinz and Hopf candidates ``c0 = |K|`` and ``c1 = W^2 |K|`` on a polar grid of ``w``.

    The grid has ``grid_n`` radii ``linspace(0, r_max, grid_n)`` and ``grid_n`` angles
    ``2 pi j / grid_n``. Records are ordered ring by ring, then by angle, whatever
    the number of ``workers`` (default: ``SCHERK_THREADS`` or 1).
    """
    if int(grid_n) < 2:
        raise DomainError("grid_n must be >= 2")
    if not 0 < r_max <= 0.9:
        raise DomainError("r_max must lie in (0, 0.9]")
    grid_n = int(grid_n)
    radii = np.linspace(0.0, r_max, grid_n)
    jobs = [(float(r), grid_n) for r in radii]
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1:
        rings = [scan_ring(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            rings = list(pool.map(_scan_ring_args, jobs))
    records = [rec for ring in rings for rec in ring]
    good = [r for r in records if r.status == "ok"]
    if not good:
        return ScanResult(records, math.nan, complex(math.nan), math.nan, complex(math.nan))
    best0 = max(good, key=lambda r: r.c0)
    best1 = max(good, key=lambda r: r.c1)
    return ScanResult(records, best0.c0, best0.w, best1.c1, best1.w)
