"""Invariant suites behind ``scherk verify``.

Every check returns its worst error against a named tolerance. Functions are
looked up on their modules at call time, so a patched implementation is what
gets verified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds, family, quad, weierstrass

DEFAULT_TOLERANCES = {
    "kappa_square": 1e-12,
    "kappa_critical": 1e-4,
    "t_critical": 1e-5,
    "kappa_monotone": 1e-12,
    "phi_bound": 1e-12,
    "psi_chain": 1e-12,
    "map_oracle": 1e-8,
    "map_origin": 1e-13,
    "map_centre": 1e-10,
    "psi_endpoints": 1e-10,
    "curvature_forms": 1e-12,
    "normal_slopes": 1e-12,
    "mse_order": 1.9,
    "mixed_centre": 1e-10,
    "symmetry": 1e-8,
    "seed_residual": 1e-10,
    "seed_match": 1e-8,
    "square_case": 1e-8,
    "r_diamond": 1e-8,
    "g_diamond": 5e-4,
    "hopf_value": 5e-5,
    "hall_value": 5e-6,
}


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    error: float
    tol: float
    lower_bound: bool = False  # the value must reach tol rather than stay below it

    @property
    def margin(self) -> float:
        return self.error - self.tol if self.lower_bound else self.tol - self.error

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        label = "value" if self.lower_bound else "error"
        return f"{flag} {self.suite}.{self.name} {label}={self.error:.3e} tol={self.tol:.1e} margin={self.margin:.3e}"


def _below(suite, name, error, tol):
    error = float(error)
    return CheckResult(suite, name, bool(error <= tol), error, tol)


def _family_checks(tol):
    s = "family"
    out = []
    out.append(_below(s, "kappa_square", abs(family.kappa(0.5 * math.pi) ** 2 - 0.5 * math.pi**2), tol["kappa_square"]))
    tc = family.t_critical()
    out.append(_below(s, "kappa_critical", family.kappa(tc + 1e-9), tol["kappa_critical"]))
    out.append(_below(s, "t_critical", abs(tc - 1.33248), tol["t_critical"]))
    grid = np.linspace(tc, 0.5 * math.pi, 10**4)
    k = np.asarray(family.kappa(grid))
    out.append(_below(s, "kappa_monotone", max(0.0, -float(np.min(np.diff(k)))), tol["kappa_monotone"]))
    prof = family.inequality_profile(grid[1:])
    out.append(_below(s, "phi_bound", max(0.0, float(np.max(prof.phi)) - math.pi / math.sqrt(2)), tol["phi_bound"]))
    chain = max(float(np.max(prof.vartheta - prof.psi)), float(np.max(math.sqrt(0.5) - prof.vartheta)), 0.0)
    out.append(_below(s, "psi_chain", chain, tol["psi_chain"]))
    rng = np.random.default_rng(7)
    worst = 0.0
    for t in (1.35, 1.45, 0.5 * math.pi):
        z = np.sqrt(rng.uniform(0, 0.95**2, 20)) * np.exp(1j * rng.uniform(0, 2 * math.pi, 20))
        exact = family.map_point(t, z)
        worst = max(worst, max(abs(exact[i] - family.poisson_oracle(t, z[i])) for i in range(z.size)))
    out.append(_below(s, "map_oracle", worst, tol["map_oracle"]))
    ts = np.linspace(tc + 1e-3, 0.5 * math.pi, 20)
    out.append(_below(s, "map_origin", max(abs(family.map_point(t, 0) - 1j * math.sqrt(math.sin(0.5 * math.pi - t))) for t in ts), tol["map_origin"]))
    out.append(_below(s, "map_centre", max(abs(family.map_point(t, family.z_center(t))) for t in ts), tol["map_centre"]))
    thetas = np.linspace(0, 0.5 * math.pi, 200)
    psi = np.asarray(family.psi_of_theta(thetas))
    err = max(abs(psi[0] - 0.5 * math.pi**2), psi[-1], 0.0 if np.all(np.diff(psi) < 0) else math.inf)
    out.append(_below(s, "psi_endpoints", err, tol["psi_endpoints"]))
    return out


def _weierstrass_checks(tol):
    s = "weierstrass"
    out = []
    rng = np.random.default_rng(11)
    q = 0.95 * np.sqrt(rng.uniform(0.01, 1, 200)) * np.exp(1j * rng.uniform(0, 2 * math.pi, 200))
    p = rng.normal(size=200) + 1j * rng.normal(size=200)
    qp = rng.normal(size=200) + 1j * rng.normal(size=200)
    k1 = -4 * np.abs(qp) ** 2 / (np.abs(p) ** 2 * (1 + np.abs(q) ** 2) ** 4)
    k2 = weierstrass.curvature_hg(p, p * q * q, q * q, 2 * q * qp)
    out.append(_below(s, "curvature_forms", np.max(np.abs(k1 - k2) / np.maximum(1, np.abs(k1))), tol["curvature_forms"]))
    fu, fv = weierstrass.slopes(q)
    raw = np.stack([-fu, -fv, np.ones_like(fu)], axis=-1)
    raw /= np.linalg.norm(raw, axis=-1, keepdims=True)
    out.append(_below(s, "normal_slopes", np.max(np.abs(weierstrass.unit_normal(q) - raw)), tol["normal_slopes"]))
    orders = []
    for t, z in ((1.5, 0.3 + 0.2j), (1.45, -0.2 + 0.4j), (0.5 * math.pi, 0.1 - 0.5j)):
        a = abs(weierstrass.second_derivatives(t, z, 1e-3).mse_residual)
        b = abs(weierstrass.second_derivatives(t, z, 1e-4).mse_residual)
        orders.append(math.log10(a / b))
    out.append(CheckResult(s, "mse_order", min(orders) >= tol["mse_order"], min(orders), tol["mse_order"], True))
    worst = 0.0
    for t in np.linspace(family.t_critical() + 1e-3, 0.5 * math.pi, 20):
        ew = family.ew_data(t, family.z_center(t))
        worst = max(worst, abs(weierstrass.mixed_second(ew.p, ew.q, ew.qprime)))
    out.append(_below(s, "mixed_centre", worst, tol["mixed_centre"]))
    cat = weierstrass.catenoid()
    saddle = weierstrass.scherk_saddle()
    worst = 0.0
    for u in (1.5, 2.0, -3.0):
        c = weierstrass.symmetric_point_check(cat, complex(u, 0), 1j, tol["symmetry"])
        worst = max(worst, abs(c.grad_h), abs(c.hess_h_ih))
    for v in (0.3, -0.7, 1.2):
        c = weierstrass.symmetric_point_check(saddle, complex(0, v), 1, tol["symmetry"])
        worst = max(worst, abs(c.grad_h), abs(c.hess_h_ih))
    passing = weierstrass.scan_symmetric_directions(weierstrass.helicoid(), 1 + 1j, 720, tol["symmetry"])
    out.append(_below(s, "symmetry", worst if not passing else math.inf, tol["symmetry"]))
    return out


def _solver_checks(tol):
    s = "solver"
    out = []
    ts = np.linspace(family.t_critical() + 1e-2, 0.5 * math.pi, 10)
    worst = max(float(np.max(np.abs(quad.residual(quad.trapezoid_seed(t))))) for t in ts)
    out.append(_below(s, "seed_residual", worst, tol["seed_residual"]))
    seed = quad.trapezoid_seed(1.45)
    solved = quad.solve_quad(1j * family.a_of_t(1.45))
    err = max(
        quad.config_distance(solved, seed),
        abs(quad.center_curvature(solved).curvature + family.kappa(1.45) ** 2),
    )
    out.append(_below(s, "seed_match", err, tol["seed_match"]))
    square = quad.solve_quad(0j)
    err = max(
        float(np.max(np.abs(square.theta_gaps - 0.5 * math.pi))),
        abs(quad.center_curvature(square).curvature + 0.5 * math.pi**2),
    )
    out.append(_below(s, "square_case", err, tol["square_case"]))
    return out


def _bounds_checks(tol):
    s = "bounds"
    rep = bounds.corollary_constants()
    out = [
        _below(s, "r_diamond", abs(rep.r_diamond - 0.067344733), tol["r_diamond"]),
        _below(s, "g_diamond", abs(rep.g_at_r_diamond - 5.6918), tol["g_diamond"]),
        _below(s, "hopf_value", abs(rep.hopf_value - 5.79608), tol["hopf_value"]),
        _below(s, "hall_value", abs(rep.hall - 5.84865), tol["hall_value"]),
    ]
    ordered = rep.finn_osserman < rep.g_at_r_diamond < rep.hopf_value < rep.hall
    out.append(CheckResult(s, "ordering", ordered, 0.0 if ordered else 1.0, 0.0))
    return out


SUITES: dict[str, Callable] = {
    "family": _family_checks,
    "weierstrass": _weierstrass_checks,
    "solver": _solver_checks,
    "bounds": _bounds_checks,
}


def run_suite(name: str, overrides: dict | None = None) -> list:
    """Run one suite (or ``"all"``) and return its :class:`CheckResult` list."""
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in tol:
            raise KeyError(f"unknown tolerance {key!r}")
        tol[key] = float(value)
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise KeyError(f"unknown suite {name!r}")
    results = []
    for n in names:
        try:
            results.extend(SUITES[n](tol))
        except Exception as err:  # a crashing suite is a failed suite
            results.append(CheckResult(n, f"crashed: {type(err).__name__}: {err}", False, math.inf, 0.0))
    return results
