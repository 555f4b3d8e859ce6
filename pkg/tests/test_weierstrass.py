import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scherk import family, weierstrass as ws
from scherk.errors import DegenerateError, DomainError, PoleError

HALF_PI = 0.5 * math.pi
TC = family.t_critical()

# Frozen: central difference (step 1e-5 in u, v) of graph slopes obtained by inverting the planar map.
FD_FUV_145 = -1.0645150026798722  # t = 1.45, z = 0.25 - 0.35i
Z_FD = 0.25 - 0.35j

unit_q = st.builds(
    lambda r, a: r * complex(math.cos(a), math.sin(a)),
    st.floats(0, 0.95), st.floats(0, 2 * math.pi),
)
finite = st.floats(-3, 3)


def test_curvature_examples():
    assert ws.curvature(1, 0, 1) == -4.0
    assert ws.curvature(1, 0.5, 0) == 0.0
    with pytest.raises(DegenerateError):
        ws.curvature(0, 0.1, 1)
    with pytest.raises(DomainError):
        ws.curvature(1, 1.0, 1)


def test_curvature_forms_agree():
    rng = np.random.default_rng(0)
    n = 1000
    q = 0.95 * np.sqrt(rng.uniform(1e-4, 1, n)) * np.exp(1j * rng.uniform(0, 2 * math.pi, n))
    p = rng.normal(size=n) + 1j * rng.normal(size=n)
    qp = rng.normal(size=n) + 1j * rng.normal(size=n)
    k = ws.curvature(p, q, qp)
    alt = ws.curvature_hg(p, p * q * q, q * q, 2 * q * qp)
    assert np.max(np.abs(k - alt) / np.abs(k)) < 1e-12


def test_normal_and_slopes_examples():
    np.testing.assert_allclose(ws.unit_normal(0), [0, 0, 1], atol=1e-15)
    assert ws.slopes(0.5j) == pytest.approx((4 / 3, 0.0), abs=1e-15)
    assert ws.slopes(0.5) == pytest.approx((0.0, 4 / 3), abs=1e-15)
    assert ws.w_factor(0.5) == pytest.approx(5 / 3, abs=1e-15)
    with pytest.raises(PoleError):
        ws.slopes(1j)
    with pytest.raises(DomainError):
        ws.unit_normal(1.0)


@given(unit_q)
def test_normal_matches_slopes(q):
    fu, fv = ws.slopes(q)
    raw = np.array([-fu, -fv, 1.0])
    assert np.max(np.abs(ws.unit_normal(q) - raw / np.linalg.norm(raw))) < 1e-12
    assert abs(np.linalg.norm(ws.unit_normal(q)) - 1) < 1e-14
    assert abs(ws.w_factor(q) ** 2 - (1 + fu * fu + fv * fv)) < 1e-10 * ws.w_factor(q) ** 2


def test_second_derivatives_square_centre():
    sd = ws.second_derivatives(HALF_PI, 0, 1e-4)
    assert abs(sd.mse_residual) < 1e-6
    assert abs(sd.f_uu + sd.f_vv) < 1e-6


def test_mse_convergence_order():
    rng = np.random.default_rng(1)
    ts = rng.uniform(TC + 0.02, HALF_PI, 50)
    z = np.sqrt(rng.uniform(0, 0.6**2, 50)) * np.exp(1j * rng.uniform(0, 2 * math.pi, 50))
    orders = []
    for t, zz in zip(ts, z):
        a = abs(ws.second_derivatives(t, zz, 1e-3).mse_residual)
        b = abs(ws.second_derivatives(t, zz, 1e-4).mse_residual)
        orders.append(math.log10(a / b))
    assert min(orders) >= 1.9


def test_second_derivatives_match_analytic():
    for t, z in ((1.45, Z_FD), (1.5, 0.4j), (HALF_PI, 0.3 + 0.3j)):
        exact = ws.analytic_hessian(t, z)
        approx = ws.second_derivatives(t, z, 1e-4)
        np.testing.assert_allclose((approx.f_uu, approx.f_uv, approx.f_vv), exact, atol=1e-6)
        fu, fv = ws.slopes(family.ew_data(t, z).q)
        assert abs(ws._mse(fu, fv, *exact)) < 1e-10 * (1 + max(map(abs, exact)))


def test_second_derivatives_step_domain():
    for h in (1e-6, 0.1):
        with pytest.raises(DomainError):
            ws.second_derivatives(1.45, 0, h)


def test_mixed_second_vs_fd_oracle():
    ew = family.ew_data(1.45, Z_FD)
    assert abs(ws.mixed_second(ew.p, ew.q, ew.qprime) - FD_FUV_145) <= 1e-6


def test_mixed_second_vs_live_fd():
    t, z = 1.5, -0.3 + 0.2j
    w = complex(family.map_point(t, z))
    d = 1e-5

    def fu_at(u, v):
        return ws.slopes(family.ew_data(t, ws.invert_map(t, complex(u, v), z)).q)[0]

    fd = (fu_at(w.real, w.imag + d) - fu_at(w.real, w.imag - d)) / (2 * d)
    ew = family.ew_data(t, z)
    assert abs(ws.mixed_second(ew.p, ew.q, ew.qprime) - fd) < 1e-6


def test_mixed_second_vanishes_at_centre():
    for t in np.linspace(TC + 1e-3, HALF_PI, 20):
        ew = family.ew_data(t, family.z_center(t))
        assert abs(ws.mixed_second(ew.p, ew.q, ew.qprime)) < 1e-10


def test_invert_map_and_graph_height():
    t = 1.45
    for z in (0.0, 0.3 - 0.2j, -0.5 + 0.5j):
        w = family.map_point(t, z)
        assert abs(ws.invert_map(t, w) - z) < 1e-12
    c = math.sqrt(2) / math.pi
    u, v = 0.2, -0.3
    assert abs(ws.graph_height(HALF_PI, u, v) - c * math.log(math.cos(v / c) / math.cos(u / c))) < 1e-12


def test_surface_point():
    s = ws.surface_point(1.45, family.z_center(1.45))
    assert abs(s.position[0]) < 1e-10 and abs(s.position[1]) < 1e-10
    assert abs(s.curvature + family.kappa(1.45) ** 2) < 1e-12
    assert s.W >= 1
    with pytest.raises(DomainError):
        ws.surface_point(1.45, 0.9995)


def test_mesh_structure():
    m = ws.sample_mesh(1.45, n_r=2, n_theta=4, r_max=0.5)
    assert m.vertices.shape == (8, 3)
    assert m.faces.shape == (8, 3)
    assert m.faces.min() == 0 and m.faces.max() == 7
    obj = m.to_obj().splitlines()
    assert sum(line.startswith("v ") for line in obj) == 8
    assert sum(line.startswith("f ") for line in obj) == 8
    assert min(int(x) for line in obj if line.startswith("f ") for x in line.split()[1:]) == 1
    assert m.to_csv().splitlines()[0] == "u,v,T"


def test_mesh_projects_into_trapezoid_and_clamps():
    t = HALF_PI - 0.1
    m = ws.sample_mesh(t, 64, 64, 0.999)
    geo = family.trapezoid_geometry(t)
    assert np.all(geo.contains(m.vertices[:, 0] + 1j * m.vertices[:, 1], tol=1e-12))
    assert m.clamp_count == 0
    capped = ws.sample_mesh(t, 64, 64, 0.999, t_cap=2.0)
    assert capped.clamp_count > 0
    assert np.max(np.abs(capped.vertices[:, 2])) <= 2.0


def test_mesh_domain():
    with pytest.raises(DomainError):
        ws.sample_mesh(1.45, n_r=1)
    with pytest.raises(DomainError):
        ws.sample_mesh(1.45, r_max=1.0)


def fd_partials(surface, u, v, h=1e-4):
    f = surface.height
    fu = (f(u + h, v) - f(u - h, v)) / (2 * h)
    fv = (f(u, v + h) - f(u, v - h)) / (2 * h)
    fuu = (f(u + h, v) - 2 * f(u, v) + f(u - h, v)) / h**2
    fvv = (f(u, v + h) - 2 * f(u, v) + f(u, v - h)) / h**2
    fuv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4 * h * h)
    return (fu, fv), (fuu, fuv, fvv)


@pytest.mark.parametrize("surface,point", [
    (ws.catenoid(), (1.3, 0.7)),
    (ws.scherk_saddle(), (0.4, -0.6)),
    (ws.helicoid(), (1.0, 0.5)),
])
def test_closed_form_partials(surface, point):
    grad, hess = fd_partials(surface, *point)
    np.testing.assert_allclose(surface.gradient(*point), grad, atol=1e-7)
    np.testing.assert_allclose(surface.hessian(*point), hess, atol=1e-5)
    # every closed-form example is minimal
    fu, fv = surface.gradient(*point)
    assert abs(ws._mse(fu, fv, *surface.hessian(*point))) < 1e-12


def test_catenoid_domain():
    with pytest.raises(DomainError):
        ws.catenoid().gradient(0.5, 0.5)


def test_symmetric_point_demos():
    cat, saddle = ws.catenoid(), ws.scherk_saddle()
    for u in (1.5, 2.0, -3.0):
        assert ws.symmetric_point_check(cat, complex(u, 0), 1j).is_symmetric
    for v in (0.3, -0.7, 1.2):
        assert ws.symmetric_point_check(saddle, complex(0, v), 1).is_symmetric
    for zeta in (1 + 1j, 2 - 0.5j, -1 + 3j):
        assert ws.scan_symmetric_directions(ws.helicoid(), zeta, 720, 1e-8) == []
    # off-axis catenoid point: symmetric along the tangential direction
    zeta = 1.5 * complex(math.cos(0.7), math.sin(0.7))
    assert ws.symmetric_point_check(cat, zeta, 1j * zeta / abs(zeta)).is_symmetric
    with pytest.raises(DomainError):
        ws.symmetric_point_check(cat, 2, 2)


def test_scherk_family_centre_is_symmetric():
    t = 1.45
    surface = ws.scherk_graph(t)
    check = ws.symmetric_point_check(surface, 0, 1j, tol=1e-8)
    assert abs(check.hess_h_ih) < 1e-8


@given(st.floats(0, 2 * math.pi))
def test_rotated_mixed_derivative(c):
    # the rotated mixed derivative equals the mixed partial of F(x e^{ic}) in the rotated frame
    surface = ws.scherk_saddle()
    u, v = 0.3, -0.2
    h = 1e-4
    e1 = complex(math.cos(c), math.sin(c))
    e2 = 1j * e1

    def f(a, b):
        p = complex(u, v) + a * e1 + b * e2
        return surface.height(p.real, p.imag)

    fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)
    assert abs(ws.directional_parts(surface, complex(u, v), c)[1] - fd) < 1e-5


def test_zero_mixed_direction():
    surface = ws.helicoid()
    zeta = 1 + 0.5j
    c = ws.zero_mixed_direction(surface, zeta)
    assert 0 <= c <= HALF_PI
    assert abs(ws.directional_parts(surface, zeta, c)[1]) < 1e-12
    lo = ws.directional_parts(surface, zeta, 0)[1]
    hi = ws.directional_parts(surface, zeta, HALF_PI)[1]
    assert lo * hi < 0
