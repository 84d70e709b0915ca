import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from cdlab.bubbles import t0
from cdlab.discretize import exponential_upg_matrix
from cdlab.mesh import DEFAULT_ORDER, Mesh1D, ScalarFn, composite_rule, hat_full
from cdlab.oracles import (
    P1Function,
    elliptic_projection_uf,
    exact_const_f,
    exact_const_f_derivative,
    exact_solution,
    greens,
    interp_energy_error,
    inverse_via_greens,
    l2_project,
    poisson_uf,
    projection_basis,
    transport,
)

EXACT_REF = 0.49330714907571514  # u(0.5), eps = 0.1, mpmath
GREENS_REF = 0.91177153311072623  # G(0.5, 0.25), eps = 0.1, mpmath

fns = st.sampled_from(
    [ScalarFn.const(1.0), ScalarFn.sin(np.pi), ScalarFn.cos(2 * np.pi), ScalarFn.poly([0.3, -1.0, 2.0, 0.5])]
)


def test_transport_constant():
    f = ScalarFn.const(1.0)
    assert transport("LR", f, 0.3) == pytest.approx(0.3)
    assert transport("RL", f, 0.3) == pytest.approx(-0.7)
    assert transport("Shifted", f, 0.3) == pytest.approx(-0.2)
    with pytest.raises(ValueError):
        transport("XY", f, 0.3)


@given(fns, st.floats(0, 1))
def test_transport_difference_is_integral(f, x):
    d = transport("LR", f, x) - transport("RL", f, x)
    assert d == pytest.approx(f.mean(), abs=1e-12)


def test_transport_quadrature_path_matches_closed_form():
    f = ScalarFn.sin(np.pi)
    g = ScalarFn(lambda x: np.sin(np.pi * x))
    x = np.linspace(0, 1, 9)
    np.testing.assert_allclose(transport("LR", g, x), transport("LR", f, x), atol=1e-12)


def test_exact_const_f_values():
    assert exact_const_f(0.1, 0.5) == pytest.approx(EXACT_REF, rel=1e-14)
    assert exact_const_f(0.1, 0.0) == 0.0
    assert exact_const_f(0.1, 1.0) == pytest.approx(0.0, abs=1e-16)
    assert exact_const_f(1e-8, 0.5) == 0.5


def test_tiny_eps_stays_finite():
    x = np.linspace(0, 1, 101)
    for eps in (1e-300, 5e-324, 1e-200):
        assert np.all(np.isfinite(exact_const_f(eps, x)))
        assert np.all(np.isfinite(greens(eps, x[:, None], x[None, :])))


@pytest.mark.parametrize("eps", [1.0, 0.1, 1e-2, 1e-3])
def test_exact_const_f_ode_residual(eps):
    x = np.linspace(0.0, 1.0, 100)
    # u'' = -E'' with E'' = E'/eps for the layer part
    up = exact_const_f_derivative(eps, x)
    upp = -(1.0 - up) / eps
    res = -eps * upp + up - 1.0
    assert np.max(np.abs(res)) < 1e-8 * max(1.0, np.max(np.abs(up)))


@given(fns, st.floats(-3, 0))
def test_exact_solution_ode_residual(f, le):
    eps = 10.0**le
    u = exact_solution(eps, f)
    x = np.linspace(0.02, 0.98, 25)
    d = 1e-5
    upp = (u.derivative(x + d) - u.derivative(x - d)) / (2 * d)
    res = -eps * upp + u.derivative(x) - f(x)
    scale = 1 + np.max(np.abs(u.derivative(x))) + eps * np.max(np.abs(upp))
    assert np.max(np.abs(res)) < 1e-5 * scale
    assert abs(u(np.array([0.0]))[0]) < 1e-12 and abs(u(np.array([1.0]))[0]) < 1e-12


def test_exact_solution_matches_const_closed_form():
    x = np.linspace(0, 1, 11)
    np.testing.assert_allclose(exact_solution(0.05, ScalarFn.const(1.0))(x), exact_const_f(0.05, x), atol=1e-14)


def test_greens_values_and_limits():
    assert greens(0.1, 0.5, 0.25) == pytest.approx(GREENS_REF, rel=1e-13)
    for x, s in ((0.0, 0.4), (0.4, 0.0), (0.4, 1.0), (1.0, 0.3)):
        assert greens(0.1, x, s) == pytest.approx(0.0, abs=1e-12)
    assert greens(1e-6, 0.6, 0.3) == pytest.approx(1.0, abs=1e-12)
    assert greens(1e-6, 0.3, 0.6) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(-4, 0), st.floats(0.05, 0.95))
def test_greens_monotone_in_s(le, x):
    eps = 10.0**le
    below = greens(eps, x, np.linspace(0, x, 30, endpoint=False))
    above = greens(eps, x, np.linspace(x, 1, 30))
    assert np.all(np.diff(below) >= -1e-12)
    assert np.all(np.diff(above) <= 1e-12)


@pytest.mark.parametrize("ratio", [10, 1, 0.1, 1e-4])
def test_greens_inverse(ratio):
    n = 20
    m = Mesh1D(n)
    eps = ratio * m.h
    mat = exponential_upg_matrix(t0(eps, m.h), n - 1).to_dense()
    assert np.max(np.abs(mat @ inverse_via_greens(eps, m) - np.eye(n - 1))) < 1e-8


def test_greens_inverse_small_eps_is_lower_ones():
    g = inverse_via_greens(1e-9, Mesh1D(6))
    np.testing.assert_allclose(g, np.tril(np.ones((5, 5))), atol=1e-12)
    assert inverse_via_greens(0.1, Mesh1D(2)).shape == (1, 1)


@pytest.mark.parametrize("target", ["M_h", "M_bar", "M_tilde"])
def test_l2_project_against_lstsq(target):
    m = Mesh1D(12)
    g = lambda x: np.exp(x) * np.sin(3 * x)
    p = l2_project(g, target, m)
    basis = projection_basis(target, m)
    x, w = composite_rule(m.nodes, DEFAULT_ORDER)
    hats = np.stack([hat_full(m, k, x) for k in range(m.n + 1)])
    phi = basis @ hats
    sw = np.sqrt(w)
    coeffs, *_ = np.linalg.lstsq((phi * sw).T, g(x) * sw, rcond=None)
    np.testing.assert_allclose(p.coeffs, coeffs, atol=1e-10)


def test_l2_project_idempotent_and_mean_zero():
    m = Mesh1D(10)
    v = P1Function(m, np.r_[0.0, np.sin(np.arange(1, 10)), 0.0], None)
    np.testing.assert_allclose(l2_project(v, "M_h", m).nodal, v.nodal, atol=1e-12)
    tied = np.r_[0.7, np.cos(np.arange(1, 10)), 0.7]
    w = P1Function(m, tied, None)
    np.testing.assert_allclose(l2_project(w, "M_tilde", m).nodal, tied, atol=1e-12)
    assert l2_project(np.exp, "M_bar", m).mean() == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        projection_basis("M_x", m)


def test_projection_of_shifted_line_oscillates_at_ends():
    m = Mesh1D(84)
    p = l2_project(lambda x: x - 0.5, "M_tilde", m)
    assert p.nodal[0] == p.nodal[-1]
    d = np.diff(p.nodal)
    assert d[0] < 0 and d[-1] < 0 and np.all(d[10:-10] > 0)


def test_poisson_uf():
    x = np.linspace(0, 1, 13)
    np.testing.assert_allclose(poisson_uf(lambda s: np.ones_like(s), x), 0.5 * (x - x * x), atol=1e-14)
    np.testing.assert_allclose(poisson_uf(lambda s: np.sin(np.pi * s), x), np.sin(np.pi * x) / np.pi**2, atol=1e-13)


def test_elliptic_projection_uf_f1():
    m = Mesh1D(8)
    w = elliptic_projection_uf(ScalarFn.const(1.0), m)
    x = np.linspace(0, 1, 41)
    # P2 reproduces the quadratic u^f exactly
    np.testing.assert_allclose(w(x), 0.5 * (x - x * x), atol=1e-13)
    np.testing.assert_allclose(-w.derivative(x[1:-1]), x[1:-1] - 0.5, atol=1e-12)


def test_interp_energy_error_closed_form():
    assert interp_energy_error(1e-3, 0.1) == pytest.approx(490.0, rel=1e-12)
    assert interp_energy_error(1e-3, 0.05) == pytest.approx(480.0, rel=1e-12)
    eps, h = 0.02, 0.05
    full = interp_energy_error(eps, h, "full")
    left = interp_energy_error(eps, h, "left")
    last = interp_energy_error(eps, h, "last")
    assert left + last == pytest.approx(full, rel=1e-12)
    assert left == pytest.approx(np.exp(-2 * h / eps) * full, rel=1e-3)
    with pytest.raises(ValueError):
        interp_energy_error(eps, h, "middle")
