"""Compiled and pure-Python kernels must agree to roundoff."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congestfv import kernels

py = kernels.backend_module("python")
try:
    cy = kernels.backend_module("cython")
except ImportError:  # extension not built
    cy = None

needs_cy = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_backend_selected():
    assert kernels.BACKEND in ("python", "cython")
    if cy is not None:
        assert kernels.BACKEND == "cython" or kernels.os.environ.get("CONGESTFV_PURE")


def test_pure_env_forces_python(monkeypatch):
    monkeypatch.setenv("CONGESTFV_PURE", "1")
    assert kernels._load().BACKEND == "python"


def _data1d(seed, m):
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.01, 0.97, m)
    rho_n = rng.uniform(0.01, 0.97, m)
    u = rng.normal(size=m)
    eta = rng.uniform(2.0, 50.0, m)
    return rho, rho_n, u, eta


@needs_cy
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(3, 40))
def test_1d_agree(seed, m):
    rho, rho_n, u, eta = _data1d(seed, m)
    args = (1e-3, 1.0 / m, 1e-3, 2.0)
    for a, b in zip(py.mass_residual_1d(rho, rho_n, u, eta, *args),
                    cy.mass_residual_1d(rho, rho_n, u, eta, *args)):
        np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-13 * np.max(np.abs(a)))
    for a, b in zip(py.mass_jacobian_1d(rho, u, eta, *args), cy.mass_jacobian_1d(rho, u, eta, *args)):
        np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-13 * np.max(np.abs(a)))
    F = py.mass_residual_1d(rho, rho_n, u, eta, *args)[1]
    p = 1e-3 * (rho / (1 - rho)) ** 2
    a = py.momentum_update_1d(u, rho, F, p, 1e-3, 1.0 / m, 1e-12)
    b = cy.momentum_update_1d(u, rho, F, p, 1e-3, 1.0 / m, 1e-12)
    np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-14)


@needs_cy
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), mx=st.integers(3, 12), my=st.integers(3, 12))
def test_2d_agree(seed, mx, my):
    rng = np.random.default_rng(seed)
    shape = (mx, my)
    rho, rho_n = rng.uniform(0.01, 0.97, shape), rng.uniform(0.01, 0.97, shape)
    u, v = rng.normal(size=shape), rng.normal(size=shape)
    ex, ey = rng.uniform(2, 50, shape), rng.uniform(2, 50, shape)
    args = (1e-3, 1.0 / mx, 1.0 / my, 1e-3, 2.0)
    ra = py.mass_residual_2d(rho, rho_n, u, v, ex, ey, *args)
    rb = cy.mass_residual_2d(rho, rho_n, u, v, ex, ey, *args)
    for a, b in zip(ra, rb):
        np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-13 * np.max(np.abs(a)))
    for a, b in zip(py.mass_jacobian_2d(rho, u, v, ex, ey, *args), cy.mass_jacobian_2d(rho, u, v, ex, ey, *args)):
        np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-13 * np.max(np.abs(a)))
    F, G = ra[1], ra[2]
    p = 1e-3 * (rho / (1 - rho)) ** 2
    for a, b in zip(py.momentum_update_2d(u, v, rho, F, G, p, 1e-3, 1.0 / mx, 1.0 / my, 1e-12),
                    cy.momentum_update_2d(u, v, rho, F, G, p, 1e-3, 1.0 / mx, 1.0 / my, 1e-12)):
        np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-14)


@pytest.mark.parametrize("mod", [py] + ([cy] if cy is not None else []), ids=lambda m: m.BACKEND)
def test_jacobian_matches_finite_differences(mod):
    rho, rho_n, u, eta = _data1d(3, 6)
    args = (2e-3, 1 / 6, 1e-2, 2.0)
    d, up, lo = mod.mass_jacobian_1d(rho, u, eta, *args)
    J = np.diag(d) + np.diag(up[:-1], 1) + np.diag(lo[1:], -1)
    J[-1, 0] += up[-1]
    J[0, -1] += lo[0]
    h = 1e-7
    fd = np.empty((6, 6))
    for k in range(6):
        e = np.zeros(6)
        e[k] = h
        fd[:, k] = (mod.mass_residual_1d(rho + e, rho_n, u, eta, *args)[0]
                    - mod.mass_residual_1d(rho - e, rho_n, u, eta, *args)[0]) / (2 * h)
    np.testing.assert_allclose(J, fd, rtol=1e-5, atol=1e-5 * np.max(np.abs(fd)))
