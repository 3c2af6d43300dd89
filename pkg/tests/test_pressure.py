import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congestfv import DomainError, PressureLaw, helmholtz, pressure, pressure_derivative

rho_st = st.floats(0.0, 0.99, allow_nan=False)
gamma_st = st.sampled_from([1.5, 2.0, 2.5, 3.0])


def test_pressure_values():
    assert pressure(0.0, PressureLaw(0.3, 2.0)) == 0.0
    assert pressure(0.5, PressureLaw(1.0, 2.0)) == pytest.approx(1.0, rel=1e-15)
    assert pressure(0.7, PressureLaw(1e-2, 2.0)) == pytest.approx(1e-2 * (7 / 3) ** 2, rel=1e-14)


def test_pressure_vectorised():
    law = PressureLaw(1.0, 2.0)
    out = pressure(np.array([0.0, 0.5]), law)
    np.testing.assert_allclose(out, [0.0, 1.0])


@pytest.mark.parametrize("bad", [1.0, 1.2, -1e-3])
def test_pressure_domain(bad):
    with pytest.raises(DomainError, match=repr(bad)[:4]):
        pressure(bad, PressureLaw(1.0, 2.0))


def test_derivative_values():
    law = PressureLaw(1.0, 2.0)
    # eps * gamma * rho^(gamma-1) / (1-rho)^(gamma+1) = 2 * 0.5 / 0.5**3
    assert pressure_derivative(0.5, law) == pytest.approx(8.0, rel=1e-14)
    h = 1e-6
    fd = (pressure(0.5 + h, law) - pressure(0.5 - h, law)) / (2 * h)
    assert pressure_derivative(0.5, law) == pytest.approx(fd, rel=1e-6)
    assert pressure_derivative(1e-12, law) < 1e-10


@pytest.mark.parametrize("bad", [0.0, 1.0])
def test_derivative_domain(bad):
    with pytest.raises(DomainError):
        pressure_derivative(bad, PressureLaw(1.0, 2.0))


def test_helmholtz_values():
    law = PressureLaw(1.0, 2.0)
    assert helmholtz(0.0, law) == 0.0
    assert helmholtz(0.5, law) == pytest.approx(0.5, rel=1e-14)
    assert helmholtz(0.5, law, "quad") == pytest.approx(0.5, rel=1e-10)
    with pytest.raises(DomainError):
        helmholtz(1.0, law)


@pytest.mark.parametrize("r", np.linspace(0.05, 0.95, 7))
def test_helmholtz_ode_gamma_2_5(r):
    law = PressureLaw(0.7, 2.5)
    d = 1e-6
    hp = (helmholtz(r + d, law) - helmholtz(r - d, law)) / (2 * d)
    assert r * hp - helmholtz(r, law) == pytest.approx(pressure(r, law), rel=1e-8)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.01, 0.99), gam=gamma_st)
def test_helmholtz_ode_property(r, gam):
    law = PressureLaw(1.0, gam)
    d = 1e-5 * min(r, 1 - r)
    hp = (helmholtz(r + d, law) - helmholtz(r - d, law)) / (2 * d)
    assert r * hp - helmholtz(r, law) == pytest.approx(pressure(r, law), rel=1e-6)


@settings(max_examples=200, deadline=None)
@given(a=rho_st, b=rho_st, gam=gamma_st)
def test_helmholtz_convex(a, b, gam):
    law = PressureLaw(1.0, gam)
    mid = helmholtz(0.5 * (a + b), law)
    assert mid <= 0.5 * (helmholtz(a, law) + helmholtz(b, law)) * (1 + 1e-12) + 1e-300


@given(a=rho_st, b=rho_st, gam=gamma_st)
def test_pressure_monotone(a, b, gam):
    law = PressureLaw(1.0, gam)
    lo, hi = sorted((a, b))
    if lo < hi:
        assert pressure(lo, law) < pressure(hi, law) or pressure(hi, law) == 0.0


@given(r=rho_st, eps=st.floats(1e-9, 10.0), gam=gamma_st)
def test_pressure_scaling(r, eps, gam):
    assert pressure(r, PressureLaw(eps, gam)) == pytest.approx(
        eps * pressure(r, PressureLaw(1.0, gam)), rel=1e-15, abs=0)


@given(r=rho_st)
def test_closed_form_matches_quadrature(r):
    law = PressureLaw(0.37, 2.0)
    assert helmholtz(r, law) == pytest.approx(helmholtz(r, law, "quad"), rel=1e-10, abs=1e-300)
