import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congestfv import ConstraintViolation, MacGrid1D, MacGrid2D, PressureLaw, State, State2D
from congestfv.diagnostics import (density_bound_report, energy_increase, pressure_l1, stabilization_l2,
                                   total_energy)
from congestfv.runner import simulate

G = MacGrid1D(0.0, 1.0, 10)
LAW1 = PressureLaw(1.0, 2.0)


def uniform(rho, u):
    return State(0.0, np.full(10, rho), np.full(10, u))


def test_energy_values():
    e = total_energy(uniform(0.0, 0.0), LAW1, G)
    assert (e.internal, e.kinetic, e.total) == (0.0, 0.0, 0.0)
    e = total_energy(uniform(0.5, 0.0), LAW1, G)
    assert e.internal == pytest.approx(0.5) and e.kinetic == 0.0
    assert total_energy(uniform(0.5, 2.0), LAW1, G).kinetic == pytest.approx(1.0)


def test_energy_2d():
    g = MacGrid2D(0, 1, 0, 1, 4, 5)
    one = np.ones(g.shape)
    e = total_energy(State2D(0.0, 0.5 * one, 2 * one, one), LAW1, g)
    assert e.internal == pytest.approx(0.5)
    assert e.kinetic == pytest.approx(0.5 * 0.5 * (4 + 1))


def test_pressure_l1():
    assert pressure_l1(uniform(0.0, 0), LAW1, G) == 0.0
    assert pressure_l1(uniform(0.5, 0), LAW1, G) == pytest.approx(1.0)


def test_density_bound():
    rmax, c = density_bound_report(uniform(0.5, 0), PressureLaw(1e-4, 2.0))
    assert rmax == 0.5 and c == pytest.approx(5000.0)
    rmax, c = density_bound_report(uniform(1 - 1e-16, 0), PressureLaw(1e-4, 2.0))
    assert c > 0
    with pytest.raises(ConstraintViolation):
        density_bound_report(State(0.0, np.array([0.2, 1.0, 0.3]), np.zeros(3)), LAW1)
    with pytest.raises(ConstraintViolation):
        density_bound_report(State(0.0, np.array([0.2, np.nan, 0.3]), np.zeros(3)), LAW1)


def test_stabilization_l2():
    assert stabilization_l2(np.zeros(10), G) == 0.0
    assert stabilization_l2(np.full(10, -3.0), G) == pytest.approx(3.0)
    g = MacGrid2D(0, 1, 0, 1, 3, 3)
    assert stabilization_l2((np.full((3, 3), 3.0), np.full((3, 3), 4.0)), g) == pytest.approx(5.0)


def test_energy_increase():
    assert energy_increase(1.0, 1.0) < 0
    assert energy_increase(2.0, 2.0 + 1e-9) > 0
    assert energy_increase(0.0, 5e-11) < 0


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), gam=st.sampled_from([1.5, 2.0, 3.0]))
def test_energy_nonnegative_finite(seed, gam):
    rng = np.random.default_rng(seed)
    s = State(0.0, rng.uniform(0, 0.999, 10), rng.normal(size=10) * 10)
    e = total_energy(s, PressureLaw(1e-3, gam), G)
    assert np.isfinite(e.total) and e.internal >= 0 and e.kinetic >= 0


SWEEP = (1e-4, 1e-5, 1e-6, 1e-7)
_peaks = {}


def sweep_peaks(case):
    """Time-maxima of the pressure L1 and stabilization L2 norms per eps (M=200)."""
    if case not in _peaks:
        out = []
        for eps in SWEEP:
            res = simulate(case, eps)
            out.append((max(r.pressure_l1 for r in res.reports),
                        max(r.stabilization_l2 for r in res.reports)))
        _peaks[case] = out
    return _peaks[case]


@pytest.mark.parametrize("case", ["ex3", "ex4"])
def test_pressure_l1_bounded_by_first_eps(case):
    peaks = [p for p, _ in sweep_peaks(case)]
    assert all(p <= peaks[0] for p in peaks[1:]), peaks


@pytest.mark.parametrize("case", ["ex3", "ex4"])
def test_stabilization_l2_bounded_by_first_eps(case):
    peaks = [s for _, s in sweep_peaks(case)]
    assert all(s <= peaks[0] for s in peaks[1:]), peaks
