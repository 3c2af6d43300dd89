import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congestfv import (ConfigurationError, ConstraintViolation, EtaPolicy, MacGrid1D, NonConvergence,
                       PressureLaw, SchemeParams, State, simulate, step)
from congestfv.acceptance import brute_force_step, mirror_errors
from congestfv.runner import build_problem
from congestfv.scheme1d import (choose_eta, compute_timestep, mass_flux, momentum_update,
                                solve_mass_balance, solve_with_retries, stabilized_velocity_split)
from congestfv.pressure import pressure

G8 = MacGrid1D(0.0, 1.0, 8)
LAW = PressureLaw(1e-2, 2.0)


def uniform(rho, u, m=8):
    return State(0.0, np.full(m, rho), np.full(m, u))


# -- eta and time step ----------------------------------------------------


def test_eta_policies():
    rho = np.full(8, 0.5)
    assert choose_eta(rho, SchemeParams(eta=EtaPolicy.adaptive())) == pytest.approx(4.2)
    np.testing.assert_allclose(choose_eta(rho, SchemeParams()), 4.2)
    assert choose_eta(rho, SchemeParams(eta=EtaPolicy.fixed(10))) == 10


def test_eta_ex1_initial():
    case, grid, law, st0 = build_problem("ex1", 1e-4)
    assert choose_eta(st0.rho, SchemeParams(eta=EtaPolicy.adaptive())) == pytest.approx(3.0)
    assert np.max(choose_eta(st0.rho, SchemeParams())) == pytest.approx(3.0)


def test_eta_vacuum_needs_fixed():
    with pytest.raises(ConfigurationError):
        choose_eta(np.zeros(8), SchemeParams())
    assert choose_eta(np.zeros(8), SchemeParams(eta=EtaPolicy.fixed(3.0))) == 3.0


def test_timestep_rest_state():
    st0 = uniform(0.5, 0.0)
    assert compute_timestep(st0, pressure(st0.rho, LAW), 4.2, SchemeParams(), G8) == 0.05


def test_timestep_single_face():
    g = MacGrid1D(0.0, 1.0, 200)
    u = np.zeros(200)
    u[17] = 1.0
    st0 = State(0.0, np.full(200, 0.5), u)
    dt = compute_timestep(st0, pressure(st0.rho, LAW), 4.2, SchemeParams(cfl=1.0), g)
    assert dt == pytest.approx(0.005)


def test_timestep_ex1():
    case, grid, law, st0 = build_problem("ex1", 1e-4)
    params = SchemeParams()
    dt = compute_timestep(st0, pressure(st0.rho, law), choose_eta(st0.rho, params), params, grid)
    assert 0 < dt <= params.dt_max


# -- fluxes ----------------------------------------------------------------


def test_split_examples():
    g = MacGrid1D(0.0, 1.0, 3)
    up, um, _ = stabilized_velocity_split(np.full(3, 2.0), np.zeros(3), 1.0, 0.1, g)
    np.testing.assert_array_equal(up, 2.0)
    np.testing.assert_array_equal(um, 0.0)
    # pressure rising to the right of face 0 only: delta_u > 0 there
    p = np.array([0.0, 10.0, 10.0])
    up, um, du = stabilized_velocity_split(np.zeros(3), p, g.dx / (0.1 * 10), 0.1, g)
    assert du[0] == pytest.approx(1.0)
    assert (up[0], um[0]) == (0.0, pytest.approx(-1.0))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_split_identity(seed):
    rng = np.random.default_rng(seed)
    u, p = rng.normal(size=8), rng.uniform(0, 5, 8)
    up, um, du = stabilized_velocity_split(u, p, 3.0, 0.01, G8)
    assert np.all(up >= 0) and np.all(um <= 0)
    np.testing.assert_allclose(up + um, u - du, rtol=0, atol=1e-15 * (1 + np.abs(u) + np.abs(du)).max())


def test_mass_flux_examples():
    up, um, _ = stabilized_velocity_split(np.ones(8), np.zeros(8), 1.0, 0.1, G8)
    np.testing.assert_allclose(mass_flux(np.full(8, 0.5), up, um, G8), 0.5)
    rho = np.full(8, 0.2)
    rho[3] = 0.8
    up, um, du = stabilized_velocity_split(np.zeros(8), pressure(rho, LAW), 4.0, 0.01, G8)
    F = mass_flux(rho, up, um, G8)
    assert du[2] > 0 and F[2] < 0
    assert abs(np.sum(F - np.roll(F, 1))) < 1e-15
    with pytest.raises(ConstraintViolation):
        mass_flux(np.full(8, 1.0), up, um, G8)


# -- mass balance and momentum ---------------------------------------------


def test_mass_rest_state():
    sol = solve_mass_balance(uniform(0.5, 0.0), 0.01, 4.2, SchemeParams(), G8, LAW)
    np.testing.assert_array_equal(sol.rho, 0.5)
    assert sol.iterations <= 1
    rho, flux, its = sol
    assert its == sol.iterations


def test_mass_constant_advection():
    sol = solve_mass_balance(uniform(0.5, 1.0), 0.01, 4.2, SchemeParams(), G8, LAW)
    np.testing.assert_allclose(sol.rho, 0.5, rtol=1e-15)


def test_picard_solver_option():
    st0 = State(0.0, np.linspace(0.2, 0.6, 8), np.linspace(-0.5, 0.5, 8))
    a = solve_mass_balance(st0, 1e-3, 4.2, SchemeParams(), G8, LAW)
    b = solve_mass_balance(st0, 1e-3, 4.2, SchemeParams(solver="picard"), G8, LAW)
    np.testing.assert_allclose(a.rho, b.rho, atol=1e-11)


def test_momentum_rest_and_translation():
    params = SchemeParams()
    for u0 in (0.0, 0.7):
        st0 = uniform(0.5, u0)
        sol = solve_mass_balance(st0, 0.01, 4.2, params, G8, LAW)
        u = momentum_update(st0, sol.rho, sol.flux, pressure(sol.rho, LAW), 0.01, G8, params)
        np.testing.assert_allclose(u, u0, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_momentum_matches_conservative_form(seed):
    """Non-conservative update equals the conservative balance divided out."""
    rng = np.random.default_rng(seed)
    g = MacGrid1D(0.0, 1.0, 4)
    rho_n, u = rng.uniform(0.05, 0.9, 4), rng.uniform(-1.5, 1.5, 4)
    st0 = State(0.0, rho_n, u)
    params, dt = SchemeParams(), 2e-3
    eta = choose_eta(rho_n, params)
    sol = solve_mass_balance(st0, dt, eta, params, g, LAW)
    p = pressure(sol.rho, LAW)
    mine = momentum_update(st0, sol.rho, sol.flux, p, dt, g, params)
    F, dx = sol.flux, g.dx
    ref = np.empty(4)
    for k in range(4):
        kp, km = (k + 1) % 4, (k - 1) % 4
        fl, fr = 0.5 * (F[k] + F[km]), 0.5 * (F[kp] + F[k])
        ul = u[km] if fl >= 0 else u[k]
        ur = u[k] if fr >= 0 else u[kp]
        mom = 0.5 * (rho_n[k] + rho_n[kp]) * u[k] - dt / dx * (fr * ur - fl * ul) - dt / dx * (p[kp] - p[k])
        ref[k] = mom / (0.5 * (sol.rho[k] + sol.rho[kp]))
    np.testing.assert_allclose(mine, ref, rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_step_matches_brute_force(seed):
    rng = np.random.default_rng(100 + seed)
    g = MacGrid1D(0.0, 1.0, 4)
    rho, u = rng.uniform(0.05, 0.9, 4), rng.uniform(-1.5, 1.5, 4)
    st1, rep = step(State(0.0, rho, u), SchemeParams(), g, LAW)
    eta = choose_eta(rho, SchemeParams())
    r_ref, u_ref, ok = brute_force_step(rho, u, eta, rep.dt_used, g.dx, LAW.epsilon, LAW.gamma)
    assert ok
    np.testing.assert_allclose(st1.rho, r_ref, atol=1e-8)
    np.testing.assert_allclose(st1.u, u_ref, atol=1e-8)


# -- full steps ------------------------------------------------------------


def test_step_rest_state():
    st0 = uniform(0.4, 0.0)
    st1, rep = step(st0, SchemeParams(), G8, LAW)
    np.testing.assert_array_equal(st1.rho, st0.rho)
    np.testing.assert_array_equal(st1.u, 0.0)
    assert rep.energy_increase == 0.0
    assert st1.t == rep.dt_used == 0.05


def test_step_ex1_one_step():
    case, grid, law, st0 = build_problem("ex1", 1e-4)
    st1, rep = step(st0, SchemeParams(), grid, law)
    assert abs(rep.mass_drift) <= 1e-12
    assert rep.max_density < 1 and rep.c_emp > 0


def test_step_ex2_one_step():
    case, grid, law, st0 = build_problem("ex2", 1e-4)
    st1, rep = step(st0, SchemeParams(), grid, law)
    assert rep.min_density >= 0


def test_step_dt_cap():
    case, grid, law, st0 = build_problem("ex1", 1e-2)
    st1, rep = step(st0, SchemeParams(), grid, law, dt_cap=1e-5)
    assert rep.dt_used == 1e-5 and st1.t == 1e-5


def test_retry_halves_dt():
    calls = []

    def solve(dt):
        calls.append(dt)
        if len(calls) < 3:
            raise NonConvergence("no", None, 1.0)
        return "ok"

    out, dt, retries = solve_with_retries(solve, 0.4, SchemeParams())
    assert (out, dt, retries) == ("ok", 0.1, 2)
    with pytest.raises(NonConvergence, match="halvings"):
        solve_with_retries(lambda dt: (_ for _ in ()).throw(NonConvergence("x", None, 1.0)),
                           1.0, SchemeParams(dt_retry_limit=2))


@pytest.fixture(scope="module")
def ex1_run():
    return simulate("ex1", 1e-4)


def test_ex1_invariants(ex1_run):
    tol = ex1_run.params.tol
    e_prev = None
    for rep in ex1_run.reports:
        assert rep.max_density < 1 and rep.min_density >= 0 and rep.c_emp > 0
        assert abs(rep.mass_drift) <= 200 * rep.dt_used * tol
        assert rep.energy_increase <= 1e-10 * max(1.0, rep.total_energy - rep.energy_increase)
        if e_prev is not None:
            assert rep.total_energy <= e_prev + 1e-10 * max(1, e_prev)
        e_prev = rep.total_energy
    assert ex1_run.final.t == pytest.approx(0.05, abs=1e-14)


def test_ex1_mirror_symmetry(ex1_run):
    assert max(mirror_errors(ex1_run.final)) <= 10 * ex1_run.params.tol


def test_negative_control_small_eta(caplog):
    """An eta well below 2/rho breaks the energy inequality and is reported."""
    params = SchemeParams(eta=EtaPolicy.fixed(0.05))
    with caplog.at_level(logging.WARNING, logger="congestfv.scheme1d"):
        res = simulate("ex1", 1e-2, params=params, max_steps=3)
    assert max(r.energy_increase for r in res.reports) > 0
    assert "energy increased" in caplog.text
    with pytest.raises(ConstraintViolation, match="energy"):
        simulate("ex1", 1e-2, params=SchemeParams(eta=EtaPolicy.fixed(0.05), strict=True),
                 max_steps=3)
