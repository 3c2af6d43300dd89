"""Semi-implicit staggered scheme in one space dimension.

One step solves the nonlinear mass balance for ``rho^{n+1}`` with the
velocity shifted by ``delta_u = eta dt d_x p(rho^{n+1})``, then updates the
face velocities explicitly using the resulting mass fluxes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .diagnostics import density_bound_report, pressure_l1, stabilization_l2, total_energy
from .errors import ConfigurationError, ConstraintViolation, NonConvergence
from .grid import MacGrid1D
from .nonlinear import newton, picard, stencil_matrix
from .params import SchemeParams, StepReport
from .pressure import PressureLaw, pressure
from .state import State

__all__ = [
    "choose_eta",
    "compute_timestep",
    "stabilized_velocity_split",
    "mass_flux",
    "MassSolution",
    "solve_mass_balance",
    "momentum_update",
    "step",
]

log = logging.getLogger(__name__)


def eta_from_faces(rf, params: SchemeParams):
    """Apply the eta policy to an array of face densities."""
    pol = params.eta
    if pol.kind == "fixed":
        return pol.value
    rf = np.asarray(rf, dtype=float)
    if np.all(rf < params.vacuum_floor):
        raise ConfigurationError("all faces are at vacuum; use a fixed eta")
    bound = 2.0 * (1.0 + pol.margin) / np.maximum(rf, params.vacuum_floor)
    if pol.kind == "adaptive":
        return float(np.max(bound))
    return bound


def choose_eta(rho_n, params: SchemeParams):
    """Stabilization coefficient for the next step.

    Returns a float for the ``fixed`` and ``adaptive`` policies and one
    value per face for the ``local`` policy.
    """
    rho_n = np.asarray(rho_n, dtype=float)
    return eta_from_faces(0.5 * (rho_n + np.roll(rho_n, -1)), params)


def face_timestep(u, dp, eta, h):
    """Smallest ``h / (|u| + sqrt(eta |dp|))`` over faces, ``inf`` if unconstrained."""
    den = np.abs(u) + np.sqrt(eta * np.abs(dp))
    den = den[den > 0]
    with np.errstate(over="ignore"):
        return float(np.min(h / den)) if den.size else np.inf


def compute_timestep(state: State, p_prev, eta, params: SchemeParams, grid: MacGrid1D) -> float:
    """Explicit time step from the current velocity and pressure jumps.

    ``dt = cfl * min_faces dx / (|u| + sqrt(eta |p_{i+1} - p_i|))``, capped
    at ``params.dt_max``.  Faces with zero denominator impose nothing.
    """
    p_prev = grid.check(p_prev, "pressure")
    dt = params.cfl * face_timestep(state.u, np.roll(p_prev, -1) - p_prev, eta, grid.dx)
    return min(dt, params.dt_max)


def stabilized_velocity_split(u_n, p_next, eta, dt, grid: MacGrid1D):
    """Return ``(u_plus, u_minus, delta_u)`` with ``u_plus + u_minus = u_n - delta_u``."""
    u_n = grid.check(u_n, "velocity")
    p_next = grid.check(p_next, "pressure")
    du = eta * dt * (np.roll(p_next, -1) - p_next) / grid.dx
    up = np.maximum(u_n, 0.0) - np.minimum(du, 0.0)
    um = np.minimum(u_n, 0.0) - np.maximum(du, 0.0)
    return up, um, du


def mass_flux(rho_next, u_plus, u_minus, grid: MacGrid1D):
    """Upwind face flux ``rho_i u_plus + rho_{i+1} u_minus``."""
    rho_next = grid.check(rho_next, "density")
    if np.any(rho_next < 0.0) or np.any(rho_next >= 1.0):
        raise ConstraintViolation("density outside [0, 1) in mass flux")
    return rho_next * grid.check(u_plus) + np.roll(rho_next, -1) * grid.check(u_minus)


@dataclass
class MassSolution:
    """Result of the implicit mass balance; unpacks as ``(rho, flux, iterations)``."""

    rho: np.ndarray
    flux: np.ndarray
    iterations: int
    residual: float
    delta_u: np.ndarray

    def __iter__(self):
        return iter((self.rho, self.flux, self.iterations))


def _finish(rho_n, rho, flux_div, dt, max_shift=1e-12):
    """Conservative final update ``rho_n - dt div F`` when it is a roundoff correction.

    With it the discrete mass balance holds to roundoff for the returned
    fluxes, so total mass is exact and the momentum update sees a
    consistent dual mass balance.  Near the congestion bound the residual
    itself is only known to a large absolute accuracy; the correction is
    then skipped and the Newton iterate returned unchanged.
    """
    cand = rho_n - dt * flux_div
    if (np.all(cand >= 0.0) and np.all(cand < 1.0)
            and np.max(np.abs(cand - rho)) <= max_shift):
        return cand
    return rho


def solve_mass_balance(state_n: State, dt, eta, params: SchemeParams, grid: MacGrid1D,
                       law: PressureLaw) -> MassSolution:
    """Solve the implicit mass balance for ``rho^{n+1}``.

    Raises
    ------
    NonConvergence
        If the solver does not reach ``params.tol`` (rate-form max-norm).
    """
    rho_n = np.ascontiguousarray(state_n.rho, dtype=float)
    u = np.ascontiguousarray(state_n.u, dtype=float)
    eta_f = np.ascontiguousarray(np.broadcast_to(eta, rho_n.shape), dtype=float)
    dx, eps, gam = grid.dx, law.epsilon, law.gamma

    def fun(r):
        R, F, du = kernels.mass_residual_1d(r, rho_n, u, eta_f, dt, dx, eps, gam)
        R, F, du = np.asarray(R), np.asarray(F), np.asarray(du)
        scale = np.max((r + rho_n) / dt + (np.abs(F) + np.abs(np.roll(F, 1))) / dx)
        return R, scale, (F, du)

    def jac(r):
        return stencil_matrix(*map(np.asarray, kernels.mass_jacobian_1d(r, u, eta_f, dt, dx, eps, gam)))

    if params.solver == "newton":
        sol = newton(fun, jac, rho_n, params.tol, params.max_iter)
    else:
        sol = picard(fun, rho_n, dt, params.tol, params.max_iter)
    F, du = sol.aux
    rho = _finish(rho_n, sol.x, (F - np.roll(F, 1)) / dx, dt)
    return MassSolution(rho, F, sol.iterations, sol.residual, du)


def momentum_update(state_n: State, rho_next, fluxes, p_next, dt, grid: MacGrid1D,
                    params: SchemeParams):
    """Explicit upwind velocity update on the faces.

    Velocities on faces whose new density is below ``params.vacuum_floor``
    are left unchanged.
    """
    args = [np.ascontiguousarray(grid.check(a), dtype=float)
            for a in (state_n.u, rho_next, fluxes, p_next)]
    return np.asarray(kernels.momentum_update_1d(*args, dt, grid.dx, params.vacuum_floor))


def _report(index, state_n, state, dt, eta, sol, retries, law, grid, params, delta_u_l2):
    e_old = total_energy(state_n, law, grid)
    e_new = total_energy(state, law, grid)
    rmax, cemp = density_bound_report(state, law)
    rmin = float(np.min(state.rho))
    if rmin < 0.0:
        raise ConstraintViolation(f"negative density {rmin!r} at t={state.t}")
    vol = grid.cell_area if hasattr(grid, "cell_area") else grid.dx
    mass_old = vol * float(np.sum(state_n.rho))
    mass = vol * float(np.sum(state.rho))
    inc = e_new.total - e_old.total
    if inc > params.energy_slack * max(1.0, e_old.total):
        msg = f"energy increased by {inc:.3e} at step {index} (t={state.t:.6g})"
        if params.strict:
            raise ConstraintViolation(msg)
        log.warning(msg)
    return StepReport(
        step=index, t=state.t, dt_used=dt, eta_used=float(np.max(eta)),
        iterations=sol.iterations, dt_retries=retries, residual=float(sol.residual),
        total_mass=mass, mass_drift=mass - mass_old, total_energy=e_new.total,
        internal_energy=e_new.internal, kinetic_energy=e_new.kinetic, energy_increase=inc,
        max_density=rmax, min_density=rmin, c_emp=cemp,
        pressure_l1=pressure_l1(state, law, grid), stabilization_l2=delta_u_l2,
    )


def solve_with_retries(solve, dt, params: SchemeParams):
    """Call ``solve(dt)``, halving ``dt`` on NonConvergence; returns ``(result, dt, retries)``."""
    retries = 0
    while True:
        try:
            return solve(dt), dt, retries
        except NonConvergence as exc:
            if retries >= params.dt_retry_limit:
                raise NonConvergence(
                    f"{exc} (after {retries} time-step halvings, dt={dt:.3e})",
                    exc.iterate, exc.residual) from exc
            retries += 1
            dt *= 0.5
            log.info("nonlinear solve failed, retrying with dt=%.3e", dt)


def step(state_n: State, params: SchemeParams, grid: MacGrid1D, law: PressureLaw,
         dt_cap=None, index=0):
    """Advance one time step.

    ``dt_cap`` limits the step (e.g. to land on an output time).  Returns
    the new state and its :class:`StepReport`.
    """
    grid.check(state_n.rho, "density")
    grid.check(state_n.u, "velocity")
    eta = choose_eta(state_n.rho, params)
    dt = compute_timestep(state_n, pressure(state_n.rho, law), eta, params, grid)
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    sol, dt, retries = solve_with_retries(
        lambda h: solve_mass_balance(state_n, h, eta, params, grid, law), dt, params)
    p_next = pressure(sol.rho, law)
    u_next = momentum_update(state_n, sol.rho, sol.flux, p_next, dt, grid, params)
    state = State(t=state_n.t + dt, rho=sol.rho, u=u_next)
    rep = _report(index, state_n, state, dt, eta, sol, retries, law, grid, params,
                  stabilization_l2(sol.delta_u, grid))
    return state, rep
