"""Semi-implicit staggered scheme on a periodic 2D MAC grid."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .diagnostics import stabilization_l2
from .grid import MacGrid2D
from .nonlinear import newton, picard, stencil_matrix
from .params import SchemeParams
from .pressure import PressureLaw, pressure
from .scheme1d import _finish, _report, eta_from_faces, face_timestep, solve_with_retries
from .state import State2D

__all__ = ["choose_eta2d", "timestep2d", "MassSolution2D", "solve_mass_balance2d", "step2d"]


def choose_eta2d(rho_n, params: SchemeParams):
    """Eta on x-faces and y-faces.

    The ``adaptive`` policy uses one constant for both directions.
    """
    rho_n = np.asarray(rho_n, dtype=float)
    rx = 0.5 * (rho_n + np.roll(rho_n, -1, axis=0))
    ry = 0.5 * (rho_n + np.roll(rho_n, -1, axis=1))
    if params.eta.kind == "adaptive":
        e = eta_from_faces(np.concatenate([rx.ravel(), ry.ravel()]), params)
        return e, e
    return eta_from_faces(rx, params), eta_from_faces(ry, params)


def timestep2d(state: State2D, p, eta, params: SchemeParams, grid: MacGrid2D) -> float:
    """Dimension-wise minimum of the 1D time-step rule, capped at ``dt_max``."""
    p = grid.check(p, "pressure")
    eta_x, eta_y = eta
    tx = face_timestep(state.u, np.roll(p, -1, axis=0) - p, eta_x, grid.dx)
    ty = face_timestep(state.v, np.roll(p, -1, axis=1) - p, eta_y, grid.dy)
    return min(params.cfl * min(tx, ty), params.dt_max)


@dataclass
class MassSolution2D:
    rho: np.ndarray
    flux_x: np.ndarray
    flux_y: np.ndarray
    iterations: int
    residual: float
    delta_u: np.ndarray
    delta_v: np.ndarray


def solve_mass_balance2d(state_n: State2D, dt, eta, params: SchemeParams, grid: MacGrid2D,
                         law: PressureLaw) -> MassSolution2D:
    rho_n = np.ascontiguousarray(state_n.rho, dtype=float)
    u = np.ascontiguousarray(state_n.u, dtype=float)
    v = np.ascontiguousarray(state_n.v, dtype=float)
    ex = np.ascontiguousarray(np.broadcast_to(eta[0], rho_n.shape), dtype=float)
    ey = np.ascontiguousarray(np.broadcast_to(eta[1], rho_n.shape), dtype=float)
    dx, dy, eps, gam = grid.dx, grid.dy, law.epsilon, law.gamma
    shape = rho_n.shape

    def fun(x):
        r = x.reshape(shape)
        R, F, G, du, dv = map(np.asarray, kernels.mass_residual_2d(
            r, rho_n, u, v, ex, ey, dt, dx, dy, eps, gam))
        scale = np.max((r + rho_n) / dt
                       + (np.abs(F) + np.abs(np.roll(F, 1, axis=0))) / dx
                       + (np.abs(G) + np.abs(np.roll(G, 1, axis=1))) / dy)
        return R.ravel(), scale, (F, G, du, dv)

    def jac(x):
        r = x.reshape(shape)
        return stencil_matrix(*map(np.asarray, kernels.mass_jacobian_2d(
            r, u, v, ex, ey, dt, dx, dy, eps, gam)))

    if params.solver == "newton":
        sol = newton(fun, jac, rho_n.ravel(), params.tol, params.max_iter)
    else:
        sol = picard(fun, rho_n.ravel(), dt, params.tol, params.max_iter)
    F, G, du, dv = sol.aux
    div = (F - np.roll(F, 1, axis=0)) / dx + (G - np.roll(G, 1, axis=1)) / dy
    rho = _finish(rho_n, sol.x.reshape(shape), div, dt)
    return MassSolution2D(rho, F, G, sol.iterations, sol.residual, du, dv)


def momentum_update2d(state_n: State2D, rho_next, flux_x, flux_y, p_next, dt,
                      grid: MacGrid2D, params: SchemeParams):
    args = [np.ascontiguousarray(grid.check(a), dtype=float)
            for a in (state_n.u, state_n.v, rho_next, flux_x, flux_y, p_next)]
    u, v = kernels.momentum_update_2d(*args, dt, grid.dx, grid.dy, params.vacuum_floor)
    return np.asarray(u), np.asarray(v)


def step2d(state_n: State2D, params: SchemeParams, grid: MacGrid2D, law: PressureLaw,
           dt_cap=None, index=0):
    """Advance the 2D state by one step; see :func:`congestfv.scheme1d.step`."""
    for name in ("rho", "u", "v"):
        grid.check(getattr(state_n, name), name)
    eta = choose_eta2d(state_n.rho, params)
    dt = timestep2d(state_n, pressure(state_n.rho, law), eta, params, grid)
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    sol, dt, retries = solve_with_retries(
        lambda h: solve_mass_balance2d(state_n, h, eta, params, grid, law), dt, params)
    p_next = pressure(sol.rho, law)
    u, v = momentum_update2d(state_n, sol.rho, sol.flux_x, sol.flux_y, p_next, dt, grid, params)
    state = State2D(t=state_n.t + dt, rho=sol.rho, u=u, v=v)
    eta_used = max(float(np.max(eta[0])), float(np.max(eta[1])))
    rep = _report(index, state_n, state, dt, eta_used, sol, retries, law, grid, params,
                  stabilization_l2((sol.delta_u, sol.delta_v), grid))
    return state, rep
