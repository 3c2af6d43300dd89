"""Reference solutions and error norms.

Exact pressureless Riemann solutions for two test problems, the congested
middle state of the symmetric double shock, and a fine-mesh self reference.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from .errors import ContractError, DomainError
from .pressure import PressureLaw, pressure

__all__ = [
    "exact_example3",
    "exact_example4",
    "double_shock_middle_state",
    "rh_residuals",
    "l1_error",
    "coarsen",
    "fine_mesh_reference",
]


def _region(x, bounds):
    """Index ``k`` of the region ``bounds[k-1] < x < bounds[k]``."""
    return np.searchsorted(np.asarray(bounds), x, side="right")


def exact_example3(t, x):
    """Pressureless solution with a vacuum opening between two diverging states.

    Returns ``(rho, u, defined)``; ``u`` is NaN where ``defined`` is False.
    """
    if not t > 0:
        raise DomainError(f"exact solution requires t > 0, got {t!r}")
    x = np.asarray(x, dtype=float)
    k = _region(x, [-0.5 * t, 0.4 * t])
    rho = np.choose(k, [0.5, 0.0, 0.5])
    u = np.choose(k, [-0.5, np.nan, 0.4])
    return rho, u, k != 1


def exact_example4(t, x):
    """Pressureless solution with vacuum, a jump and a compression ramp (0 < t < 1)."""
    if not 0 < t < 1:
        raise DomainError(f"exact solution valid for 0 < t < 1, got {t!r}")
    x = np.asarray(x, dtype=float)
    k = _region(x, [-0.5 - 0.5 * t, -0.5 + 0.4 * t, 0.4 * t, 0.8 - 0.4 * t])
    ramp_r = np.full_like(x, 0.5 / (1.0 - t))
    ramp_u = (0.4 - x) / (1.0 - t)
    rho = np.choose(k, [0.5, 0.0, 0.5, ramp_r, 0.5])
    u = np.choose(k, [-0.5, np.nan, 0.4, ramp_u, -0.4])
    return rho, u, k != 1


def rh_residuals(law: PressureLaw, rho_l, u_l, rho_star, speed):
    """Mass and momentum jump residuals of the left shock (``u* = 0``)."""
    mass = speed * (rho_star - rho_l) + rho_l * u_l
    mom = speed * (-rho_l * u_l) - (pressure(rho_star, law) - rho_l * u_l ** 2 - pressure(rho_l, law))
    return mass, mom


def double_shock_middle_state(law: PressureLaw, left):
    """Middle state of the symmetric double shock ``(rho_l, u_l) | (rho_l, -u_l)``.

    Returns ``(rho_star, speed)`` where ``speed < 0`` is the left shock speed
    (the right shock moves at ``-speed``).
    """
    rho_l, u_l = map(float, left)
    if not 0.0 < rho_l < 1.0:
        raise DomainError(f"left density {rho_l!r} outside (0, 1)")
    if u_l == 0.0:
        return rho_l, 0.0
    if u_l < 0.0:
        raise ContractError("colliding data needs u_l > 0")
    m = (rho_l * u_l) ** 2
    jump = rho_l * u_l ** 2 + pressure(rho_l, law)

    # eliminate the speed: m / (r - rho_l) = p(r) - rho_l u_l^2 - p(rho_l)
    def g(r):
        return m / (r - rho_l) - (pressure(r, law) - jump)

    lo = rho_l + 1e-14 * max(1.0, m)
    hi = 1.0 - 1e-14
    if not g(lo) > 0 > g(hi):
        raise ArithmeticError("no sign change for the middle state bracket")
    r = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return r, -rho_l * u_l / (r - rho_l)


def l1_error(numerical, exact, t, grid, field="density", return_mask=False):
    """``sum dx |numerical - exact|`` at cell centres (density) or faces (velocity).

    Velocity points where the exact solution is undefined (vacuum) are
    skipped; with ``return_mask=True`` the mask of included points is
    returned as well.
    """
    if field == "density":
        rho, _, _ = exact(t, grid.centers)
        diff = np.abs(np.asarray(numerical.rho) - rho)
        mask = np.ones(diff.shape, dtype=bool)
    elif field == "velocity":
        x = grid.faces
        # face M-1 is the periodic image of the left endpoint
        x = np.where(x >= grid.b - 1e-12 * grid.length, x - grid.length, x)
        _, u, defined = exact(t, x)
        mask = np.asarray(defined, dtype=bool)
        diff = np.where(mask, np.abs(np.asarray(numerical.u) - np.where(mask, u, 0.0)), 0.0)
    else:
        raise ContractError(f"unknown field {field!r}")
    err = grid.dx * float(np.sum(diff[mask]))
    return (err, mask) if return_mask else err


def coarsen(rho, factor):
    """Block averages of a 1D cell field; total mass is preserved."""
    rho = np.asarray(rho, dtype=float)
    if factor < 1 or rho.size % factor:
        raise ContractError(f"cannot coarsen {rho.size} cells by {factor}")
    return rho.reshape(-1, factor).mean(axis=1)


def coarsen_faces(u, factor):
    """Face values on the coarse mesh, taken where fine and coarse faces coincide."""
    u = np.asarray(u, dtype=float)
    if factor < 1 or u.size % factor:
        raise ContractError(f"cannot coarsen {u.size} faces by {factor}")
    return u[factor - 1::factor].copy()


def fine_mesh_reference(case, eps, m, factor=4, params=None):
    """Run ``case`` on ``factor * m`` cells and coarsen the final state to ``m`` cells."""
    from .runner import simulate
    from .state import State

    res = simulate(case, eps, cells=factor * m, params=params)
    fin = res.final
    return State(t=fin.t, rho=coarsen(fin.rho, factor), u=coarsen_faces(fin.u, factor))
