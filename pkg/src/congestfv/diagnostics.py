"""Discrete energy, density bound, pressure and stabilization norms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation
from .pressure import PressureLaw, helmholtz, pressure

__all__ = [
    "EnergyBreakdown",
    "total_energy",
    "pressure_l1",
    "density_bound_report",
    "stabilization_l2",
    "energy_increase",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    internal: float
    kinetic: float

    @property
    def total(self) -> float:
        return self.internal + self.kinetic


def _volume(grid):
    return grid.cell_area if hasattr(grid, "cell_area") else grid.dx


def total_energy(state, law: PressureLaw, grid) -> EnergyBreakdown:
    """Internal energy ``sum h(rho)`` plus kinetic energy on the faces.

    Face densities are arithmetic means of the two neighbouring cells.
    """
    vol = _volume(grid)
    rho = state.rho
    internal = vol * float(np.sum(helmholtz(rho, law)))
    if state.dim == 1:
        rf = 0.5 * (rho + np.roll(rho, -1))
        kinetic = 0.5 * vol * float(np.sum(rf * state.u ** 2))
    else:
        rx = 0.5 * (rho + np.roll(rho, -1, axis=0))
        ry = 0.5 * (rho + np.roll(rho, -1, axis=1))
        kinetic = 0.5 * vol * float(np.sum(rx * state.u ** 2) + np.sum(ry * state.v ** 2))
    return EnergyBreakdown(internal, kinetic)


def pressure_l1(state, law: PressureLaw, grid) -> float:
    return _volume(grid) * float(np.sum(pressure(state.rho, law)))


def density_bound_report(state, law: PressureLaw):
    """Return ``(max_rho, C_emp)`` with ``C_emp = (1 - max rho) / eps**(1/(gamma-1))``.

    Raises
    ------
    ConstraintViolation
        If some density reaches the congestion bound or is not finite.
    """
    rho = np.asarray(state.rho)
    rmax = float(np.max(rho))
    if not np.all(np.isfinite(rho)) or rmax >= 1.0:
        raise ConstraintViolation(f"density bound violated: max rho = {rmax!r}")
    return rmax, (1.0 - rmax) / law.epsilon ** (1.0 / (law.gamma - 1.0))


def stabilization_l2(delta_u, grid) -> float:
    """``sqrt(sum vol * du**2)``; in 2D pass the pair ``(du, dv)``."""
    vol = _volume(grid)
    if isinstance(delta_u, tuple):
        return float(np.sqrt(vol * sum(np.sum(np.square(d)) for d in delta_u)))
    return float(np.sqrt(vol * np.sum(np.square(delta_u))))


def energy_increase(e_old: float, e_new: float, slack: float = 1e-10) -> float:
    """Amount by which ``e_new`` exceeds the allowed bound (<= 0 means decay)."""
    return e_new - (e_old + slack * max(1.0, e_old))
