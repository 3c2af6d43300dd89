"""Catalog of the benchmark problems ``ex1`` ... ``ex7``.

All problems are periodic with ``gamma = 2``.  Initial data are given as
density and velocity functions (momentum divided by density); the jump
locations are listed so that cell averages are integrated piecewise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .oracles import exact_example3, exact_example4

__all__ = ["CaseDefinition", "CASE_IDS", "make_case", "riemann_case"]


@dataclass(frozen=True)
class CaseDefinition:
    """A periodic initial value problem.

    ``domain`` is ``(a, b)`` in 1D and ``(ax, bx, ay, by)`` in 2D;
    ``default_mesh`` likewise ``(m,)`` or ``(mx, my)``.  ``rho0``/``u0``
    (and ``v0``) take one coordinate array per dimension and may depend on
    ``eps`` through ``make_fields``.
    """

    name: str
    dimension: int
    domain: tuple
    default_mesh: tuple
    final_time: float
    epsilon_list: tuple
    make_fields: Callable
    gamma: float = 2.0
    breaks: tuple = ((),)
    snapshots: tuple = ()
    quad_points: int = 3
    exact: Optional[Callable] = None
    description: str = ""
    left_state: Optional[tuple] = field(default=None)

    def fields(self, eps):
        """Return the initial ``(rho0, u0)`` or ``(rho0, u0, v0)`` callables for ``eps``."""
        return self.make_fields(eps)

    def check(self, eps):
        """Raise ConfigurationError if the data leave ``[0, 1)`` on a sample grid."""
        if not eps > 0:
            raise ConfigurationError(f"epsilon must be positive, got {eps!r}")
        f = self.fields(eps)
        if self.dimension == 1:
            a, b = self.domain
            r = f[0](np.linspace(a, b, 1001))
        else:
            ax, bx, ay, by = self.domain
            X, Y = np.meshgrid(np.linspace(ax, bx, 201), np.linspace(ay, by, 201), indexing="ij")
            r = f[0](X, Y)
        r = np.asarray(r) * np.ones(1)
        if np.any(r < 0) or np.any(r >= 1):
            raise ConfigurationError(f"{self.name}: initial density outside [0, 1)")


def _const(c):
    return lambda *xs: np.full(np.broadcast(*xs).shape, float(c))


def riemann_case(name, a, b, x0, left, right, final_time, m=200, epsilon_list=(1e-4,),
                 exact=None, description=""):
    """Periodic Riemann problem with ``(rho, u)`` states ``left``/``right`` of ``x0``."""
    (rl, ul), (rr, ur) = left, right

    def make(eps):
        return (lambda x: np.where(x < x0, rl, rr), lambda x: np.where(x < x0, ul, ur))

    return CaseDefinition(
        name=name, dimension=1, domain=(a, b), default_mesh=(m,), final_time=final_time,
        epsilon_list=tuple(epsilon_list), make_fields=make, breaks=((a, x0),),
        exact=exact, description=description, left_state=(rl, ul))


def _ex1():
    return riemann_case("ex1", 0.0, 1.0, 0.5, (0.7, 8.0 / 7.0), (0.7, -8.0 / 7.0), 0.05,
                        epsilon_list=(1e-2, 1e-4),
                        description="colliding Riemann data forming a congested double shock")


def _ex2():
    return riemann_case("ex2", 0.0, 1.0, 0.5, (0.7, -8.0 / 7.0), (0.7, 8.0 / 7.0), 0.05,
                        epsilon_list=(1e-4,),
                        description="diverging Riemann data opening a vacuum")


_SWEEP = (1e-4, 1e-5, 1e-6, 1e-7)


def _ex3():
    c = riemann_case("ex3", -0.5, 0.5, 0.0, (0.5, -0.5), (0.5, 0.4), 0.2, epsilon_list=_SWEEP,
                     exact=exact_example3, description="pressureless vacuum formation")
    return c


def _ex4():
    def u0(x):
        return np.where(x < -0.5, -0.5, np.where(x < 0.0, 0.4, np.where(x < 0.8, 0.4 - x, -0.4)))

    return CaseDefinition(
        name="ex4", dimension=1, domain=(-1.0, 1.0), default_mesh=(200,), final_time=0.49,
        epsilon_list=_SWEEP, make_fields=lambda eps: (_const(0.5), u0),
        breaks=((-1.0, -0.5, 0.0, 0.8),), exact=exact_example4,
        description="pressureless data with vacuum, jump and compression ramp")


def _box(x, y, xr, yr):
    return (x >= xr[0]) & (x <= xr[1]) & (y >= yr[0]) & (y <= yr[1])


def _ex5():
    A = ((1 / 6, 5 / 12), (1 / 3, 7 / 12))
    B = ((7 / 12, 5 / 6), (5 / 12, 2 / 3))

    def rho0(x, y):
        return np.where(_box(x, y, *A) | _box(x, y, *B), 0.8, 0.6)

    def u0(x, y):
        # momentum +-1 inside the blocks, density 0.8 there
        return (_box(x, y, *A).astype(float) - _box(x, y, *B)) / 0.8

    return CaseDefinition(
        name="ex5", dimension=2, domain=(0.0, 1.0, 0.0, 1.0), default_mesh=(200, 200),
        final_time=0.2, epsilon_list=(1e-4,), make_fields=lambda eps: (rho0, u0, _const(0.0)),
        breaks=((1 / 6, 5 / 12, 7 / 12, 5 / 6), (1 / 3, 7 / 12, 5 / 12, 2 / 3)),
        snapshots=(0.05, 0.1, 0.2), description="collision of two congested blocks")


def _ex6():
    def discs(x, y):
        a = x ** 2 + y ** 2 < 25.0
        b = (x + 31.0) ** 2 + y ** 2 < 25.0
        return a, b

    def rho0(x, y):
        a, b = discs(x, y)
        return np.where(a | b, 0.2, 0.8)

    def u0(x, y):
        # momentum 2 in the moving disc, density 0.2 there
        return np.where(discs(x, y)[1], 10.0, 0.0)

    return CaseDefinition(
        name="ex6", dimension=2, domain=(-40.0, 40.0, -40.0, 40.0), default_mesh=(200, 200),
        final_time=12.0, epsilon_list=(1e-6,), make_fields=lambda eps: (rho0, u0, _const(0.0)),
        breaks=((), ()), snapshots=(0.0, 1.0, 2.0, 5.0, 10.0, 12.0), quad_points=8,
        description="impact of a moving disc forming a vacuum corridor")


def _ex7():
    def make(eps):
        def rho0(x, y):
            return 1.0 - eps * np.exp(-(x ** 2 + y ** 2))

        def u0(x, y):
            q = np.sin(2 * np.pi * (x - y)) + eps ** 2 * np.sin(2 * np.pi * (x + y))
            return q / rho0(x, y)

        def v0(x, y):
            q = np.sin(2 * np.pi * (x - y)) + eps ** 2 * np.cos(2 * np.pi * (x + y))
            return q / rho0(x, y)

        return rho0, u0, v0

    return CaseDefinition(
        name="ex7", dimension=2, domain=(0.0, 1.0, 0.0, 1.0), default_mesh=(200, 200),
        final_time=0.02, epsilon_list=(1e-6,), make_fields=make, breaks=((), ()),
        description="nearly incompressible flow at density close to one")


_FACTORIES = {"ex1": _ex1, "ex2": _ex2, "ex3": _ex3, "ex4": _ex4,
              "ex5": _ex5, "ex6": _ex6, "ex7": _ex7}
CASE_IDS = tuple(_FACTORIES)


def make_case(case_id: str) -> CaseDefinition:
    try:
        return _FACTORIES[case_id]()
    except KeyError:
        raise ConfigurationError(
            f"unknown case {case_id!r}; valid ids: {', '.join(CASE_IDS)}") from None
