"""Periodic staggered (MAC) grids, discrete operators and cell averaging.

Index convention: primal cell ``i`` spans ``[a + i dx, a + (i+1) dx]``; face
``k`` sits at ``a + (k+1) dx``, between cells ``k`` and ``k+1 (mod m)``, so the
last face coincides with the left boundary under periodic wrap.  In 2D,
``rho[i, j]`` lives on cell ``(i, j)``, ``u[i, j]`` on the x-face to its right
and ``v[i, j]`` on the y-face above it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError
from .state import State, State2D

__all__ = [
    "MacGrid1D",
    "MacGrid2D",
    "dual_gradient",
    "primal_divergence",
    "face_average",
    "grad_x",
    "grad_y",
    "div_x",
    "div_y",
    "avg_x",
    "avg_y",
    "cell_averages",
    "initialize_state",
    "initialize_state2d",
]


@dataclass(frozen=True)
class MacGrid1D:
    a: float
    b: float
    m: int
    boundary: str = field(default="periodic")

    def __post_init__(self):
        if self.m < 3:
            raise ContractError(f"need at least 3 cells, got {self.m}")
        if not self.b > self.a:
            raise ContractError(f"empty domain [{self.a}, {self.b}]")
        if self.boundary != "periodic":
            raise ContractError("only periodic boundaries are supported")

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.m

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def centers(self) -> np.ndarray:
        return self.a + (np.arange(self.m) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.a + (np.arange(self.m) + 1.0) * self.dx

    def check(self, arr, name="field"):
        arr = np.asarray(arr, dtype=float)
        if arr.shape != (self.m,):
            raise ContractError(f"{name} has shape {arr.shape}, grid expects ({self.m},)")
        return arr


@dataclass(frozen=True)
class MacGrid2D:
    ax: float
    bx: float
    ay: float
    by: float
    mx: int
    my: int
    boundary: str = field(default="periodic")

    def __post_init__(self):
        if self.mx < 3 or self.my < 3:
            raise ContractError(f"need at least 3 cells per direction, got {self.mx}x{self.my}")
        if not (self.bx > self.ax and self.by > self.ay):
            raise ContractError("empty domain")
        if self.boundary != "periodic":
            raise ContractError("only periodic boundaries are supported")

    @property
    def dx(self) -> float:
        return (self.bx - self.ax) / self.mx

    @property
    def dy(self) -> float:
        return (self.by - self.ay) / self.my

    @property
    def shape(self):
        return (self.mx, self.my)

    @property
    def xgrid(self) -> MacGrid1D:
        return MacGrid1D(self.ax, self.bx, self.mx)

    @property
    def ygrid(self) -> MacGrid1D:
        return MacGrid1D(self.ay, self.by, self.my)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    def check(self, arr, name="field"):
        arr = np.asarray(arr, dtype=float)
        if arr.shape != self.shape:
            raise ContractError(f"{name} has shape {arr.shape}, grid expects {self.shape}")
        return arr


# -- 1D operators ---------------------------------------------------------


def dual_gradient(p, grid: MacGrid1D):
    """Difference of primal values across each face, divided by dx."""
    p = grid.check(p, "primal field")
    return (np.roll(p, -1) - p) / grid.dx


def primal_divergence(w, grid: MacGrid1D):
    """Difference of face values across each cell, divided by dx."""
    w = grid.check(w, "dual field")
    return (w - np.roll(w, 1)) / grid.dx


def face_average(r, grid: MacGrid1D):
    r = grid.check(r, "primal field")
    return 0.5 * (r + np.roll(r, -1))


# -- 2D operators ---------------------------------------------------------


def grad_x(p, grid: MacGrid2D):
    p = grid.check(p, "primal field")
    return (np.roll(p, -1, axis=0) - p) / grid.dx


def grad_y(p, grid: MacGrid2D):
    p = grid.check(p, "primal field")
    return (np.roll(p, -1, axis=1) - p) / grid.dy


def div_x(w, grid: MacGrid2D):
    w = grid.check(w, "x-face field")
    return (w - np.roll(w, 1, axis=0)) / grid.dx


def div_y(w, grid: MacGrid2D):
    w = grid.check(w, "y-face field")
    return (w - np.roll(w, 1, axis=1)) / grid.dy


def avg_x(r, grid: MacGrid2D):
    r = grid.check(r, "primal field")
    return 0.5 * (r + np.roll(r, -1, axis=0))


def avg_y(r, grid: MacGrid2D):
    r = grid.check(r, "primal field")
    return 0.5 * (r + np.roll(r, -1, axis=1))


# -- cell averaging -------------------------------------------------------


def _axis_nodes(left, width, lo, length, breaks=(), points=3):
    """Quadrature nodes/weights for intervals ``[left_k, left_k + width]``.

    Each interval is split at the breakpoints lying strictly inside it and a
    composite midpoint rule with ``points`` nodes is used on every piece, so
    piecewise linear data between breakpoints is averaged exactly.  Nodes are
    wrapped back into ``[lo, lo + length)``.
    """
    brk = np.asarray(sorted(breaks), dtype=float)
    brk = np.concatenate([brk - length, brk, brk + length]) if brk.size else brk
    pieces = []
    for l in left:
        r = l + width
        inner = brk[(brk > l + 1e-13 * length) & (brk < r - 1e-13 * length)]
        pieces.append(np.concatenate([[l], inner, [r]]))
    kmax = max(len(pc) - 1 for pc in pieces) * points
    nodes = np.zeros((len(left), kmax))
    weights = np.zeros((len(left), kmax))
    offs = (np.arange(points) + 0.5) / points
    for i, pc in enumerate(pieces):
        k = 0
        for x0, x1 in zip(pc[:-1], pc[1:]):
            nodes[i, k:k + points] = x0 + offs * (x1 - x0)
            weights[i, k:k + points] = (x1 - x0) / (points * width)
            k += points
        nodes[i, k:] = left[i]
    nodes = lo + np.mod(nodes - lo, length)
    return nodes, weights


def cell_averages(func, left, width, lo, length, breaks=(), points=3):
    """Averages of a vectorised ``func`` over periodic 1D intervals."""
    nodes, weights = _axis_nodes(np.asarray(left, float), width, lo, length, breaks, points)
    vals = np.asarray(func(nodes), dtype=float) * np.ones_like(nodes)
    return np.sum(vals * weights, axis=1)


def cell_averages_2d(func, xleft, yleft, dx, dy, grid, xbreaks=(), ybreaks=(), points=3):
    xn, xw = _axis_nodes(np.asarray(xleft, float), dx, grid.ax, grid.bx - grid.ax, xbreaks, points)
    yn, yw = _axis_nodes(np.asarray(yleft, float), dy, grid.ay, grid.by - grid.ay, ybreaks, points)
    X = xn[:, :, None, None]
    Y = yn[None, None, :, :]
    vals = np.asarray(func(X, Y), dtype=float) * np.ones((1, 1, 1, 1))
    vals = np.broadcast_to(vals, (xn.shape[0], xn.shape[1], yn.shape[0], yn.shape[1]))
    return np.einsum("ik,ikjl,jl->ij", xw, vals, yw)


def _checked(rho0):
    def wrapped(*args):
        vals = np.asarray(rho0(*args), dtype=float)
        _check_density(vals)
        return vals
    return wrapped


def _check_density(rho):
    if not np.all(np.isfinite(rho)) or np.any(rho < 0.0) or np.any(rho >= 1.0):
        bad = rho[~((rho >= 0.0) & (rho < 1.0))]
        raise DomainError(f"initial density {bad.ravel()[0]!r} outside [0, 1)")


def initialize_state(rho0, u0, grid: MacGrid1D, breaks=(), points=3, t=0.0) -> State:
    """Cell averages of ``rho0`` over primal cells and of ``u0`` over dual cells.

    ``breaks`` lists the discontinuity locations of the data; pieces between
    them are integrated separately.
    """
    dx, L = grid.dx, grid.length
    rho = cell_averages(_checked(rho0), grid.a + np.arange(grid.m) * dx, dx, grid.a, L, breaks, points)
    u = cell_averages(u0, grid.centers, dx, grid.a, L, breaks, points)
    _check_density(rho)
    return State(t=t, rho=rho, u=u)


def initialize_state2d(rho0, u0, v0, grid: MacGrid2D, xbreaks=(), ybreaks=(), points=3,
                       t=0.0) -> State2D:
    """2D analogue of :func:`initialize_state`; ``u0``/``v0`` are velocities."""
    dx, dy = grid.dx, grid.dy
    xl = grid.ax + np.arange(grid.mx) * dx
    yl = grid.ay + np.arange(grid.my) * dy
    xc = xl + 0.5 * dx
    yc = yl + 0.5 * dy
    rho = cell_averages_2d(_checked(rho0), xl, yl, dx, dy, grid, xbreaks, ybreaks, points)
    u = cell_averages_2d(u0, xc, yl, dx, dy, grid, xbreaks, ybreaks, points)
    v = cell_averages_2d(v0, xl, yc, dx, dy, grid, xbreaks, ybreaks, points)
    _check_density(rho)
    return State2D(t=t, rho=rho, u=u, v=v)
