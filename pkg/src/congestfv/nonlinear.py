"""Solvers for the implicit mass balance ``R(rho) = 0``.

The residual is in rate form ``(rho - rho_n)/dt + div F(rho)``, so the
Picard map is ``rho <- rho - dt R(rho)``.  Newton uses the exact Jacobian
with a projected backtracking line search on the box ``[0, 1 - 1e-14]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import spsolve

from .errors import NonConvergence

UPPER = 1.0 - 1e-14
_ROUNDOFF = 16.0 * np.finfo(float).eps


@dataclass
class Solution:
    x: np.ndarray
    aux: tuple
    iterations: int
    residual: float
    tol: float


def effective_tol(tol, scale):
    """Tolerance raised to the roundoff level of a residual of size ``scale``."""
    return max(tol, _ROUNDOFF * scale)


def _project(x):
    return np.clip(x, 0.0, UPPER)


def newton(fun, jac, x0, tol, max_iter):
    """Projected Newton iteration.

    ``fun(x)`` returns ``(R, scale, aux)`` where ``scale`` bounds the size of
    the terms summed in ``R``; ``jac(x)`` returns a sparse matrix.  The
    stopping tolerance is raised to the roundoff level of the residual,
    which near the congestion bound is dominated by ``|J| |x|`` (one ulp of
    density moves the pressure a lot).
    """
    x = _project(np.array(x0, dtype=float))
    R, scale, aux = fun(x)
    nr = np.max(np.abs(R))
    stall = 0
    for k in range(max_iter + 1):
        if not np.isfinite(nr):
            break
        J = jac(x).tocsc()
        tol_k = effective_tol(tol, max(scale, np.max(abs(J) @ np.abs(x))))
        if nr <= tol_k:
            if np.max(x) >= UPPER:
                raise NonConvergence("converged iterate touches the congestion bound", x, nr)
            return Solution(x, aux, k, nr, tol_k)
        if k == max_iter:
            break
        # minimum-degree ordering on A^T + A suits the symmetric stencil pattern
        d = spsolve(J, -R, permc_spec="MMD_AT_PLUS_A")
        if not np.all(np.isfinite(d)):
            break
        s = 1.0
        while True:
            xt = _project(x + s * d)
            Rt, st, at = fun(xt)
            nt = np.max(np.abs(Rt))
            if nt < (1.0 - 1e-4 * s) * nr or s < 1e-10:
                break
            s *= 0.5
        stall = stall + 1 if nt >= nr else 0
        x, R, scale, aux, nr = xt, Rt, st, at, nt
        if stall >= 5:
            break
    raise NonConvergence(f"Newton failed, residual {nr:.3e}", x, nr)


def picard(fun, x0, dt, tol, max_iter, patience=5, relax=0.5):
    """Fixed-point iteration ``x <- x - w dt R(x)`` with automatic damping.

    ``w`` starts at 1 and is multiplied by ``relax`` whenever the residual
    has failed to decrease for ``patience`` consecutive iterations.
    """
    x = _project(np.array(x0, dtype=float))
    w = 1.0
    best = np.inf
    flat = 0
    nr = np.inf
    for k in range(max_iter + 1):
        R, scale, aux = fun(x)
        nr = np.max(np.abs(R))
        tol_k = effective_tol(tol, scale)
        if not np.isfinite(nr):
            break
        if nr <= tol_k:
            if np.max(x) >= UPPER:
                raise NonConvergence("converged iterate touches the congestion bound", x, nr)
            return Solution(x, aux, k, nr, tol_k)
        if k == max_iter:
            break
        if nr < best:
            best, flat = nr, 0
        else:
            flat += 1
            if flat >= patience:
                w *= relax
                flat = 0
        x = _project(x - w * dt * R)
    raise NonConvergence(f"Picard failed, residual {nr:.3e}", x, nr)


_PATTERNS = {}


def _pattern(shape):
    """Row/column indices of the periodic 3- (1D) or 5-point (2D) stencil."""
    if shape not in _PATTERNS:
        idx = np.arange(int(np.prod(shape))).reshape(shape)
        cols = [idx]
        for axis in range(len(shape)):
            cols += [np.roll(idx, -1, axis=axis), np.roll(idx, 1, axis=axis)]
        rows = np.concatenate([idx.ravel()] * len(cols))
        _PATTERNS[shape] = (rows, np.concatenate([c.ravel() for c in cols]))
    return _PATTERNS[shape]


def stencil_matrix(diag, *neighbours):
    """Sparse matrix from periodic stencil coefficients.

    ``neighbours`` are ``(upper, lower)`` in 1D and ``(east, west, north,
    south)`` in 2D, each giving the derivative of row ``i`` with respect to
    that neighbour of ``i``.
    """
    rows, cols = _pattern(diag.shape)
    vals = np.concatenate([diag.ravel()] + [c.ravel() for c in neighbours])
    n = diag.size
    return coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()
