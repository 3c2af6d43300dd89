"""Immutable solution snapshots."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _frozen(arr):
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class State:
    """1D state: cell densities ``rho`` and face velocities ``u`` at time ``t``."""

    t: float
    rho: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _frozen(self.rho))
        object.__setattr__(self, "u", _frozen(self.u))
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self):
        return 1


@dataclass(frozen=True)
class State2D:
    """2D state: ``rho`` on cells, ``u`` on x-faces, ``v`` on y-faces."""

    t: float
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for name in ("rho", "u", "v"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self):
        return 2
