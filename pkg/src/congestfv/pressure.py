"""Singular congestion pressure law and its Helmholtz potential.

The pressure ``p(rho) = eps * (rho / (1 - rho))**gamma`` blows up at the
congestion density ``rho = 1``.  The Helmholtz potential ``h`` solves
``rho h'(rho) - h(rho) = p(rho)`` and is normalised by ``h(0) = h'(0) = 0``,
which gives the representation ``h(rho) = rho * int_0^rho p(s) / s**2 ds``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigurationError, DomainError

__all__ = [
    "PressureLaw",
    "pressure",
    "pressure_derivative",
    "helmholtz",
]


@dataclass(frozen=True)
class PressureLaw:
    """Congestion pressure ``eps * (rho / (1 - rho))**gamma``.

    Parameters
    ----------
    epsilon : float
        Stiffness parameter, must be positive.
    gamma : float
        Exponent in ``(1, 3]``.
    """

    epsilon: float
    gamma: float = 2.0

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (1.0 < self.gamma <= 3.0):
            raise ConfigurationError(f"gamma must lie in (1, 3], got {self.gamma!r}")

    def p(self, rho):
        return pressure(rho, self)

    def dp(self, rho):
        return pressure_derivative(rho, self)

    def h(self, rho):
        return helmholtz(rho, self)


def _check_range(rho, lower_open=False):
    arr = np.asarray(rho, dtype=float)
    if lower_open:
        bad = ~((arr > 0.0) & (arr < 1.0))
        interval = "(0, 1)"
    else:
        bad = ~((arr >= 0.0) & (arr < 1.0))
        interval = "[0, 1)"
    if np.any(bad):
        offending = arr[bad].ravel()[0] if arr.ndim else float(arr)
        raise DomainError(f"density {offending!r} outside {interval}")
    return arr


def _scalar_or_array(out, rho):
    return float(out) if np.ndim(rho) == 0 else out


def pressure(rho, law: PressureLaw):
    """Evaluate the congestion pressure; raises DomainError unless 0 <= rho < 1."""
    arr = _check_range(rho)
    out = law.epsilon * (arr / (1.0 - arr)) ** law.gamma
    return _scalar_or_array(out, rho)


def pressure_derivative(rho, law: PressureLaw):
    """``dp/drho = eps * gamma * rho**(gamma-1) / (1-rho)**(gamma+1)`` on (0, 1)."""
    arr = _check_range(rho, lower_open=True)
    g = law.gamma
    out = law.epsilon * g * arr ** (g - 1.0) / (1.0 - arr) ** (g + 1.0)
    return _scalar_or_array(out, rho)


def _helmholtz_quad(r, eps, gamma):
    if r == 0.0:
        return 0.0
    # p(s)/s^2 = eps * s^(gamma-2) * (1-s)^(-gamma); the s^(gamma-2) factor is
    # integrable at 0 and handled as an algebraic weight.
    val, err = integrate.quad(
        lambda s: (1.0 - s) ** (-gamma),
        0.0,
        r,
        weight="alg",
        wvar=(gamma - 2.0, 0.0),
        epsabs=0.0,
        epsrel=1e-12,
        limit=200,
    )
    if not np.isfinite(val) or err > 1e-10 * abs(val):
        raise ArithmeticError(f"Helmholtz quadrature did not converge at rho={r!r}")
    return eps * r * val


def helmholtz(rho, law: PressureLaw, method: str = "auto"):
    """Helmholtz potential ``h(rho)`` with ``h(0) = h'(0) = 0``.

    ``method="auto"`` uses the closed form ``eps rho^2 / (1 - rho)`` when
    ``gamma == 2`` and adaptive quadrature otherwise; ``"quad"`` forces the
    quadrature path.
    """
    arr = _check_range(rho)
    if method == "auto" and law.gamma == 2.0:
        out = law.epsilon * arr * arr / (1.0 - arr)
    elif method in ("auto", "quad"):
        flat = [_helmholtz_quad(float(r), law.epsilon, law.gamma) for r in arr.ravel()]
        out = np.asarray(flat, dtype=float).reshape(arr.shape)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _scalar_or_array(out, rho)
