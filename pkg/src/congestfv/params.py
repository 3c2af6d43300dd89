"""Scheme parameters and per-step reports."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .errors import ConfigurationError

__all__ = ["EtaPolicy", "SchemeParams", "StepReport"]


@dataclass(frozen=True)
class EtaPolicy:
    """How the stabilization coefficient eta is chosen each step.

    ``kind`` is one of

    ``"fixed"``
        the constant ``value`` everywhere;
    ``"adaptive"``
        one global constant ``(1 + margin) * 2 / min_faces rho_face``;
    ``"local"``
        a face-wise coefficient ``(1 + margin) * 2 / rho_face``.

    Both adaptive kinds floor the face density at ``SchemeParams.vacuum_floor``.
    """

    kind: str = "local"
    value: float = 0.0
    margin: float = 0.05

    def __post_init__(self):
        if self.kind not in ("fixed", "adaptive", "local"):
            raise ConfigurationError(f"unknown eta policy {self.kind!r}")
        if self.kind == "fixed" and not self.value > 0:
            raise ConfigurationError("fixed eta must be positive")
        if self.margin < 0:
            raise ConfigurationError("eta margin must be nonnegative")

    def __str__(self):
        if self.kind == "fixed":
            return f"fixed({self.value:g})"
        return f"{self.kind}(margin={self.margin:g})"

    @classmethod
    def fixed(cls, value):
        return cls("fixed", float(value))

    @classmethod
    def adaptive(cls, margin=0.05):
        return cls("adaptive", 0.0, float(margin))

    @classmethod
    def local(cls, margin=0.05):
        return cls("local", 0.0, float(margin))

    @classmethod
    def parse(cls, text):
        """Parse ``auto``/``local``, ``adaptive``/``global`` or a number."""
        text = str(text).strip().lower()
        if text in ("auto", "local"):
            return cls.local()
        if text in ("adaptive", "global"):
            return cls.adaptive()
        try:
            return cls.fixed(float(text))
        except ValueError:
            raise ConfigurationError(f"cannot parse eta policy {text!r}") from None


@dataclass(frozen=True)
class SchemeParams:
    eta: EtaPolicy = field(default_factory=EtaPolicy)
    cfl: float = 0.9
    dt_max: float = 0.05
    solver: str = "newton"
    tol: float = 1e-10
    max_iter: int = 200
    vacuum_floor: float = 1e-12
    dt_retry_limit: int = 10
    energy_slack: float = 1e-10
    strict: bool = False

    def __post_init__(self):
        if not (0.0 < self.cfl <= 1.0):
            raise ConfigurationError(f"cfl must lie in (0, 1], got {self.cfl}")
        for name in ("dt_max", "tol", "vacuum_floor"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.max_iter < 1 or self.dt_retry_limit < 0:
            raise ConfigurationError("iteration limits must be positive")
        if self.solver not in ("newton", "picard"):
            raise ConfigurationError(f"unknown nonlinear solver {self.solver!r}")


@dataclass(frozen=True)
class StepReport:
    """Diagnostics of one accepted time step (values refer to the new level)."""

    step: int
    t: float
    dt_used: float
    eta_used: float
    iterations: int
    dt_retries: int
    residual: float
    total_mass: float
    mass_drift: float
    total_energy: float
    internal_energy: float
    kinetic_energy: float
    energy_increase: float
    max_density: float
    min_density: float
    c_emp: float
    pressure_l1: float
    stabilization_l2: float

    @classmethod
    def columns(cls):
        return [f.name for f in fields(cls)]

    def row(self):
        return [getattr(self, name) for name in self.columns()]

    def finite(self):
        return all(math.isfinite(float(v)) for v in self.row())
