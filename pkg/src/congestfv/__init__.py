"""Semi-implicit staggered finite volume solver for isentropic Euler flow
with a singular congestion pressure.

Quick start::

    from congestfv import simulate
    res = simulate("ex1", 1e-4)
    res.final.rho
"""
from .errors import (
    CongestionError,
    ConfigurationError,
    ConstraintViolation,
    ContractError,
    DomainError,
    NonConvergence,
)
from .pressure import PressureLaw, helmholtz, pressure, pressure_derivative
from .grid import MacGrid1D, MacGrid2D, initialize_state, initialize_state2d
from .state import State, State2D
from .params import EtaPolicy, SchemeParams, StepReport
from .scheme1d import step
from .scheme2d import step2d
from .cases import CASE_IDS, CaseDefinition, make_case
from .runner import RunResult, simulate
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CASE_IDS", "CaseDefinition", "ConfigurationError", "CongestionError",
    "ConstraintViolation", "ContractError", "DomainError", "EtaPolicy", "MacGrid1D", "MacGrid2D",
    "NonConvergence", "PressureLaw", "RunResult", "SchemeParams", "State", "State2D", "StepReport",
    "helmholtz", "initialize_state", "initialize_state2d", "make_case", "pressure",
    "pressure_derivative", "simulate", "step", "step2d",
]
