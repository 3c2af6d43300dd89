"""Exception hierarchy shared by the solver modules."""


class CongestionError(Exception):
    """Base class for all errors raised by congestfv."""


class DomainError(CongestionError, ValueError):
    """A density (or other argument) lies outside the admissible range."""


class ContractError(CongestionError, ValueError):
    """Array shapes or parameters do not match the grid they are used with."""


class ConfigurationError(CongestionError, ValueError):
    """Inconsistent scheme parameters or run configuration."""


class ConstraintViolation(CongestionError):
    """A strict structural check failed (density >= 1, negative density, NaN)."""


class NonConvergence(CongestionError):
    """The implicit mass balance could not be solved.

    Attributes
    ----------
    iterate : ndarray or None
        Last density iterate reached by the nonlinear solver.
    residual : float
        Max-norm of the residual at that iterate.
    """

    def __init__(self, message, iterate=None, residual=float("nan")):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual
