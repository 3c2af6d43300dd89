"""Kernel dispatch: the compiled extension when available, else numpy.

Set ``CONGESTFV_PURE=1`` in the environment to force the numpy fallback.
Both backends expose the same functions; see ``_kernels_py`` for the
conventions.
"""
import os

_NAMES = (
    "mass_residual_1d",
    "mass_jacobian_1d",
    "momentum_update_1d",
    "mass_residual_2d",
    "mass_jacobian_2d",
    "momentum_update_2d",
)


def _load(pure=None):
    if pure is None:
        pure = os.environ.get("CONGESTFV_PURE", "").strip() not in ("", "0")
    if not pure:
        try:
            from . import _kernels as impl
            return impl
        except ImportError:
            pass
    from . import _kernels_py as impl
    return impl


_impl = _load()
BACKEND = _impl.BACKEND

mass_residual_1d = _impl.mass_residual_1d
mass_jacobian_1d = _impl.mass_jacobian_1d
momentum_update_1d = _impl.momentum_update_1d
mass_residual_2d = _impl.mass_residual_2d
mass_jacobian_2d = _impl.mass_jacobian_2d
momentum_update_2d = _impl.momentum_update_2d


def backend_module(name):
    """Return the kernel module ``"python"`` or ``"cython"`` explicitly."""
    if name == "python":
        from . import _kernels_py
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")
