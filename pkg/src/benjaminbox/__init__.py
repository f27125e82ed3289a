"""Structure-preserving solvers for the periodic Benjamin and Benjamin-Ono equations."""

__version__ = "0.1.0"

from benjaminbox.dynamics import Params, StateZ, lift_state, linearize_rhs, reduced_rhs
from benjaminbox.errors import BenjaminBoxError, ErrorKind, RunStatus
from benjaminbox.spectral import Grid, apply_L, hilbert_fft, hilbert_kernel, make_grid

__all__ = [
    "__version__",
    "BenjaminBoxError",
    "ErrorKind",
    "Grid",
    "Params",
    "RunStatus",
    "StateZ",
    "apply_L",
    "hilbert_fft",
    "hilbert_kernel",
    "lift_state",
    "linearize_rhs",
    "make_grid",
    "reduced_rhs",
]
