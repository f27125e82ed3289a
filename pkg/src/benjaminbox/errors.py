# -*- coding: utf-8 -*-
"""
benjaminbox.errors

Centralized error and run-status taxonomy.
Every exception carries an ErrorKind so the CLI can emit a
machine-readable error line without inspecting messages.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional


class ErrorKind(str, Enum):
    GRID = "grid"
    PARITY = "parity"
    CONFIG = "config"
    SINGULAR_MATRIX = "singular_matrix"
    NEWTON_DIVERGENCE = "newton_divergence"
    IMAGINARY_RESIDUE = "imaginary_residue"
    IO = "io"


class RunStatus(str, Enum):
    COMPLETED = "completed"
    NONFINITE = "nonfinite"
    NEWTON_FAILURE = "newton_failure"


# -------------------------------------------------
# Exception hierarchy
# -------------------------------------------------


class BenjaminBoxError(Exception):
    kind: ErrorKind = ErrorKind.IO


class GridError(BenjaminBoxError, ValueError):
    kind = ErrorKind.GRID


class ParityError(BenjaminBoxError, ValueError):
    kind = ErrorKind.PARITY


class ConfigError(BenjaminBoxError, ValueError):
    kind = ErrorKind.CONFIG


class SingularMatrixError(BenjaminBoxError, ArithmeticError):
    kind = ErrorKind.SINGULAR_MATRIX

    def __init__(self, message: str, pivot: float = 0.0, scale: float = 0.0):
        super().__init__(message)
        self.pivot = pivot
        self.scale = scale


class NewtonConvergenceError(BenjaminBoxError, ArithmeticError):
    kind = ErrorKind.NEWTON_DIVERGENCE

    def __init__(
        self,
        iterations: int,
        residual_norm: float,
        step_index: Optional[int] = None,
    ):
        self.iterations = iterations
        self.residual_norm = residual_norm
        self.step_index = step_index
        where = "" if step_index is None else f" at step {step_index}"
        super().__init__(
            f"Newton did not converge{where}: "
            f"iterations={iterations}, residual={residual_norm:.3e}"
        )


class ImaginaryResidueError(BenjaminBoxError, AssertionError):
    """Raised when an inverse FFT leaves a non-negligible imaginary part."""

    kind = ErrorKind.IMAGINARY_RESIDUE

    def __init__(self, residue: float, threshold: float):
        self.residue = residue
        self.threshold = threshold
        super().__init__(
            f"imaginary residue {residue:.3e} exceeds {threshold:.3e} "
            "(symbol construction bug?)"
        )
