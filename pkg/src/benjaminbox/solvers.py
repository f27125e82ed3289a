# -*- coding: utf-8 -*-
"""
benjaminbox.solvers

Dense LU and plain Newton iteration for the implicit schemes.

- lu_solve: partial-pivoting LU (scipy), singular pivots reported
- newton_solve: residual max-norm stopping rule, analytic or
  finite-difference Jacobian
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor
from scipy.linalg import lu_solve as _lu_backsolve

from benjaminbox.errors import ConfigError, NewtonConvergenceError, SingularMatrixError

JacobianMode = Literal["analytic", "finite-difference"]
JACOBIAN_MODES = ("analytic", "finite-difference")

PIVOT_RTOL = 1e-14
FD_STEP = 1e-6

ResidualFn = Callable[[np.ndarray], np.ndarray]
JacobianFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class NewtonSettings:
    tol: float = 1e-12
    max_iter: int = 25
    jacobian_mode: JacobianMode = "analytic"

    def __post_init__(self):
        if not (self.tol > 0):
            raise ConfigError(f"newton tolerance must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"newton max_iter must be >= 1, got {self.max_iter}")
        if self.jacobian_mode not in JACOBIAN_MODES:
            raise ConfigError(
                f"jacobian_mode must be one of {JACOBIAN_MODES}, got {self.jacobian_mode!r}"
            )


@dataclass
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual_norm: float
    history: List[float] = field(default_factory=list)


# -----------------------------
# Linear solves
# -----------------------------


def lu_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"lu_solve needs a square matrix, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {A.shape[0]}")
    if not np.all(np.isfinite(A)):
        raise SingularMatrixError("matrix has non-finite entries")

    scale = float(np.max(np.abs(A))) if A.size else 0.0
    with warnings.catch_warnings():
        # exactly singular input is reported through the pivot check below
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(A, check_finite=False)
    pivot = float(np.min(np.abs(np.diag(lu)))) if A.size else 0.0
    if scale == 0.0 or pivot < PIVOT_RTOL * scale:
        raise SingularMatrixError(
            f"matrix is numerically singular (pivot {pivot:.3e}, scale {scale:.3e})",
            pivot=pivot,
            scale=scale,
        )
    return _lu_backsolve((lu, piv), b, check_finite=False)


def finite_difference_jacobian(residual: ResidualFn, x: np.ndarray) -> np.ndarray:
    """Symmetric-difference Jacobian, step 1e-6 * (1 + |x_j|) per column."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    cols = []
    for j in range(n):
        h = FD_STEP * (1.0 + abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        cols.append((residual(xp) - residual(xm)) / (2.0 * h))
    return np.column_stack(cols) if cols else np.zeros((0, 0))


# -----------------------------
# Newton
# -----------------------------


def newton_solve(
    residual: ResidualFn,
    jacobian: Optional[JacobianFn],
    guess: np.ndarray,
    s: NewtonSettings = NewtonSettings(),
) -> NewtonResult:
    """
    Plain Newton: x <- x - J(x)^{-1} R(x) until max|R(x)| <= s.tol.

    The guess itself is accepted when it already satisfies the tolerance
    (iterations = 0). A missing jacobian or jacobian_mode="finite-difference"
    switches to finite_difference_jacobian.
    """
    x = np.array(guess, dtype=np.float64, copy=True)
    use_fd = jacobian is None or s.jacobian_mode == "finite-difference"

    r = residual(x)
    norm = float(np.max(np.abs(r))) if r.size else 0.0
    history = [norm]
    iterations = 0
    while not norm <= s.tol:
        if iterations >= s.max_iter or not np.isfinite(norm):
            raise NewtonConvergenceError(iterations, norm)
        J = finite_difference_jacobian(residual, x) if use_fd else jacobian(x)
        x = x - lu_solve(J, r)
        iterations += 1
        r = residual(x)
        norm = float(np.max(np.abs(r))) if r.size else 0.0
        history.append(norm)

    return NewtonResult(x=x, iterations=iterations, residual_norm=norm, history=history)
