# -*- coding: utf-8 -*-
"""
benjaminbox.dynamics

Benjamin equation  u_t + gamma u_x + lambda u u_x - alpha L u_x - beta u_xxx = 0
in the extended first-order form  M z_t + K z_x = dS/dz,  z = [u, phi, w, v].

Eliminating phi, w, v gives the reduced vector field
    u_t = -D(gamma u + lambda/2 u^2) + alpha D(L u) + beta D^3 u
which is what the explicit schemes integrate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.linalg import circulant
from scipy.sparse.linalg import LinearOperator

from benjaminbox.errors import ConfigError, ParityError, SingularMatrixError
from benjaminbox.spectral import (
    Field,
    Grid,
    L_matrix,
    apply_L,
    central_diff,
    difference_matrix,
    spectral_derivative,
    spectral_symbols,
)

DiffChoice = Literal["centered", "spectral"]


# -----------------------------
# Parameters and structure
# -----------------------------


@dataclass(frozen=True)
class Params:
    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    lam: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "lam"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"parameter {name} must be finite")


@dataclass(frozen=True)
class StructureMatrices:
    M: np.ndarray
    K: np.ndarray


def structure_matrices(p: Params) -> StructureMatrices:
    M = np.zeros((4, 4))
    M[0, 1], M[1, 0] = 0.5, -0.5
    K = np.zeros((4, 4))
    K[0, 3], K[3, 0] = -p.beta, p.beta
    K[1, 2], K[2, 1] = 1.0, -1.0
    return StructureMatrices(M=M, K=K)


@dataclass(frozen=True)
class StateZ:
    u: Field
    phi: Field
    w: Field
    v: Field

    def as_array(self) -> np.ndarray:
        return np.vstack([self.u, self.phi, self.w, self.v])

    def stack(self) -> np.ndarray:
        return self.as_array().ravel()

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "StateZ":
        arr = np.asarray(arr, dtype=np.float64)
        return cls(u=arr[0], phi=arr[1], w=arr[2], v=arr[3])

    @classmethod
    def from_stack(cls, vec: np.ndarray, grid: Grid) -> "StateZ":
        return cls.from_array(np.asarray(vec).reshape(4, grid.N))

    @classmethod
    def zeros(cls, grid: Grid) -> "StateZ":
        return cls.from_array(np.zeros((4, grid.N)))


# -----------------------------
# Variational derivative
# -----------------------------


def grad_S(z: StateZ, p: Params, grid: Grid) -> np.ndarray:
    """Rows of dS/dz as a (4, N) array; L acts on the whole u-vector."""
    u = z.u
    out = np.zeros((4, grid.N))
    out[0] = -z.w - p.gamma * u - 0.5 * p.lam * u**2 + p.alpha * apply_L(u, grid)
    out[2] = -u
    out[3] = p.beta * z.v
    return out


# -----------------------------
# Reduced vector field
# -----------------------------


def _derivative(diff: DiffChoice):
    if diff == "centered":
        return lambda u, grid: central_diff(u, grid, "centered")
    if diff == "spectral":
        return spectral_derivative
    raise ValueError(f"unknown difference operator: {diff!r}")


def reduced_rhs(u: Field, p: Params, grid: Grid, diff: DiffChoice = "centered") -> Field:
    D = _derivative(diff)
    flux = p.gamma * u + 0.5 * p.lam * u**2
    g = -D(flux, grid)
    if p.alpha:
        g = g + p.alpha * D(apply_L(u, grid), grid)
    if p.beta:
        g = g + p.beta * D(D(D(u, grid), grid), grid)
    return g


def linearize_rhs(
    u: Field, p: Params, grid: Grid, diff: DiffChoice = "centered"
) -> LinearOperator:
    """Frechet derivative of reduced_rhs at u, applied matrix-free."""
    D = _derivative(diff)
    u = np.array(u, dtype=np.float64)

    def matvec(du):
        du = np.ravel(du)
        inner = p.gamma * du + p.lam * u * du
        if p.alpha:
            inner = inner - p.alpha * apply_L(du, grid)
        out = -D(inner, grid)
        if p.beta:
            out = out + p.beta * D(D(D(du, grid), grid), grid)
        return out

    return LinearOperator((grid.N, grid.N), matvec=matvec, dtype=np.float64)


def rhs_jacobian(
    u: Field, p: Params, grid: Grid, diff: DiffChoice = "centered"
) -> np.ndarray:
    """Dense form of linearize_rhs."""
    if diff == "centered":
        D = difference_matrix(grid, "centered")
    elif diff == "spectral":
        sym = spectral_symbols(grid.N)
        column = np.fft.ifft(1j * (2.0 * np.pi / grid.l) * sym.wave_diag).real
        D = circulant(column)
    else:
        raise ValueError(f"unknown difference operator: {diff!r}")
    inner = p.gamma * np.eye(grid.N) + p.lam * np.diag(u) - p.alpha * L_matrix(grid)
    return -D @ inner + p.beta * (D @ D @ D)


# -----------------------------
# Lift u -> z
# -----------------------------


def _invert_centered(rhs: Field, grid: Grid) -> Field:
    """Zero-mean solution of delta_x y = rhs - mean(rhs) on an odd grid."""
    sym = spectral_symbols(grid.N)
    symbol = 1j * np.sin(2.0 * np.pi * sym.wave_diag / grid.N) / grid.dx
    nonzero = sym.wave_diag != 0
    smallest = float(np.min(np.abs(symbol[nonzero])))
    if smallest < 1e-14 / grid.dx:
        raise SingularMatrixError(
            "centered difference is not invertible on mean-free fields",
            pivot=smallest,
            scale=1.0 / grid.dx,
        )
    hat = np.fft.fft(rhs - rhs.mean())
    out = np.zeros_like(hat)
    out[nonzero] = hat[nonzero] / symbol[nonzero]
    return np.fft.ifft(out).real


def lift_state(
    u: Field,
    grid: Grid,
    u_prev: Optional[Field] = None,
    u_next: Optional[Field] = None,
    dt: Optional[float] = None,
) -> StateZ:
    """
    Reconstruct z = [u, phi, w, v] from u on an odd grid.

    v = delta_x u, delta_x phi = u - mean(u), delta_x w = 1/2 delta_t u.
    phi and w are normalized to zero mean; delta_t u is the centered
    difference when both neighbours are given, zero otherwise.
    """
    if grid.parity != "odd":
        raise ParityError(
            f"lift_state needs an odd number of grid points, got N={grid.N}"
        )
    u = np.asarray(u, dtype=np.float64)
    v = central_diff(u, grid, "centered")
    phi = _invert_centered(u, grid)
    if u_prev is not None and u_next is not None:
        if dt is None or dt <= 0:
            raise ValueError("a positive dt is required for the time difference")
        u_t = (np.asarray(u_next) - np.asarray(u_prev)) / (2.0 * dt)
        w = _invert_centered(0.5 * u_t, grid)
    else:
        w = np.zeros(grid.N)
    return StateZ(u=u.copy(), phi=phi, w=w, v=v)
