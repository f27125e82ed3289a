# -*- coding: utf-8 -*-
"""
benjaminbox.spectral

Periodic grid, discrete Hilbert transforms and the symmetric operator L.

- Even N: cot kernel c_n (midpoint rule on pairs of cells)
- Odd N: cot/tan kernel d_n
- Both are diagonalized by the DFT with symbol -i*sgn
- Transforms follow numpy.fft: unnormalized forward, 1/N inverse
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
import numpy.typing as npt
from scipy.linalg import circulant

from benjaminbox.errors import GridError, ImaginaryResidueError

Field = npt.NDArray[np.float64]
Parity = Literal["even", "odd"]
DiffVariant = Literal["plus", "minus", "centered"]

RESIDUE_RTOL = 1e-10


# -----------------------------
# Grid
# -----------------------------


@dataclass(frozen=True)
class Grid:
    l: float
    N: int

    @property
    def dx(self) -> float:
        return self.l / self.N

    @property
    def parity(self) -> Parity:
        return "even" if self.N % 2 == 0 else "odd"

    @property
    def x(self) -> Field:
        return np.arange(self.N) * self.dx


def make_grid(l: float, N: int) -> Grid:
    if not np.isfinite(l) or l <= 0:
        raise GridError(f"domain length must be positive, got l={l}")
    if int(N) != N or N < 3:
        raise GridError(f"grid needs an integer N >= 3, got N={N}")
    return Grid(l=float(l), N=int(N))


def check_field(u, grid: Grid) -> Field:
    """Coerce to a float64 vector and enforce the Field invariants."""
    arr = np.asarray(u, dtype=np.float64)
    if arr.shape != (grid.N,):
        raise GridError(f"field has shape {arr.shape}, grid expects ({grid.N},)")
    if not np.all(np.isfinite(arr)):
        raise GridError("field contains non-finite entries")
    return arr


# -----------------------------
# Kernel and symbols
# -----------------------------


@dataclass(frozen=True)
class HilbertKernel:
    coeffs: Field
    parity: Parity


@dataclass(frozen=True)
class SpectralSymbols:
    sgn_diag: npt.NDArray[np.int64]
    wave_diag: npt.NDArray[np.int64]


def _require_points(N: int) -> None:
    if int(N) != N or N < 3:
        raise GridError(f"need an integer N >= 3, got N={N}")


def hilbert_kernel(N: int) -> HilbertKernel:
    _require_points(N)
    n = np.arange(N)
    coeffs = np.zeros(N)
    odd = n % 2 == 1
    if N % 2 == 0:
        coeffs[odd] = (2.0 / N) / np.tan(np.pi * n[odd] / N)
        parity: Parity = "even"
    else:
        even = (n % 2 == 0) & (n > 0)
        coeffs[odd] = (1.0 / N) / np.tan(np.pi * n[odd] / (2 * N))
        coeffs[even] = -(1.0 / N) * np.tan(np.pi * n[even] / (2 * N))
        parity = "odd"
    coeffs.setflags(write=False)
    return HilbertKernel(coeffs=coeffs, parity=parity)


@lru_cache(maxsize=64)
def spectral_symbols(N: int) -> SpectralSymbols:
    """Diagonals of S_even/S_odd and K~ in numpy.fft mode order."""
    _require_points(N)
    wave = np.fft.fftfreq(N, d=1.0 / N).round().astype(np.int64)
    if N % 2 == 0:
        wave[N // 2] = 0
    sgn = np.sign(wave)
    wave.setflags(write=False)
    sgn.setflags(write=False)
    return SpectralSymbols(sgn_diag=sgn, wave_diag=wave)


# -----------------------------
# Fourier multipliers
# -----------------------------


def _apply_multiplier(u: Field, multiplier: np.ndarray) -> Field:
    out = np.fft.ifft(multiplier * np.fft.fft(u))
    scale = float(np.max(np.abs(u))) if u.size else 0.0
    residue = float(np.max(np.abs(out.imag))) if out.size else 0.0
    threshold = RESIDUE_RTOL * scale
    if residue > threshold and residue > np.finfo(float).tiny:
        raise ImaginaryResidueError(residue, threshold)
    return out.real


def _check_len(u, grid: Grid) -> Field:
    arr = np.asarray(u, dtype=np.float64)
    if arr.shape != (grid.N,):
        raise GridError(f"field has shape {arr.shape}, grid expects ({grid.N},)")
    return arr


def hilbert_direct(u: Field, grid: Grid) -> Field:
    """O(N^2) cyclic convolution with the kernel; oracle for hilbert_fft."""
    u = _check_len(u, grid)
    return circulant(hilbert_kernel(grid.N).coeffs) @ u


def hilbert_fft(u: Field, grid: Grid) -> Field:
    u = _check_len(u, grid)
    sym = spectral_symbols(grid.N)
    return _apply_multiplier(u, -1j * sym.sgn_diag)


def spectral_derivative(u: Field, grid: Grid) -> Field:
    u = _check_len(u, grid)
    sym = spectral_symbols(grid.N)
    return _apply_multiplier(u, 1j * (2.0 * np.pi / grid.l) * sym.wave_diag)


def apply_L(u: Field, grid: Grid) -> Field:
    u = _check_len(u, grid)
    sym = spectral_symbols(grid.N)
    return _apply_multiplier(
        u, (2.0 * np.pi / grid.l) * (sym.wave_diag * sym.sgn_diag).astype(float)
    )


def central_diff(u: Field, grid: Grid, variant: DiffVariant = "centered") -> Field:
    u = _check_len(u, grid)
    if variant == "plus":
        return (np.roll(u, -1) - u) / grid.dx
    if variant == "minus":
        return (u - np.roll(u, 1)) / grid.dx
    if variant == "centered":
        return (np.roll(u, -1) - np.roll(u, 1)) / (2.0 * grid.dx)
    raise ValueError(f"unknown difference variant: {variant!r}")


# -----------------------------
# Dense matrix forms (Jacobian blocks)
# -----------------------------


def hilbert_matrix(N: int) -> np.ndarray:
    return circulant(hilbert_kernel(N).coeffs)


def L_matrix(grid: Grid) -> np.ndarray:
    sym = spectral_symbols(grid.N)
    symbol = (2.0 * np.pi / grid.l) * np.abs(sym.wave_diag).astype(float)
    column = np.fft.ifft(symbol).real
    return circulant(column)


def difference_matrix(grid: Grid, variant: DiffVariant = "centered") -> np.ndarray:
    column = np.zeros(grid.N)
    if variant == "plus":
        column[0], column[-1] = -1.0, 1.0
        column /= grid.dx
    elif variant == "minus":
        column[0], column[1] = 1.0, -1.0
        column /= grid.dx
    elif variant == "centered":
        column[1], column[-1] = -1.0, 1.0
        column /= 2.0 * grid.dx
    else:
        raise ValueError(f"unknown difference variant: {variant!r}")
    return circulant(column)


def average_matrix(N: int) -> np.ndarray:
    """(A u)_n = (u_n + u_{n+1}) / 2, cyclic. Singular exactly when N is even."""
    column = np.zeros(N)
    column[0] = 0.5
    column[-1] = 0.5
    return circulant(column)


# -----------------------------
# Continuous Hilbert transform oracle
# -----------------------------


def fourier_series_hilbert(
    f: Callable[[np.ndarray], np.ndarray],
    l: float,
    x: np.ndarray,
    modes: int = 4096,
) -> np.ndarray:
    """
    Evaluate H f at arbitrary points from a truncated Fourier series.

    The coefficients come from `modes` equispaced samples of f; the
    multiplier -i*sgn(k) is applied and the series summed directly at x.
    """
    samples = f(np.arange(modes) * (l / modes))
    coeffs = np.fft.rfft(samples) / modes
    k = np.arange(coeffs.size)
    if modes % 2 == 0:
        coeffs[-1] = 0.0
    theta = 2.0 * np.pi * np.outer(np.asarray(x, dtype=float), k[1:]) / l
    a = coeffs[1:]
    # H e^{ik theta} = -i e^{ik theta} for k > 0; conjugate pair doubles the real part
    return 2.0 * np.real(np.exp(1j * theta) @ (-1j * a))
