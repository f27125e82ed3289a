# -*- coding: utf-8 -*-
"""
benjaminbox.diagnostics

- invariants: discrete mass, momentum and energy
- two_form_sum / tangent_step: symplecticity check along linearized
  leapfrog trajectories (odd N, mean-free tangents)
- error_norms, fit_order, convergence_study: accuracy measurements
- max_slope, relative_drift, drift_halves: run monitors
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from benjaminbox.dynamics import (
    DiffChoice,
    Params,
    StateZ,
    lift_state,
    linearize_rhs,
    structure_matrices,
)
from benjaminbox.errors import GridError, ParityError
from benjaminbox.initial import bo_soliton
from benjaminbox.integrators import make_stepper
from benjaminbox.solvers import NewtonSettings
from benjaminbox.spectral import (
    Field,
    Grid,
    apply_L,
    central_diff,
    check_field,
    fourier_series_hilbert,
    hilbert_fft,
    make_grid,
)

ROUNDOFF_FLOOR = 1e-12


# -----------------------------
# Invariants
# -----------------------------


@dataclass(frozen=True)
class InvariantRecord:
    t: float
    mass: float
    momentum: float
    energy: float


def invariants(u: Field, p: Params, grid: Grid, t: float = 0.0) -> InvariantRecord:
    u = check_field(u, grid)
    dx = grid.dx
    ux = central_diff(u, grid, "centered")
    density = (
        -0.5 * p.gamma * u**2
        - (p.lam / 6.0) * u**3
        + 0.5 * p.alpha * u * apply_L(u, grid)
        - 0.5 * p.beta * ux**2
    )
    return InvariantRecord(
        t=float(t),
        mass=float(dx * np.sum(u)),
        momentum=float(-0.5 * dx * np.sum(u**2)),
        energy=float(dx * np.sum(density)),
    )


# -----------------------------
# Two-form
# -----------------------------


@dataclass(frozen=True)
class TangentPair:
    """Two tangent trajectories, each given at levels i-1 and i."""

    xi_prev: StateZ
    xi_curr: StateZ
    eta_prev: StateZ
    eta_curr: StateZ


def lift_tangent_pair(
    xi: Tuple[Field, Field], eta: Tuple[Field, Field], grid: Grid
) -> TangentPair:
    """Lift (du^{i-1}, du^i) pairs to four-component tangents."""
    for du in (*xi, *eta):
        if abs(float(np.mean(du))) > 1e-12 * max(1.0, float(np.max(np.abs(du)))):
            raise ValueError("tangent u-components must be mean-free")
    return TangentPair(
        xi_prev=lift_state(xi[0], grid),
        xi_curr=lift_state(xi[1], grid),
        eta_prev=lift_state(eta[0], grid),
        eta_curr=lift_state(eta[1], grid),
    )


def _wedge_sum(a: StateZ, b: StateZ, M: np.ndarray) -> float:
    # sum_n a_n^T M b_n
    return float(np.sum(a.as_array() * (M @ b.as_array())))


def two_form_sum(pair: TangentPair) -> float:
    M = structure_matrices(Params()).M
    return 0.5 * (
        _wedge_sum(pair.xi_prev, pair.eta_curr, M)
        - _wedge_sum(pair.eta_prev, pair.xi_curr, M)
    )


def tangent_step(
    du_prev: Field,
    du_curr: Field,
    u_curr: Field,
    p: Params,
    grid: Grid,
    dt: float,
    diff: DiffChoice = "centered",
) -> Field:
    """Linearized leapfrog: du^{i+1} = du^{i-1} + 2 dt g'(u^i) du^i."""
    if grid.parity != "odd":
        raise ParityError(f"tangent diagnostics need odd N, got N={grid.N}")
    J = linearize_rhs(u_curr, p, grid, diff)
    return du_prev + 2.0 * dt * J.matvec(du_curr)


# -----------------------------
# Error norms and convergence
# -----------------------------


def error_norms(u: Field, ref: Field, grid: Grid) -> Tuple[float, float]:
    u = np.asarray(u, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if u.shape != (grid.N,) or ref.shape != (grid.N,):
        raise GridError(
            f"grid mismatch: shapes {u.shape} and {ref.shape}, grid expects ({grid.N},)"
        )
    e = u - ref
    return float(np.max(np.abs(e))), float(math.sqrt(grid.dx * np.sum(e**2)))


def fit_order(dx: Sequence[float], errors: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(error) against log(dx); None at round-off."""
    dx = np.asarray(dx, dtype=np.float64)
    errors = np.asarray(errors, dtype=np.float64)
    if dx.size < 2:
        raise ValueError("a convergence fit needs at least two levels")
    if np.all(errors < ROUNDOFF_FLOOR) or np.any(errors <= 0):
        return None
    slope, _ = np.polyfit(np.log(dx), np.log(errors), 1)
    return float(slope)


@dataclass
class ConvergenceReport:
    Ns: List[int]
    dx: List[float]
    max_errors: List[float]
    l2_errors: List[float]
    order: Optional[float]
    l2_order: Optional[float] = None

    def as_rows(self) -> List[dict]:
        return [
            {"N": n, "dx": h, "max_error": e, "l2_error": e2}
            for n, h, e, e2 in zip(self.Ns, self.dx, self.max_errors, self.l2_errors)
        ]


def convergence_study(
    approximate: Callable[[Grid], Field],
    reference: Callable[[Grid], Field],
    Ns: Sequence[int],
    l: float,
) -> ConvergenceReport:
    """
    Errors of approximate(grid) against reference(grid) on each level
    and the fitted order in the max norm (and L2).
    """
    Ns = [int(n) for n in Ns]
    if len(Ns) < 2:
        raise ValueError("convergence_study needs at least two grid levels")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError(f"grid sequence must be increasing, got {Ns}")

    dxs, emax, el2 = [], [], []
    for N in Ns:
        grid = make_grid(l, N)
        m, e2 = error_norms(approximate(grid), reference(grid), grid)
        dxs.append(grid.dx)
        emax.append(m)
        el2.append(e2)
    return ConvergenceReport(
        Ns=Ns,
        dx=dxs,
        max_errors=emax,
        l2_errors=el2,
        order=fit_order(dxs, emax),
        l2_order=fit_order(dxs, el2),
    )


def cubic_sine_series(x, l: float):
    """sum_k sin(k theta)/k^3 in closed form, theta = 2 pi x / l in [0, 2 pi)."""
    theta = 2.0 * np.pi * np.mod(np.asarray(x, dtype=np.float64), l) / l
    return np.pi**2 * theta / 6.0 - np.pi * theta**2 / 4.0 + theta**3 / 12.0


def cubic_sine_series_hilbert(x, l: float, modes: int = 4096):
    """Hilbert transform of cubic_sine_series: -sum_{k<=modes} cos(k theta)/k^3."""
    theta = 2.0 * np.pi * np.asarray(x, dtype=np.float64) / l
    k = np.arange(1, modes + 1, dtype=np.float64)
    return -(np.cos(np.outer(theta, k)) @ (1.0 / k**3))


def hilbert_convergence(
    f: Callable[[np.ndarray], np.ndarray],
    l: float,
    Ns: Sequence[int],
    reference: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    modes: int = 4096,
) -> ConvergenceReport:
    """hilbert_fft on samples of f against the Fourier-series transform."""
    if reference is None:
        reference = lambda x: fourier_series_hilbert(f, l, x, modes=modes)
    return convergence_study(
        lambda grid: hilbert_fft(f(grid.x), grid),
        lambda grid: reference(grid.x),
        Ns,
        l,
    )


def scheme_convergence(
    scheme: str,
    Ns: Sequence[int],
    dt0: float,
    t_end: float,
    c: float = 0.25,
    l: float = 30.0,
    settings: NewtonSettings = NewtonSettings(),
) -> ConvergenceReport:
    """
    BO soliton error at t_end for a scheme, halving dt with each grid level
    (dt = dt0 * Ns[0] / N).
    """
    p = Params(alpha=1.0, beta=0.0, gamma=0.0, lam=1.0)
    Ns = [int(n) for n in Ns]

    def approximate(grid: Grid) -> Field:
        dt = dt0 * Ns[0] / grid.N
        steps = int(round(t_end / dt))
        stepper = make_stepper(scheme, bo_soliton(grid.x, 0.0, c, l), p, grid, dt, settings)
        for _ in range(steps):
            stepper.advance()
        return stepper.state.u

    return convergence_study(
        approximate,
        lambda grid: bo_soliton(grid.x, t_end, c, l),
        Ns,
        l,
    )


# -----------------------------
# Run monitors
# -----------------------------


def max_slope(u: Field, grid: Grid) -> float:
    return float(np.max(np.abs(central_diff(u, grid, "centered"))))


def relative_drift(series: Sequence[float]) -> float:
    q = np.asarray(series, dtype=np.float64)
    if q.size == 0:
        return 0.0
    return float(np.max(np.abs(q - q[0])) / max(abs(q[0]), np.finfo(float).tiny))


def drift_halves(times: Sequence[float], series: Sequence[float]) -> Tuple[float, float]:
    """max |q - q(t0)| over the first and over the second half of the time span."""
    t = np.asarray(times, dtype=np.float64)
    q = np.asarray(series, dtype=np.float64)
    if t.size == 0:
        return 0.0, 0.0
    mid = 0.5 * (t[0] + t[-1])
    dev = np.abs(q - q[0])
    first = dev[t <= mid]
    second = dev[t >= mid]
    return (
        float(first.max()) if first.size else 0.0,
        float(second.max()) if second.size else 0.0,
    )
