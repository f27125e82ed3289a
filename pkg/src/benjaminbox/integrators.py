# -*- coding: utf-8 -*-
"""
benjaminbox.integrators

Time steppers for the Benjamin equation.

- euler-box : explicit leapfrog u^{i+1} = u^{i-1} + 2 dt g(u^i), Heun bootstrap
- preissmann: implicit box scheme on z = [u, phi, w, v], dense Newton (odd N)
- tvm       : momentum-preserving midpoint scheme for the BO form (even N)
- heun, rk4 : explicit Runge-Kutta comparison schemes

All steppers share reduced_rhs and do not validate their inputs: a
non-finite state is returned as is and handled by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from benjaminbox.dynamics import DiffChoice, Params, StateZ, reduced_rhs
from benjaminbox.errors import ConfigError, NewtonConvergenceError, ParityError
from benjaminbox.solvers import NewtonResult, NewtonSettings, newton_solve
from benjaminbox.spectral import (
    Field,
    Grid,
    L_matrix,
    apply_L,
    average_matrix,
    central_diff,
    difference_matrix,
    hilbert_fft,
    hilbert_matrix,
    spectral_symbols,
)

SCHEMES = ("euler-box", "preissmann", "tvm", "heun", "rk4")


# -----------------------------
# Explicit schemes
# -----------------------------


def heun_step(
    u: Field, p: Params, grid: Grid, dt: float, diff: DiffChoice = "centered"
) -> Field:
    g0 = reduced_rhs(u, p, grid, diff)
    g1 = reduced_rhs(u + dt * g0, p, grid, diff)
    return u + 0.5 * dt * (g0 + g1)


def rk4_step(
    u: Field, p: Params, grid: Grid, dt: float, diff: DiffChoice = "centered"
) -> Field:
    k1 = reduced_rhs(u, p, grid, diff)
    k2 = reduced_rhs(u + 0.5 * dt * k1, p, grid, diff)
    k3 = reduced_rhs(u + 0.5 * dt * k2, p, grid, diff)
    k4 = reduced_rhs(u + dt * k3, p, grid, diff)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def euler_box_start(
    u0: Field, p: Params, grid: Grid, dt: float, diff: DiffChoice = "centered"
) -> Tuple[Field, Field]:
    """(u^0, u^1) with u^1 from one Heun step; seeds the two-level leapfrog."""
    u0 = np.array(u0, dtype=np.float64)
    return u0, heun_step(u0, p, grid, dt, diff)


def euler_box_step(
    u_prev: Field,
    u_curr: Field,
    p: Params,
    grid: Grid,
    dt: float,
    diff: DiffChoice = "centered",
) -> Field:
    return u_prev + 2.0 * dt * reduced_rhs(u_curr, p, grid, diff)


# -----------------------------
# Preissmann box scheme
# -----------------------------
# Box (n+1/2, i+1/2), A = spatial average, Dp = forward difference,
# bars are time averages. Rows:
#   R0 = 1/2 A (phi' - phi)/dt - beta Dp vbar + W + gamma U + lam/2 U^2 - alpha L U
#   R1 = -1/2 A (u' - u)/dt + Dp wbar
#   R2 = -Dp phibar + U - mean(U)
#   R3 = Dp ubar - V
# with U = A ubar, W = A wbar, V = A vbar. In the Newton system the
# last R2 row is replaced by sum(phi') - sum(phi) = 0.


def _require_odd(grid: Grid, what: str) -> None:
    if grid.parity != "odd":
        raise ParityError(
            f"{what} is uniquely solvable only for an odd number of grid points, "
            f"got N={grid.N}"
        )


def _avg(f: np.ndarray) -> np.ndarray:
    return 0.5 * (f + np.roll(f, -1))


def _box_rows(z_next: StateZ, z_curr: StateZ, p: Params, grid: Grid, dt: float) -> np.ndarray:
    ubar = 0.5 * (z_curr.u + z_next.u)
    wbar = 0.5 * (z_curr.w + z_next.w)
    vbar = 0.5 * (z_curr.v + z_next.v)
    phibar = 0.5 * (z_curr.phi + z_next.phi)
    U, W, V = _avg(ubar), _avg(wbar), _avg(vbar)
    dp = lambda f: central_diff(f, grid, "plus")

    r0 = 0.5 * _avg(z_next.phi - z_curr.phi) / dt + W + p.gamma * U + 0.5 * p.lam * U**2
    if p.alpha:
        r0 = r0 - p.alpha * apply_L(U, grid)
    if p.beta:
        r0 = r0 - p.beta * dp(vbar)
    r1 = -0.5 * _avg(z_next.u - z_curr.u) / dt + dp(wbar)
    r2 = -dp(phibar) + U - U.mean()
    r3 = dp(ubar) - V
    return np.vstack([r0, r1, r2, r3])


def preissmann_residual(
    z_next: StateZ, z_curr: StateZ, p: Params, grid: Grid, dt: float
) -> np.ndarray:
    """Box residual as a 4N vector ordered [R0; R1; R2; R3]."""
    _require_odd(grid, "the Preissmann box scheme")
    return _box_rows(z_next, z_curr, p, grid, dt).ravel()


def preissmann_gauged_residual(
    x: np.ndarray, z_curr: StateZ, p: Params, grid: Grid, dt: float
) -> np.ndarray:
    """Newton system in the stacked unknown x = z_next.stack()."""
    rows = _box_rows(StateZ.from_stack(x, grid), z_curr, p, grid, dt)
    rows[2, -1] = np.sum(x[grid.N : 2 * grid.N]) - np.sum(z_curr.phi)
    return rows.ravel()


def preissmann_jacobian(
    z_next: StateZ, z_curr: StateZ, p: Params, grid: Grid, dt: float
) -> np.ndarray:
    """Analytic Jacobian of the gauged Newton system with respect to z_next."""
    _require_odd(grid, "the Preissmann box scheme")
    N = grid.N
    I = np.eye(N)
    A = average_matrix(N)
    Dp = difference_matrix(grid, "plus")
    U = A @ (0.5 * (z_curr.u + z_next.u))

    J = np.zeros((4 * N, 4 * N))
    blk = lambda r, c: (slice(r * N, (r + 1) * N), slice(c * N, (c + 1) * N))

    du0 = p.gamma * I + p.lam * np.diag(U)
    if p.alpha:
        du0 = du0 - p.alpha * L_matrix(grid)
    J[blk(0, 0)] = 0.5 * du0 @ A
    J[blk(0, 1)] = 0.5 * A / dt
    J[blk(0, 2)] = 0.5 * A
    J[blk(0, 3)] = -0.5 * p.beta * Dp

    J[blk(1, 0)] = -0.5 * A / dt
    J[blk(1, 2)] = 0.5 * Dp

    J[blk(2, 0)] = 0.5 * (I - np.full((N, N), 1.0 / N)) @ A
    J[blk(2, 1)] = -0.5 * Dp
    # gauge row
    J[3 * N - 1, :] = 0.0
    J[3 * N - 1, N : 2 * N] = 1.0

    J[blk(3, 0)] = 0.5 * Dp
    J[blk(3, 3)] = -0.5 * A
    return J


def _box_symbols(grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    k = spectral_symbols(grid.N).wave_diag
    omega = np.exp(2j * np.pi * k / grid.N)
    return 0.5 * (1.0 + omega), (omega - 1.0) / grid.dx


def preissmann_start(
    u0: Field, p: Params, grid: Grid, diff: DiffChoice = "centered"
) -> StateZ:
    """
    Box-consistent initial level: Dp phi = A u - mean(u), A v = Dp u,
    Dp w = 1/2 A g(u) with g the reduced vector field. phi and w are
    zero-mean.
    """
    _require_odd(grid, "the Preissmann box scheme")
    u0 = np.array(u0, dtype=np.float64)
    a_sym, d_sym = _box_symbols(grid)
    nonzero = spectral_symbols(grid.N).wave_diag != 0

    def solve(num_sym, den_sym, rhs):
        hat = np.fft.fft(rhs)
        out = np.zeros_like(hat)
        out[nonzero] = num_sym[nonzero] * hat[nonzero] / den_sym[nonzero]
        return np.fft.ifft(out).real

    phi = solve(a_sym, d_sym, u0)
    v = solve(d_sym, a_sym, u0)
    w = solve(0.5 * a_sym, d_sym, reduced_rhs(u0, p, grid, diff))
    return StateZ(u=u0, phi=phi, w=w, v=v)


def _preissmann_solve(
    z_curr: StateZ,
    p: Params,
    grid: Grid,
    dt: float,
    settings: NewtonSettings,
) -> NewtonResult:
    _require_odd(grid, "the Preissmann box scheme")
    return newton_solve(
        lambda x: preissmann_gauged_residual(x, z_curr, p, grid, dt),
        lambda x: preissmann_jacobian(StateZ.from_stack(x, grid), z_curr, p, grid, dt),
        z_curr.stack(),
        settings,
    )


def preissmann_step(
    z_curr: StateZ,
    p: Params,
    grid: Grid,
    dt: float,
    settings: NewtonSettings = NewtonSettings(),
) -> StateZ:
    result = _preissmann_solve(z_curr, p, grid, dt, settings)
    return StateZ.from_stack(result.x, grid)


# -----------------------------
# TVM scheme (BO form)
# -----------------------------


def _require_tvm(p: Params, grid: Grid) -> None:
    if grid.parity != "even":
        raise ParityError(f"tvm uses the even-N Hilbert kernel, got N={grid.N}")
    if p.beta != 0.0 or p.gamma != 0.0:
        raise ConfigError("tvm is defined for the Benjamin-Ono form only (beta = gamma = 0)")


def _skew_flux(m: np.ndarray, grid: Grid) -> np.ndarray:
    a, c = np.roll(m, 1), np.roll(m, -1)
    return (a + m + c) * (c - a) / (6.0 * grid.dx)


def _skew_flux_jacobian(m: np.ndarray, grid: Grid) -> np.ndarray:
    N = grid.N
    a, c = np.roll(m, 1), np.roll(m, -1)
    n = np.arange(N)
    J = np.zeros((N, N))
    J[n, (n - 1) % N] = (-2.0 * a - m) / (6.0 * grid.dx)
    J[n, n] = (c - a) / (6.0 * grid.dx)
    J[n, (n + 1) % N] = (2.0 * c + m) / (6.0 * grid.dx)
    return J


def _second_difference(f: np.ndarray, grid: Grid) -> np.ndarray:
    return (np.roll(f, -1) - 2.0 * f + np.roll(f, 1)) / grid.dx**2


def tvm_residual(
    u_next: Field, u_curr: Field, p: Params, grid: Grid, dt: float
) -> Field:
    _require_tvm(p, grid)
    m = 0.5 * (u_curr + u_next)
    r = (u_next - u_curr) / dt + p.lam * _skew_flux(m, grid)
    if p.alpha:
        r = r - p.alpha * hilbert_fft(_second_difference(m, grid), grid)
    return r


def tvm_jacobian(
    u_next: Field, u_curr: Field, p: Params, grid: Grid, dt: float
) -> np.ndarray:
    _require_tvm(p, grid)
    m = 0.5 * (u_curr + u_next)
    J = p.lam * _skew_flux_jacobian(m, grid)
    if p.alpha:
        J = J - p.alpha * _hilbert_second_difference(grid)
    return np.eye(grid.N) / dt + 0.5 * J


@lru_cache(maxsize=8)
def _hilbert_second_difference(grid: Grid) -> np.ndarray:
    D2 = difference_matrix(grid, "plus") @ difference_matrix(grid, "minus")
    out = hilbert_matrix(grid.N) @ D2
    out.setflags(write=False)
    return out


def _tvm_solve(
    u_curr: Field, p: Params, grid: Grid, dt: float, settings: NewtonSettings
) -> NewtonResult:
    _require_tvm(p, grid)
    u_curr = np.asarray(u_curr, dtype=np.float64)
    return newton_solve(
        lambda y: tvm_residual(y, u_curr, p, grid, dt),
        lambda y: tvm_jacobian(y, u_curr, p, grid, dt),
        u_curr,
        settings,
    )


def tvm_step(
    u: Field,
    p: Params,
    grid: Grid,
    dt: float,
    settings: NewtonSettings = NewtonSettings(),
) -> Field:
    return _tvm_solve(u, p, grid, dt, settings).x


# -----------------------------
# Stepper registry
# -----------------------------


@dataclass
class StepperState:
    scheme: str
    u: Field
    t: float
    step: int
    params: Params
    grid: Grid
    dt: float
    settings: NewtonSettings
    t0: float = 0.0
    u_prev: Optional[Field] = None
    z: Optional[StateZ] = None
    newton_iterations: int = 0
    newton_max_residual: float = 0.0


def _check_scheme(scheme: str, p: Params, grid: Grid) -> None:
    if scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if scheme == "preissmann":
        _require_odd(grid, "the Preissmann box scheme")
    if scheme == "tvm":
        _require_tvm(p, grid)


@dataclass
class Stepper:
    """Advances one StepperState by one dt; t = t0 + step * dt."""

    state: StepperState
    diff: DiffChoice = "centered"
    _advance: Callable[["Stepper"], None] = field(init=False, repr=False)

    def __post_init__(self):
        self._advance = _ADVANCE[self.state.scheme]

    def advance(self) -> StepperState:
        try:
            self._advance(self)
        except NewtonConvergenceError as exc:
            raise NewtonConvergenceError(
                exc.iterations, exc.residual_norm, step_index=self.state.step + 1
            ) from exc
        s = self.state
        s.step += 1
        s.t = s.t0 + s.step * s.dt
        return s

    def _record(self, result: NewtonResult) -> None:
        s = self.state
        s.newton_iterations += result.iterations
        s.newton_max_residual = max(s.newton_max_residual, result.residual_norm)


def _advance_euler_box(st: Stepper) -> None:
    s = st.state
    if s.u_prev is None:
        _, u1 = euler_box_start(s.u, s.params, s.grid, s.dt, st.diff)
        s.u_prev, s.u = s.u, u1
        return
    u_next = euler_box_step(s.u_prev, s.u, s.params, s.grid, s.dt, st.diff)
    s.u_prev, s.u = s.u, u_next


def _advance_preissmann(st: Stepper) -> None:
    s = st.state
    result = _preissmann_solve(s.z, s.params, s.grid, s.dt, s.settings)
    st._record(result)
    s.z = StateZ.from_stack(result.x, s.grid)
    s.u = s.z.u


def _advance_tvm(st: Stepper) -> None:
    s = st.state
    result = _tvm_solve(s.u, s.params, s.grid, s.dt, s.settings)
    st._record(result)
    s.u = result.x


def _advance_heun(st: Stepper) -> None:
    s = st.state
    s.u = heun_step(s.u, s.params, s.grid, s.dt, st.diff)


def _advance_rk4(st: Stepper) -> None:
    s = st.state
    s.u = rk4_step(s.u, s.params, s.grid, s.dt, st.diff)


_ADVANCE: Dict[str, Callable[[Stepper], None]] = {
    "euler-box": _advance_euler_box,
    "preissmann": _advance_preissmann,
    "tvm": _advance_tvm,
    "heun": _advance_heun,
    "rk4": _advance_rk4,
}


def make_stepper(
    scheme: str,
    u0: Field,
    p: Params,
    grid: Grid,
    dt: float,
    settings: NewtonSettings = NewtonSettings(),
    diff: DiffChoice = "centered",
    t0: float = 0.0,
) -> Stepper:
    _check_scheme(scheme, p, grid)
    if not (dt > 0):
        raise ConfigError(f"dt must be positive, got {dt}")
    u0 = np.array(u0, dtype=np.float64)
    state = StepperState(
        scheme=scheme,
        u=u0,
        t=t0,
        step=0,
        params=p,
        grid=grid,
        dt=dt,
        settings=settings,
        t0=t0,
    )
    if scheme == "preissmann":
        state = replace(state, z=preissmann_start(u0, p, grid, diff))
    return Stepper(state=state, diff=diff)
