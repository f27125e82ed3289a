import numpy as np
import pytest

from benjaminbox.diagnostics import error_norms, invariants
from benjaminbox.dynamics import Params, StateZ, reduced_rhs
from benjaminbox.errors import ConfigError, ParityError
from benjaminbox.initial import bo_soliton, bo_soliton_peak
from benjaminbox.integrators import (
    euler_box_start,
    euler_box_step,
    heun_step,
    make_stepper,
    preissmann_gauged_residual,
    preissmann_jacobian,
    preissmann_residual,
    preissmann_start,
    preissmann_step,
    rk4_step,
    tvm_jacobian,
    tvm_residual,
    tvm_step,
)
from benjaminbox.solvers import NewtonSettings, finite_difference_jacobian
from benjaminbox.spectral import central_diff, make_grid

BO = Params(alpha=1.0, beta=0.0, gamma=0.0, lam=1.0)
MIXED = Params(alpha=0.7, beta=0.3, gamma=0.2, lam=1.5)
C, L = 0.25, 30.0
TOL = 1e-12


def _smooth(grid):
    th = 2 * np.pi * grid.x / grid.l
    return 0.5 * np.cos(th) + 0.25 * np.sin(2 * th)


# -----------------------------
# Explicit schemes
# -----------------------------


@pytest.mark.parametrize("step", [heun_step, rk4_step])
def test_explicit_fixed_point_and_mass(step):
    g = make_grid(L, 64)
    np.testing.assert_array_equal(step(np.zeros(64), MIXED, g, 1e-2), 0.0)
    u = np.random.default_rng(0).standard_normal(64)
    assert abs(np.sum(step(u, MIXED, g, 1e-3)) - np.sum(u)) < 1e-11


def test_rk4_richardson_fifth_order_local_error():
    g = make_grid(L, 64)
    th = 2 * np.pi * g.x / g.l
    u = np.cos(3 * th) + 0.5 * np.sin(4 * th)
    gaps = []
    for dt in (0.1, 0.05):
        one = rk4_step(u, BO, g, dt)
        two = rk4_step(rk4_step(u, BO, g, dt / 2), BO, g, dt / 2)
        gaps.append(np.max(np.abs(one - two)))
    assert 20.0 <= gaps[0] / gaps[1] <= 45.0


def test_euler_box_start():
    g = make_grid(L, 63)
    u_prev, u_curr = euler_box_start(np.zeros(63), BO, g, 1e-2)
    np.testing.assert_array_equal(u_prev, 0.0)
    np.testing.assert_array_equal(u_curr, 0.0)

    u0 = bo_soliton(g.x, 0.0, C, L)
    defects = []
    for dt in (1e-2, 5e-3):
        _, u1 = euler_box_start(u0, BO, g, dt)
        defects.append(np.max(np.abs(u1 - u0 - dt * reduced_rhs(u0, BO, g))))
        assert abs(np.sum(u1) - np.sum(u0)) < 1e-12
    assert 3.0 <= defects[0] / defects[1] <= 5.0


def test_euler_box_step_mass_and_zero():
    g = make_grid(L, 31)
    np.testing.assert_array_equal(euler_box_step(np.zeros(31), np.zeros(31), MIXED, g, 1e-2), 0.0)
    rng = np.random.default_rng(1)
    u_prev, u_curr = rng.standard_normal((2, 31))
    u_next = euler_box_step(u_prev, u_curr, MIXED, g, 1e-2)
    assert abs(np.sum(u_next) - np.sum(u_prev)) < 1e-12


# -----------------------------
# Preissmann
# -----------------------------


def test_preissmann_rejects_even_grid_before_solving():
    g = make_grid(L, 64)
    z = StateZ.zeros(g)
    with pytest.raises(ParityError):
        preissmann_residual(z, z, BO, g, 1e-2)
    with pytest.raises(ParityError):
        preissmann_step(z, BO, g, 1e-2)
    with pytest.raises(ParityError):
        make_stepper("preissmann", np.zeros(64), BO, g, 1e-2)


def test_preissmann_zero_state():
    g = make_grid(L, 15)
    z = StateZ.zeros(g)
    np.testing.assert_array_equal(preissmann_residual(z, z, MIXED, g, 1e-2), 0.0)
    z1 = preissmann_step(z, MIXED, g, 1e-2)
    np.testing.assert_array_equal(z1.stack(), 0.0)


def test_preissmann_start_is_box_consistent():
    g = make_grid(L, 31)
    u = bo_soliton(g.x, 0.0, C, L)
    z = preissmann_start(u, BO, g)
    A = lambda f: 0.5 * (f + np.roll(f, -1))
    np.testing.assert_allclose(central_diff(z.phi, g, "plus"), A(u) - u.mean(), atol=1e-12)
    np.testing.assert_allclose(A(z.v), central_diff(u, g, "plus"), atol=1e-12)
    assert abs(z.phi.mean()) < 1e-12


@pytest.mark.parametrize("p", [BO, MIXED])
def test_preissmann_jacobian_matches_finite_differences(p):
    g = make_grid(L, 11)
    rng = np.random.default_rng(2)
    z_curr = preissmann_start(0.3 * rng.standard_normal(11), p, g)
    x = z_curr.stack() + 1e-2 * rng.standard_normal(44)
    J = preissmann_jacobian(StateZ.from_stack(x, g), z_curr, p, g, 0.05)
    J_fd = finite_difference_jacobian(
        lambda y: preissmann_gauged_residual(y, z_curr, p, g, 0.05), x
    )
    np.testing.assert_allclose(J, J_fd, atol=1e-6)


def test_preissmann_analytic_and_fd_newton_agree():
    g = make_grid(L, 15)
    z0 = preissmann_start(bo_soliton(g.x, 0.0, C, L), MIXED, g)
    a = preissmann_step(z0, MIXED, g, 0.05, NewtonSettings(tol=TOL))
    b = preissmann_step(
        z0, MIXED, g, 0.05, NewtonSettings(tol=TOL, jacobian_mode="finite-difference")
    )
    np.testing.assert_allclose(a.stack(), b.stack(), atol=1e-9)


def test_preissmann_step_residual_and_mass():
    g = make_grid(L, 63)
    z0 = preissmann_start(bo_soliton(g.x, 0.0, C, L), BO, g)
    z1 = preissmann_step(z0, BO, g, 1e-2, NewtonSettings(tol=TOL))
    assert np.max(np.abs(preissmann_residual(z1, z0, BO, g, 1e-2))) < 1e-10
    assert abs(np.sum(z1.u) - np.sum(z0.u)) <= 10 * TOL
    assert abs(np.sum(z1.phi) - np.sum(z0.phi)) < 1e-10


def test_preissmann_momentum_drift_short_run():
    g = make_grid(L, 63)
    u0 = bo_soliton(g.x, 0.0, C, L)
    stepper = make_stepper("preissmann", u0, BO, g, 1e-2, NewtonSettings(tol=TOL))
    I0 = invariants(u0, BO, g).momentum
    for _ in range(100):
        stepper.advance()
    I1 = invariants(stepper.state.u, BO, g).momentum
    assert abs(I1 - I0) <= 1e-6 * abs(I0)
    assert stepper.state.newton_iterations >= 100


def test_preissmann_and_euler_box_agree_on_short_run():
    g = make_grid(L, 63)
    u0 = bo_soliton(g.x, 0.0, C, L)
    runs = {}
    for scheme in ("preissmann", "euler-box"):
        stepper = make_stepper(scheme, u0, BO, g, 1e-2)
        for _ in range(50):
            stepper.advance()
        runs[scheme] = stepper.state.u
    assert np.max(np.abs(runs["preissmann"] - runs["euler-box"])) <= 2e-2 * bo_soliton_peak(C, L)


# -----------------------------
# TVM
# -----------------------------


def test_tvm_requirements():
    with pytest.raises(ParityError):
        tvm_step(np.zeros(63), BO, make_grid(L, 63), 1e-2)
    with pytest.raises(ConfigError):
        tvm_step(np.zeros(64), MIXED, make_grid(L, 64), 1e-2)


def test_tvm_zero_and_conservation():
    g = make_grid(L, 64)
    np.testing.assert_array_equal(tvm_step(np.zeros(64), BO, g, 1e-2), 0.0)
    u0 = bo_soliton(g.x, 0.0, C, L)
    u1 = tvm_step(u0, BO, g, 2.5e-3, NewtonSettings(tol=TOL))
    assert np.max(np.abs(tvm_residual(u1, u0, BO, g, 2.5e-3))) <= TOL
    assert abs(np.sum(u1**2) - np.sum(u0**2)) <= 10 * TOL
    assert abs(np.sum(u1) - np.sum(u0)) <= 10 * TOL


def test_tvm_jacobian_matches_finite_differences():
    g = make_grid(L, 16)
    rng = np.random.default_rng(3)
    u0 = rng.standard_normal(16)
    y = u0 + 0.1 * rng.standard_normal(16)
    p = Params(alpha=0.8, beta=0.0, gamma=0.0, lam=1.3)
    J = tvm_jacobian(y, u0, p, g, 0.01)
    J_fd = finite_difference_jacobian(lambda v: tvm_residual(v, u0, p, g, 0.01), y)
    np.testing.assert_allclose(J, J_fd, atol=1e-6)


def test_stepper_time_bookkeeping():
    g = make_grid(L, 32)
    stepper = make_stepper("rk4", _smooth(g), BO, g, 0.01, t0=1.5)
    for _ in range(3):
        state = stepper.advance()
    assert state.step == 3
    assert state.t == pytest.approx(1.53)
    with pytest.raises(ConfigError):
        make_stepper("midpoint", _smooth(g), BO, g, 0.01)


# -----------------------------
# Acceptance-scale runs
# -----------------------------


def _soliton_error(scheme, N, dt, t_end=10.0):
    g = make_grid(L, N)
    stepper = make_stepper(scheme, bo_soliton(g.x, 0.0, C, L), BO, g, dt, NewtonSettings(tol=TOL))
    for _ in range(int(round(t_end / dt))):
        stepper.advance()
    return error_norms(stepper.state.u, bo_soliton(g.x, t_end, C, L), g)[0], stepper


@pytest.mark.slow
def test_euler_box_soliton_fidelity_and_mass():
    err, stepper = _soliton_error("euler-box", 255, 2.5e-3)
    assert err <= 0.05 * bo_soliton_peak(C, L)
    finer, _ = _soliton_error("euler-box", 510, 1.25e-3)
    assert 3.0 <= err / finer <= 5.0


@pytest.mark.slow
def test_euler_box_mass_each_parity_class():
    g = make_grid(L, 255)
    u0 = bo_soliton(g.x, 0.0, C, L)
    m0 = np.sum(u0)
    stepper = make_stepper("euler-box", u0, BO, g, 2.5e-3)
    worst = 0.0
    for _ in range(10_000):
        stepper.advance()
        worst = max(worst, abs(np.sum(stepper.state.u) - m0))
    assert worst <= 1e-10 * abs(m0)


@pytest.mark.slow
def test_tvm_soliton_fidelity():
    err, _ = _soliton_error("tvm", 256, 2.5e-3)
    assert err <= 0.05 * bo_soliton_peak(C, L)
    coarse, _ = _soliton_error("tvm", 128, 5e-3)
    assert 3.0 <= coarse / err <= 5.0


@pytest.mark.slow
def test_tvm_momentum_over_thousand_steps():
    g = make_grid(L, 256)
    u0 = bo_soliton(g.x, 0.0, C, L)
    stepper = make_stepper("tvm", u0, BO, g, 2.5e-3, NewtonSettings(tol=TOL))
    q0 = np.sum(u0**2)
    for _ in range(1000):
        stepper.advance()
    assert abs(np.sum(stepper.state.u**2) - q0) <= 10 * TOL * 1000
    assert abs(np.sum(stepper.state.u) - np.sum(u0)) <= 10 * TOL * 1000


@pytest.mark.slow
def test_preissmann_second_order():
    coarse, _ = _soliton_error("preissmann", 63, 2e-2, t_end=1.0)
    fine, _ = _soliton_error("preissmann", 127, 1e-2, t_end=1.0)
    assert 3.0 <= coarse / fine <= 5.0


@pytest.mark.slow
def test_heun_is_unstable_on_soliton():
    g = make_grid(L, 255)
    u0 = bo_soliton(g.x, 0.0, C, L)
    limit = 10 * np.max(np.abs(u0))
    e0 = abs(invariants(u0, BO, g).energy)
    stepper = make_stepper("heun", u0, BO, g, 2.5e-3)
    t_blow = None
    energies = []
    for _ in range(40_000):
        state = stepper.advance()
        if not np.all(np.isfinite(state.u)):
            break
        if t_blow is None and np.max(np.abs(state.u)) > limit:
            t_blow = state.t
        if state.step % 200 == 0:
            energies.append(abs(invariants(state.u, BO, g).energy))
            if t_blow is not None and energies[-1] > 1e3 * e0:
                break
    assert t_blow is not None and t_blow <= 100.0
    assert stepper.state.t <= 100.0
    assert energies[-1] > 1e3 * e0

    # once the unstable mode dominates, |E| only grows
    energies = np.asarray(energies)
    onset = int(np.argmax(energies > 10 * e0))
    assert energies[onset] > 10 * e0
    growth = energies[onset:]
    assert growth.size >= 2
    assert np.all(np.diff(growth) > 0)
