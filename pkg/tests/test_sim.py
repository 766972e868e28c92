import numpy as np
import pytest
import scipy.linalg

from lapmaneuver import (Diverged, HeadingControl, MotionSpec, NotConverged,
                         SimConfig, ZeroState, design_pipeline,
                         exact_trajectory, initial_condition, integrate,
                         measure_motion, shape_error, shape_error_series)

from conftest import square_graph, square_shape


def _design(spec, seed=0):
    return design_pipeline(square_graph(), square_shape(), spec, seed=seed)


def test_zero_dynamics_constant(square):
    _, shape = square
    L0 = np.zeros((4, 4), dtype=complex)
    cfg = SimConfig(dt=0.01, t_end=1.0, seed=3)
    traj = integrate(L0, np.ones(4, dtype=complex), cfg, shape)
    assert np.abs(traj.states - traj.states[0]).max() == 0


def test_static_design_converges(square):
    _, shape = square
    d = _design(MotionSpec())
    cfg = SimConfig(dt=0.01, t_end=20.0, seed=1)
    traj = integrate(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    errs = shape_error_series(traj, shape)
    assert errs[-1] < 1e-10
    # the formation stops: velocity vanishes
    vel = -d.KL_tilde @ traj.states[-1]
    assert np.abs(vel).max() < 1e-10


def test_rotation_orbit_matches_expm(square):
    _, shape = square
    d = _design(MotionSpec(omega=1.0, kappa_r=0.025))
    cfg = SimConfig(dt=1e-3, t_end=5.0, p0=shape.p_star)
    traj = integrate(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    A = -d.KL_tilde
    for k in (1000, 5000):
        t = traj.times[k]
        exact = scipy.linalg.expm(A * t) @ shape.p_star
        assert np.abs(traj.states[k] - exact).max() < 1e-6
        # pure orbit: p(t) = p* e^{i 0.025 t}
        assert np.abs(exact - shape.p_star * np.exp(0.025j * t)).max() < 1e-10


def test_rk4_vs_exact_oracle(square):
    _, shape = square
    d = _design(MotionSpec(a=-0.5, omega=1.0, kappa_r=0.025, kappa_s=0.025))
    cfg = SimConfig(dt=1e-3, t_end=10.0, seed=5)
    rk = integrate(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    ex = exact_trajectory(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    scale = np.abs(ex.states).max()
    assert np.abs(rk.states - ex.states).max() / scale < 1e-6


def test_heading_control_piecewise_oracle(square):
    _, shape = square
    d = _design(MotionSpec(v_star=1.0, kappa_t=0.05))
    z0 = shape.edge_vector(1, 2)
    heading = HeadingControl(agent=1, neighbor=2, gain=1.0,
                             schedule=((5.0, z0), (10.0, 1j * z0)))
    cfg = SimConfig(dt=1e-3, t_end=10.0, seed=2, heading=heading)
    rk = integrate(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    ex = exact_trajectory(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    scale = np.abs(ex.states).max()
    assert np.abs(rk.states - ex.states).max() / scale < 1e-6


def test_divergence_detected(square):
    _, shape = square
    # unstable dynamics: negated Laplacian pushes the non-kernel modes out
    d = _design(MotionSpec())
    cfg = SimConfig(dt=0.01, t_end=100.0, seed=1, divergence_threshold=1e3)
    with pytest.raises(Diverged):
        integrate(-d.modified.L_tilde, d.bundle.gains, cfg, shape)


def test_deterministic_for_seed(square):
    _, shape = square
    d = _design(MotionSpec(omega=1.0, kappa_r=0.025))
    cfg = SimConfig(dt=0.01, t_end=1.0, seed=11)
    a = integrate(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    b = integrate(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    assert np.array_equal(a.states, b.states)


def test_initial_condition_box(square):
    _, shape = square
    cfg = SimConfig(dt=0.01, t_end=1.0, seed=4, box_factor=2.0)
    p0 = initial_condition(cfg, shape)
    hw = 2.0 * shape.radius()
    assert np.abs(p0.real).max() <= hw and np.abs(p0.imag).max() <= hw


def test_shape_error_in_space(square):
    _, shape = square
    p = 3 * shape.p_star + (2 + 1j) * np.ones(4)
    assert shape_error(p, shape) < 1e-14


def test_shape_error_orthogonal(square):
    _, shape = square
    basis = np.column_stack([np.ones(4), shape.p_star])
    q, _ = np.linalg.qr(basis)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    v = v - q @ (q.conj().T @ v)
    assert shape_error(v, shape) == pytest.approx(1.0, abs=1e-12)


def test_shape_error_least_squares_oracle(square):
    _, shape = square
    rng = np.random.default_rng(1)
    basis = np.column_stack([np.ones(4), shape.p_star])
    for _ in range(20):
        p = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        coef, *_ = np.linalg.lstsq(basis, p, rcond=None)
        expected = np.linalg.norm(p - basis @ coef) / np.linalg.norm(p)
        assert abs(shape_error(p, shape) - expected) < 1e-12


def test_shape_error_zero_state(square):
    _, shape = square
    with pytest.raises(ZeroState):
        shape_error(np.zeros(4), shape)


def test_measure_rotation(square):
    _, shape = square
    d = _design(MotionSpec(omega=1.0, kappa_r=0.025))
    cfg = SimConfig(dt=0.01, t_end=100.0, seed=8, sample_stride=10)
    traj = exact_trajectory(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    est = measure_motion(traj, shape, traj.window(50.0, 100.0))
    assert est.omega_hat == pytest.approx(0.025, rel=1e-6)
    assert abs(est.a_hat) < 1e-8


def test_measure_translation_uniform(square):
    _, shape = square
    d = _design(MotionSpec(v_star=1.0, kappa_t=0.05))
    cfg = SimConfig(dt=0.01, t_end=200.0, seed=8, sample_stride=10)
    traj = exact_trajectory(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    est = measure_motion(traj, shape, traj.window(100.0, 200.0))
    assert abs(est.omega_hat) < 1e-8
    assert abs(est.a_hat) < 1e-8
    vel = -d.KL_tilde @ traj.states[-1]
    assert np.abs(vel - est.v_hat).max() < 1e-6 * abs(est.v_hat)


def test_measure_requires_steady_state(square):
    _, shape = square
    d = _design(MotionSpec(omega=1.0, kappa_r=0.025))
    cfg = SimConfig(dt=0.01, t_end=2.0, seed=8)
    traj = exact_trajectory(d.modified.L_tilde, d.bundle.gains, cfg, shape)
    with pytest.raises(NotConverged):
        measure_motion(traj, shape, traj.window(0.0, 1.0))
