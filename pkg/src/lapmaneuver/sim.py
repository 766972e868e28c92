"""Closed-loop integration of p' = -K L~ p and trajectory metrics.

Two integration paths: a fixed-step 4th-order Runge-Kutta scheme, and an
exact propagator built from the matrix exponential (affine-augmented per
heading-control segment). The exact path doubles as the validation oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .errors import Diverged, NotConverged, ZeroState
from .shapes import ReferenceShape


@dataclass(frozen=True)
class HeadingControl:
    """Proportional term -c (z_ij - z*_ij(t)) added to one agent's input.

    schedule is a sequence of (until, setpoint) pairs; the last setpoint
    holds to the end of the run.
    """

    agent: int
    neighbor: int
    gain: float
    schedule: tuple[tuple[float, complex], ...]

    def __post_init__(self):
        if self.gain <= 0:
            raise ValueError("heading gain must be positive")
        if not self.schedule:
            raise ValueError("heading schedule is empty")

    def setpoint_at(self, t: float) -> complex:
        for until, z in self.schedule:
            if t < until:
                return z
        return self.schedule[-1][1]

    def boundaries(self, t_end: float) -> list[tuple[float, float, complex]]:
        """Segments (t0, t1, setpoint) covering [0, t_end]."""
        segs = []
        t0 = 0.0
        for until, z in self.schedule:
            t1 = min(until, t_end)
            if t1 > t0:
                segs.append((t0, t1, z))
                t0 = t1
        if t0 < t_end:
            segs.append((t0, t_end, self.schedule[-1][1]))
        return segs


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_end: float = 10.0
    p0: Optional[np.ndarray] = None
    seed: int = 0
    box_factor: float = 2.0  # random-box half width as multiple of shape radius
    divergence_threshold: float = 1e9
    sample_stride: int = 1
    heading: Optional[HeadingControl] = None

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (samples, n) complex

    def __post_init__(self):
        if self.states.shape[0] != self.times.size:
            raise ValueError("times and states disagree in length")

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def window(self, t_from: float, t_to: float) -> slice:
        i0 = int(np.searchsorted(self.times, t_from, side="left"))
        i1 = int(np.searchsorted(self.times, t_to, side="right"))
        return slice(i0, i1)


def initial_condition(cfg: SimConfig, shape: ReferenceShape) -> np.ndarray:
    if cfg.p0 is not None:
        p0 = np.asarray(cfg.p0, dtype=complex)
        if p0.size != shape.n:
            raise ValueError("initial condition size mismatch")
        return p0
    rng = np.random.default_rng(cfg.seed)
    hw = cfg.box_factor * shape.radius()
    return rng.uniform(-hw, hw, shape.n) + 1j * rng.uniform(-hw, hw, shape.n)


def integrate(L_tilde: np.ndarray, gains: np.ndarray, cfg: SimConfig,
              shape: ReferenceShape) -> Trajectory:
    """Fixed-step RK4 integration of p' = -K L~ p plus the heading term.

    The heading setpoint is sampled once per step (zero-order hold), so
    steps never straddle two schedule segments.
    """
    A = -np.diag(gains) @ L_tilde
    p = initial_condition(cfg, shape)
    h = cfg.heading

    def f(x, setpoint):
        out = A @ x
        if h is not None:
            z = x[h.agent - 1] - x[h.neighbor - 1]
            out[h.agent - 1] -= h.gain * (z - setpoint)
        return out

    steps = int(round(cfg.t_end / cfg.dt))
    times = [0.0]
    samples = [p.copy()]
    dt = cfg.dt
    for k in range(steps):
        t = k * dt
        zs = h.setpoint_at(t) if h is not None else 0j
        k1 = f(p, zs)
        k2 = f(p + dt / 2 * k1, zs)
        k3 = f(p + dt / 2 * k2, zs)
        k4 = f(p + dt * k3, zs)
        p = p + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(p.view(float))) \
                or np.abs(p).max() > cfg.divergence_threshold:
            raise Diverged(f"state norm exceeded threshold at t={t + dt:.3f}")
        if (k + 1) % cfg.sample_stride == 0 or k == steps - 1:
            times.append((k + 1) * dt)
            samples.append(p.copy())
    return Trajectory(np.array(times), np.array(samples))


def exact_trajectory(L_tilde: np.ndarray, gains: np.ndarray, cfg: SimConfig,
                     shape: ReferenceShape) -> Trajectory:
    """Exact solution sampled on the same grid as `integrate`.

    Homogeneous runs step with expm(A dt); heading-control runs use the
    affine-augmented exponential per constant-setpoint segment.
    """
    n = L_tilde.shape[0]
    A = -np.diag(gains) @ L_tilde
    p = initial_condition(cfg, shape)
    steps = int(round(cfg.t_end / cfg.dt))
    dt = cfg.dt

    if cfg.heading is None:
        segs = [(0.0, cfg.t_end, None)]
    else:
        segs = cfg.heading.boundaries(cfg.t_end)

    times = [0.0]
    samples = [p.copy()]
    k = 0
    for t0, t1, z in segs:
        X = np.zeros((n + 1, n + 1), dtype=complex)
        X[:n, :n] = A
        if z is not None:
            h = cfg.heading
            X[h.agent - 1, h.agent - 1] -= h.gain
            X[h.agent - 1, h.neighbor - 1] += h.gain
            X[h.agent - 1, n] = h.gain * z
        Phi = expm(X * dt)
        F, b = Phi[:n, :n], Phi[:n, n]
        nseg = int(round((t1 - t0) / dt))
        for _ in range(nseg):
            p = F @ p + b
            k += 1
            if (k % cfg.sample_stride == 0) or k == steps:
                times.append(k * dt)
                samples.append(p.copy())
    return Trajectory(np.array(times), np.array(samples))


def shape_projector(shape: ReferenceShape) -> np.ndarray:
    """Orthogonal projector onto span{1, p*}."""
    basis = np.column_stack([np.ones(shape.n, dtype=complex), shape.p_star])
    q, _ = np.linalg.qr(basis)
    return q @ q.conj().T


def shape_error(p: np.ndarray, shape: ReferenceShape) -> float:
    """Relative distance of the configuration from the desired shape space."""
    p = np.asarray(p, dtype=complex)
    norm = np.linalg.norm(p)
    if norm == 0:
        raise ZeroState("shape error undefined for the zero configuration")
    P = shape_projector(shape)
    return float(np.linalg.norm(p - P @ p) / norm)


def shape_error_series(traj: Trajectory, shape: ReferenceShape) -> np.ndarray:
    P = shape_projector(shape)
    states = traj.states
    norms = np.linalg.norm(states, axis=1)
    resid = np.linalg.norm(states - states @ P.T, axis=1)
    return resid / norms


@dataclass(frozen=True)
class MotionEstimate:
    omega_hat: float
    a_hat: float
    v_hat: complex


def measure_motion(traj: Trajectory, shape: ReferenceShape,
                   window: slice) -> MotionEstimate:
    """Estimate angular speed, scaling rate and centroid velocity over a
    steady-state window by least-squares slopes."""
    t = traj.times[window]
    states = traj.states[window]
    if t.size < 3:
        raise ValueError("window too short")
    errs = shape_error_series(Trajectory(t, states), shape)
    if errs.max() > 1e-4:
        raise NotConverged(
            f"shape error {errs.max():.2e} in window; steady state not reached")
    centroid = states.mean(axis=1)
    rel = states - centroid[:, None]

    angles = np.unwrap(np.angle(rel), axis=0)
    slopes = np.polyfit(t, angles, 1)[0]
    omega_hat = float(slopes.mean())

    radius = np.log(np.linalg.norm(rel, axis=1))
    a_hat = float(np.polyfit(t, radius, 1)[0])

    v_re = np.polyfit(t, centroid.real, 1)[0]
    v_im = np.polyfit(t, centroid.imag, 1)[0]
    return MotionEstimate(omega_hat, a_hat, complex(v_re + 1j * v_im))
