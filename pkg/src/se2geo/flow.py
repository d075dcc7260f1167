"""Hamiltonian geodesic flow on SE(2).

The sub-Riemannian Hamiltonian is H = (p1^2 + p2^2)/2 in the reduced
momenta; its flow is integrated with fixed-step classical RK4.  E = p1^2 +
p2^2 is conserved, and the substitution p1 = sqrt(E) sin(gamma/2),
p2 = sqrt(E) cos(gamma/2), p3 = gamma_dot/2 reduces the momentum equations
to the pendulum gamma'' + E sin(gamma) = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .se2 import ConfigPoint, MomentumFrame, PhasePoint, to_momentum_frame

# Drift in p1^2 + p2^2 beyond this (relative to max(1, E0)) marks the curve
# with a diagnostic warning; it never aborts the integration.
ENERGY_DRIFT_WARN = 1e-6


class NonFiniteStateError(RuntimeError):
    """A state component became non-finite (dt too large for the given energy)."""


class ZeroEnergyError(ValueError):
    """p1^2 + p2^2 = 0: the pendulum angle gamma is undefined."""


@dataclass(frozen=True)
class FlowState:
    """Instantaneous state of the reduced flow: pose, reduced momenta, time."""

    q: ConfigPoint
    mf: MomentumFrame
    t: float = 0.0

    @property
    def energy(self) -> float:
        """E = p1^2 + p2^2 (twice the Hamiltonian)."""
        return self.mf.p1 ** 2 + self.mf.p2 ** 2


@dataclass(frozen=True)
class PendulumState:
    """Pendulum reduction variables; gamma is a plain real (not reduced mod 2*pi)."""

    gamma: float
    gamma_dot: float

    def energy(self, E: float) -> float:
        """Pendulum energy (1/2) gamma_dot^2 - E cos(gamma), conserved along the flow."""
        return 0.5 * self.gamma_dot ** 2 - E * math.cos(self.gamma)


@dataclass(frozen=True)
class GeodesicCurve:
    """A time-sampled geodesic.

    ``samples`` has one row per time step with columns
    (t, x, y, theta, p1, p2, p3).  theta is kept continuous along the curve
    (not wrapped); poses returned by :meth:`endpoint` are normalized.
    """

    samples: np.ndarray
    energy_initial: float
    dt: float
    integrator_name: str
    energy_drift: float
    warnings: tuple[str, ...]

    @classmethod
    def from_samples(cls, samples: np.ndarray, dt: float, integrator_name: str) -> "GeodesicCurve":
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 7 or samples.shape[0] < 1:
            raise ValueError(f"curve samples must be (n, 7), got {samples.shape}")
        gaps = np.diff(samples[:, 0])
        bad = np.nonzero(np.abs(gaps - dt) > 1e-12)[0]
        if bad.size:
            i = int(bad[0])
            raise ValueError(
                f"non-uniform time step at sample {i + 1}: "
                f"t[{i + 1}] - t[{i}] = {float(gaps[i])!r}, expected dt = {dt!r}"
            )
        e = samples[:, 4] ** 2 + samples[:, 5] ** 2
        e0 = float(e[0])
        drift = float(np.max(np.abs(e - e0)))
        warnings = ()
        if drift > ENERGY_DRIFT_WARN * max(1.0, e0):
            warnings = (f"energy drift {drift:.3e} exceeds {ENERGY_DRIFT_WARN:.0e} * max(1, E0)",)
        samples.setflags(write=False)
        return cls(samples, e0, float(dt), integrator_name, drift, warnings)

    @property
    def t(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def y(self) -> np.ndarray:
        return self.samples[:, 2]

    @property
    def theta(self) -> np.ndarray:
        return self.samples[:, 3]

    @property
    def p1(self) -> np.ndarray:
        return self.samples[:, 4]

    @property
    def p2(self) -> np.ndarray:
        return self.samples[:, 5]

    @property
    def p3(self) -> np.ndarray:
        return self.samples[:, 6]

    def __len__(self) -> int:
        return self.samples.shape[0]

    def pose(self, i: int) -> ConfigPoint:
        row = self.samples[i]
        return ConfigPoint(row[1], row[2], row[3])

    def start_pose(self) -> ConfigPoint:
        return self.pose(0)

    def endpoint(self) -> ConfigPoint:
        return self.pose(-1)

    def momentum(self, i: int) -> MomentumFrame:
        row = self.samples[i]
        return MomentumFrame(row[4], row[5], row[6])


def hamiltonian(p: PhasePoint) -> float:
    """H = ((cos th p_x + sin th p_y)^2 + p_theta^2) / 2; nonnegative."""
    mf = to_momentum_frame(p)
    return 0.5 * (mf.p1 ** 2 + mf.p2 ** 2)


def hamilton_rhs_reduced(s: FlowState) -> tuple[float, float, float, float, float, float]:
    """Time derivatives (x, y, theta, p1, p2, p3) of the reduced flow."""
    th = s.q.theta
    p1, p2, p3 = s.mf.p1, s.mf.p2, s.mf.p3
    return (math.cos(th) * p1, math.sin(th) * p1, p2, p3 * p2, -p3 * p1, -p1 * p2)


def hamilton_rhs_canonical(p: PhasePoint) -> tuple[float, float, float, float, float, float]:
    """Time derivatives (x, y, theta, p_x, p_y, p_theta) of the canonical flow.

    H does not depend on x, y, so p_x and p_y are conserved;
    p_theta' = -dH/dtheta = -p1 * p3.
    """
    th = p.q.theta
    c, s = math.cos(th), math.sin(th)
    p1 = c * p.p_x + s * p.p_y
    p3 = -s * p.p_x + c * p.p_y
    return (p1 * c, p1 * s, p.p_theta, 0.0, 0.0, -p1 * p3)


def _step_count(t0: float, t_final: float, dt: float) -> int:
    duration = t_final - t0
    if not duration > 0.0:
        raise ValueError(f"t_final = {t_final!r} must exceed start time {t0!r}")
    if not 0.0 < dt <= duration * (1.0 + 1e-12):
        raise ValueError(f"dt = {dt!r} must lie in (0, t_final - t0]")
    return max(1, int(round(duration / dt)))


def integrate(start: FlowState, t_final: float, dt: float) -> GeodesicCurve:
    """Integrate the reduced Hamilton equations with classical RK4 at fixed step dt.

    Samples every step; the last sample time equals t_final to within dt.
    Raises NonFiniteStateError if the state blows up.
    """
    n = _step_count(start.t, t_final, dt)
    e0 = start.energy
    if not math.isfinite(e0):
        raise ValueError("initial energy must be finite")

    out = np.empty((n + 1, 7), dtype=float)
    t0 = start.t
    x, y, th = start.q.x, start.q.y, start.q.theta
    p1, p2, p3 = start.mf.p1, start.mf.p2, start.mf.p3
    out[0] = (t0, x, y, th, p1, p2, p3)

    cos, sin = math.cos, math.sin
    h2, h6 = 0.5 * dt, dt / 6.0
    for i in range(1, n + 1):
        try:
            c = cos(th)
            s = sin(th)
            a0, a1, a2 = c * p1, s * p1, p2
            a3, a4, a5 = p3 * p2, -p3 * p1, -p1 * p2

            tth, tp1, tp2, tp3 = th + h2 * a2, p1 + h2 * a3, p2 + h2 * a4, p3 + h2 * a5
            c = cos(tth)
            s = sin(tth)
            b0, b1, b2 = c * tp1, s * tp1, tp2
            b3, b4, b5 = tp3 * tp2, -tp3 * tp1, -tp1 * tp2

            tth, tp1, tp2, tp3 = th + h2 * b2, p1 + h2 * b3, p2 + h2 * b4, p3 + h2 * b5
            c = cos(tth)
            s = sin(tth)
            c0, c1, c2 = c * tp1, s * tp1, tp2
            c3, c4, c5 = tp3 * tp2, -tp3 * tp1, -tp1 * tp2

            tth, tp1, tp2, tp3 = th + dt * c2, p1 + dt * c3, p2 + dt * c4, p3 + dt * c5
            c = cos(tth)
            s = sin(tth)
            d0, d1, d2 = c * tp1, s * tp1, tp2
            d3, d4, d5 = tp3 * tp2, -tp3 * tp1, -tp1 * tp2

            x += h6 * (a0 + 2.0 * (b0 + c0) + d0)
            y += h6 * (a1 + 2.0 * (b1 + c1) + d1)
            th += h6 * (a2 + 2.0 * (b2 + c2) + d2)
            p1 += h6 * (a3 + 2.0 * (b3 + c3) + d3)
            p2 += h6 * (a4 + 2.0 * (b4 + c4) + d4)
            p3 += h6 * (a5 + 2.0 * (b5 + c5) + d5)
            finite = (
                math.isfinite(x)
                and math.isfinite(y)
                and math.isfinite(th)
                and math.isfinite(p1)
                and math.isfinite(p2)
                and math.isfinite(p3)
            )
        except (ValueError, OverflowError):  # cos/sin of an overflowed angle
            finite = False
        if not finite:
            raise NonFiniteStateError(
                f"state became non-finite at t = {t0 + i * dt:.6g} (dt too large for E = {e0:.6g}?)"
            )
        out[i] = (t0 + i * dt, x, y, th, p1, p2, p3)

    return GeodesicCurve.from_samples(out, dt, "rk4")


def integrate_canonical(start: PhasePoint, t_final: float, dt: float) -> np.ndarray:
    """RK4 on the canonical equations; cross-check path for the reduced integrator.

    Returns raw samples (t, x, y, theta, p_x, p_y, p_theta), one row per step.
    """
    n = _step_count(0.0, t_final, dt)
    out = np.empty((n + 1, 7), dtype=float)
    state = np.array(
        [start.q.x, start.q.y, start.q.theta, start.p_x, start.p_y, start.p_theta]
    )

    def rhs(v: np.ndarray) -> np.ndarray:
        c, s = math.cos(v[2]), math.sin(v[2])
        p1 = c * v[3] + s * v[4]
        p3 = -s * v[3] + c * v[4]
        return np.array([p1 * c, p1 * s, v[5], 0.0, 0.0, -p1 * p3])

    out[0, 0] = 0.0
    out[0, 1:] = state
    for i in range(1, n + 1):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * dt * k1)
        k3 = rhs(state + 0.5 * dt * k2)
        k4 = rhs(state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)):
            raise NonFiniteStateError(f"state became non-finite at t = {i * dt:.6g}")
        out[i, 0] = i * dt
        out[i, 1:] = state
    return out


def to_pendulum(mf: MomentumFrame) -> PendulumState:
    """Pendulum variables of a momentum frame: gamma = 2 atan2(p1, p2), gamma_dot = 2 p3."""
    if mf.p1 ** 2 + mf.p2 ** 2 == 0.0:
        raise ZeroEnergyError("gamma undefined: p1 = p2 = 0")
    return PendulumState(gamma=2.0 * math.atan2(mf.p1, mf.p2), gamma_dot=2.0 * mf.p3)


def from_pendulum(ps: PendulumState, E: float) -> MomentumFrame:
    """Momentum frame of pendulum variables at energy E >= 0."""
    if E < 0.0:
        raise ValueError(f"E must be nonnegative, got {E!r}")
    root = math.sqrt(E)
    half = 0.5 * ps.gamma
    return MomentumFrame(
        p1=root * math.sin(half),
        p2=root * math.cos(half),
        p3=0.5 * ps.gamma_dot,
    )


def pendulum_path(curve: GeodesicCurve) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample (gamma, gamma_dot) along a curve, with gamma unwrapped continuously."""
    if curve.energy_initial == 0.0:
        raise ZeroEnergyError("gamma undefined along a zero-energy curve")
    half = np.unwrap(np.arctan2(curve.p1, curve.p2))
    return 2.0 * half, 2.0 * curve.p3
