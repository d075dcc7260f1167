"""Contact and frame algebra of SE(2) = R^2 x S^1.

Left-invariant frame {X, Y, Z} with X = d/dtheta, Y = cos(theta) d/dx +
sin(theta) d/dy, Z = -sin(theta) d/dx + cos(theta) d/dy (the Reeb field of
the contact form eta = cos(theta) dy - sin(theta) dx), plus conversions
between canonical covector components and the reduced momenta along the
frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TAU = 2.0 * math.pi


def angle_wrap(a: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    r = math.fmod(a, TAU)
    if r < 0.0:
        r += TAU
    if r >= TAU:  # fmod of tiny negatives can round up to TAU
        r = 0.0
    return r


def angle_diff(a: float, b: float) -> float:
    """Signed circular difference a - b, wrapped to (-pi, pi]."""
    d = math.fmod(a - b, TAU)
    if d <= -math.pi:
        d += TAU
    elif d > math.pi:
        d -= TAU
    return d


def angle_dist(a: float, b: float) -> float:
    """Geodesic distance on the circle, in [0, pi]."""
    return abs(angle_diff(a, b))


@dataclass(frozen=True)
class ConfigPoint:
    """A pose (x, y, theta); theta is normalized to [0, 2*pi)."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", angle_wrap(float(self.theta)))
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))


@dataclass(frozen=True)
class PhasePoint:
    """Cotangent-bundle point: pose plus canonical momenta (p_x, p_y, p_theta)."""

    q: ConfigPoint
    p_x: float
    p_y: float
    p_theta: float

    def __post_init__(self):
        for name in ("p_x", "p_y", "p_theta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class MomentumFrame:
    """Reduced momenta (p1, p2, p3) along the left-invariant frame.

    p1 pairs with the planar direction (cos theta, sin theta), p2 with
    d/dtheta, p3 with the normal direction.
    """

    p1: float
    p2: float
    p3: float


@dataclass(frozen=True)
class FrameVector:
    """Tangent vector given by its coefficients (a_x, a_y, a_z) on {X, Y, Z} at a base pose."""

    base: ConfigPoint
    a_x: float
    a_y: float
    a_z: float

    def to_coordinates(self) -> tuple[float, float, float]:
        """Components along (d/dx, d/dy, d/dtheta)."""
        X, Y, Z = frame_at(self.base)
        return (
            self.a_x * X[0] + self.a_y * Y[0] + self.a_z * Z[0],
            self.a_x * X[1] + self.a_y * Y[1] + self.a_z * Z[1],
            self.a_x * X[2] + self.a_y * Y[2] + self.a_z * Z[2],
        )

    @classmethod
    def from_coordinates(cls, base: ConfigPoint, v: tuple[float, float, float]) -> "FrameVector":
        """Expand a coordinate-component vector on the frame at ``base``."""
        c, s = math.cos(base.theta), math.sin(base.theta)
        vx, vy, vth = v
        # {X, Y, Z} is orthonormal for the Euclidean pairing of (vx, vy, vth)
        return cls(base, a_x=vth, a_y=c * vx + s * vy, a_z=-s * vx + c * vy)


def frame_at(q: ConfigPoint) -> tuple[tuple[float, float, float], ...]:
    """Frame fields at q as components along (d/dx, d/dy, d/dtheta): returns (X, Y, Z)."""
    c, s = math.cos(q.theta), math.sin(q.theta)
    return (0.0, 0.0, 1.0), (c, s, 0.0), (-s, c, 0.0)


def contact_form_eval(q: ConfigPoint, v: tuple[float, float, float]) -> float:
    """Evaluate eta = cos(theta) dy - sin(theta) dx on the coordinate components v."""
    return math.cos(q.theta) * v[1] - math.sin(q.theta) * v[0]


def to_momentum_frame(p: PhasePoint) -> MomentumFrame:
    """Reduced momenta of a canonical covector: p1 = cos(th) p_x + sin(th) p_y, p2 = p_theta, p3 = -sin(th) p_x + cos(th) p_y."""
    c, s = math.cos(p.q.theta), math.sin(p.q.theta)
    return MomentumFrame(
        p1=c * p.p_x + s * p.p_y,
        p2=p.p_theta,
        p3=-s * p.p_x + c * p.p_y,
    )


def from_momentum_frame(q: ConfigPoint, mf: MomentumFrame) -> PhasePoint:
    """Inverse of to_momentum_frame at the pose q."""
    c, s = math.cos(q.theta), math.sin(q.theta)
    return PhasePoint(
        q=q,
        p_x=c * mf.p1 - s * mf.p3,
        p_y=s * mf.p1 + c * mf.p3,
        p_theta=mf.p2,
    )


def se2_apply(g: tuple[float, float, float], q: ConfigPoint) -> ConfigPoint:
    """Apply the rigid motion g = (a, b, phi) to q: rotate by phi, then translate by (a, b)."""
    a, b, phi = g
    c, s = math.cos(phi), math.sin(phi)
    return ConfigPoint(
        x=a + c * q.x - s * q.y,
        y=b + s * q.x + c * q.y,
        theta=q.theta + phi,
    )
