"""Differential diagnostics of integrated geodesics.

Curvature of the planar projection (finite differences vs the closed form
|cot(gamma/2)|), the energy functional in both of its equivalent forms, the
discrete no-skid residual, and the tangent decomposition exhibiting the
phase factor sin(gamma/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .flow import GeodesicCurve, pendulum_path

# Tolerance the finite-difference curvature is expected to meet on non-cusp
# samples; the cusp threshold below is derived from it.
CURVATURE_IDENTITY_TOL = 1e-4

# Fraction of sqrt(E) below which a planar speed always counts as a cusp.
CUSP_SPEED_FLOOR = 1e-8


def cusp_speed_threshold(energy: float, dt: float, ktol: float = CURVATURE_IDENTITY_TOL) -> float:
    """Planar speed below which finite-difference curvature is unreliable.

    The FD error of k grows like dt^2 * E / u^3 with u = speed/sqrt(E)
    (measured empirically, safety factor 2), so the exclusion fraction is
    (2 dt^2 E / ktol)^(1/3), floored at CUSP_SPEED_FLOOR for exact cusps.
    """
    if energy <= 0.0:
        return 0.0
    frac = (2.0 * dt * dt * energy / ktol) ** (1.0 / 3.0)
    return math.sqrt(energy) * max(CUSP_SPEED_FLOOR, frac)


def curvature_numeric(curve: GeodesicCurve) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample |sigma' x sigma''| / |sigma'|^3 by central differences.

    Returns (k, cusp); k is NaN at the two boundary samples and wherever the
    finite-difference speed falls below the cusp threshold (cusp=True there).
    """
    n = len(curve)
    if n < 5:
        raise ValueError(f"need at least 5 samples, got {n}")
    x, y, dt = curve.x, curve.y, curve.dt

    xd = (x[2:] - x[:-2]) / (2.0 * dt)
    yd = (y[2:] - y[:-2]) / (2.0 * dt)
    xdd = (x[2:] - 2.0 * x[1:-1] + x[:-2]) / dt ** 2
    ydd = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / dt ** 2

    speed = np.hypot(xd, yd)
    cusp = np.zeros(n, dtype=bool)
    cusp[1:-1] = speed <= cusp_speed_threshold(curve.energy_initial, dt)

    k = np.full(n, np.nan)
    ok = ~cusp[1:-1]
    k_interior = np.full(n - 2, np.nan)
    k_interior[ok] = np.abs(xd[ok] * ydd[ok] - yd[ok] * xdd[ok]) / speed[ok] ** 3
    k[1:-1] = k_interior
    return k, cusp


def curvature_formula(curve: GeodesicCurve) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample |cot(gamma/2)| from the pendulum angle.

    Returns (k, cusp); cusp marks samples whose planar speed |p1| is below
    the same threshold used by curvature_numeric (|cot| diverges there, and
    k is +inf at exact zeros of sin(gamma/2)).
    """
    gamma, _ = pendulum_path(curve)
    half = 0.5 * gamma
    with np.errstate(divide="ignore"):
        k = np.abs(np.cos(half) / np.sin(half))
    cusp = np.abs(curve.p1) <= cusp_speed_threshold(curve.energy_initial, curve.dt)
    return k, cusp


def horizontality_residuals(curve: GeodesicCurve) -> np.ndarray:
    """|eta(v)| per consecutive sample pair, v the forward-difference velocity.

    eta is evaluated at the pair's midpoint angle; that makes the residual
    O(dt^2) for horizontal curves.
    """
    x, y, th, dt = curve.x, curve.y, curve.theta, curve.dt
    th_mid = 0.5 * (th[:-1] + th[1:])
    vx = np.diff(x) / dt
    vy = np.diff(y) / dt
    return np.abs(np.cos(th_mid) * vy - np.sin(th_mid) * vx)


@dataclass(frozen=True)
class EnergyFunctional:
    """The two evaluation forms of the energy functional and their gap."""

    exact: float        # E * T, E conserved
    quadrature: float   # trapezoid of E sin^2(gamma/2) (1 + k^2)
    difference: float


def energy_functional(curve: GeodesicCurve) -> EnergyFunctional:
    """Evaluate int E dt both exactly and through the curvature integrand.

    The integrand E sin^2(gamma/2) (1 + cot^2(gamma/2)) collapses to E by
    sin^2 + cos^2 = 1; at exact cusp samples (sin(gamma/2) = 0) the direct
    product would be 0 * inf, so the collapsed value is used there.
    """
    e0 = curve.energy_initial
    duration = float(curve.t[-1] - curve.t[0])
    exact = e0 * duration

    gamma, _ = pendulum_path(curve)
    half = 0.5 * gamma
    s = np.sin(half)
    c = np.cos(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = e0 * s ** 2 * (1.0 + (c / s) ** 2)
    integrand = np.where(s == 0.0, e0, integrand)

    quad = float(np.trapezoid(integrand, curve.t))
    return EnergyFunctional(exact=exact, quadrature=quad, difference=abs(exact - quad))


@dataclass(frozen=True)
class PhaseFactorReport:
    """Tangent decomposition velocity = c1 * X1 + c2 * X2 along the frame
    X1 = (cos th, sin th, 0), X2 = (0, 0, 1).

    c1 = sqrt(E) sin(gamma/2) carries the phase factor; c2/c1 is the signed
    cotangent whose absolute value is the projection curvature.  degenerate
    marks fiber-rotation samples (c1 ~ 0) where the (X1 + k X2) form of the
    decomposition is undefined.
    """

    sin_half_gamma: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    reconstruction_error: np.ndarray
    degenerate: np.ndarray


def phase_factor_report(curve: GeodesicCurve) -> PhaseFactorReport:
    """Verify velocity = sqrt(E) sin(gamma/2) X1 + sqrt(E) cos(gamma/2) X2 per sample."""
    gamma, _ = pendulum_path(curve)
    half = 0.5 * gamma
    s = np.sin(half)
    root_e = np.hypot(curve.p1, curve.p2)
    c1 = root_e * s
    c2 = root_e * np.cos(half)

    # analytic velocity from the stored state
    cth, sth = np.cos(curve.theta), np.sin(curve.theta)
    xdot, ydot, thdot = curve.p1 * cth, curve.p1 * sth, curve.p2
    err = np.maximum.reduce(
        [
            np.abs(xdot - c1 * cth),
            np.abs(ydot - c1 * sth),
            np.abs(thdot - c2),
        ]
    )
    degenerate = np.abs(s) <= 1e-12
    return PhaseFactorReport(s, c1, c2, err, degenerate)


@dataclass(frozen=True)
class CurveReport:
    """Per-sample diagnostics plus the aggregates recomputable from them."""

    t: np.ndarray
    k_sigma: np.ndarray           # finite-difference curvature, NaN at ends/cusps
    k_formula: np.ndarray         # |cot(gamma/2)|
    cusp: np.ndarray              # combined cusp mask
    eta_residual: np.ndarray      # per consecutive pair, length n-1
    phase: PhaseFactorReport
    energy: EnergyFunctional
    max_eta_residual: float
    max_curvature_mismatch: float
    curvature_samples_compared: int
    energy_drift: float

    def to_dict(self) -> dict:
        """JSON-ready document."""
        return {
            "aggregates": {
                "energy_functional_exact": self.energy.exact,
                "energy_functional_quadrature": self.energy.quadrature,
                "energy_functional_difference": self.energy.difference,
                "max_eta_residual": self.max_eta_residual,
                "max_curvature_mismatch": self.max_curvature_mismatch,
                "curvature_samples_compared": self.curvature_samples_compared,
                "energy_drift": self.energy_drift,
                "max_phase_reconstruction_error": float(
                    np.max(self.phase.reconstruction_error)
                ),
            },
            "samples": {
                "t": self.t.tolist(),
                "k_sigma": self.k_sigma.tolist(),
                "k_formula": self.k_formula.tolist(),
                "cusp": [bool(b) for b in self.cusp],
                "sin_half_gamma": self.phase.sin_half_gamma.tolist(),
                "tangent_c1": self.phase.c1.tolist(),
                "tangent_c2": self.phase.c2.tolist(),
                "phase_degenerate": [bool(b) for b in self.phase.degenerate],
            },
            "pairs": {
                "eta_residual": self.eta_residual.tolist(),
            },
        }


def analyze_curve(curve: GeodesicCurve) -> CurveReport:
    """Full diagnostic report for one integrated curve."""
    k_num, cusp_num = curvature_numeric(curve)
    k_form, cusp_form = curvature_formula(curve)
    cusp = cusp_num | cusp_form
    eta = horizontality_residuals(curve)

    both = np.isfinite(k_num) & np.isfinite(k_form) & ~cusp
    mismatch = float(np.max(np.abs(k_num[both] - k_form[both]))) if both.any() else 0.0

    return CurveReport(
        t=curve.t,
        k_sigma=k_num,
        k_formula=k_form,
        cusp=cusp,
        eta_residual=eta,
        phase=phase_factor_report(curve),
        energy=energy_functional(curve),
        max_eta_residual=float(np.max(eta)),
        max_curvature_mismatch=mismatch,
        curvature_samples_compared=int(both.sum()),
        energy_drift=curve.energy_drift,
    )
