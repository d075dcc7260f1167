"""Two-point boundary value problem: connect two oriented points by a geodesic.

Multi-start shooting over (sqrt(E), gamma0, gamma_dot0) with the time
horizon fixed to T = 1 (the time-energy scaling of the flow makes a free
horizon redundant).  Refinement is damped least squares with a
finite-difference Jacobian, falling back to Nelder-Mead when the Jacobian
is near singular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .flow import FlowState, GeodesicCurve, PendulumState, from_pendulum, integrate
from .se2 import ConfigPoint, angle_diff, angle_dist

# gamma enters the momenta through gamma/2, so the momentum circle is
# labelled by gamma modulo 4*pi, not 2*pi; gamma0 in [0, 2*pi) gives
# p1(0) >= 0 (initially forward motion).
GAMMA_PERIOD = 4.0 * math.pi

_JACOBIAN_FD_STEP = 1e-6
_SINGULAR_CONDITION = 1e8
_DUPLICATE_TOL = 1e-4
_SQRT_E_MIN = 1e-8


class NoConvergenceError(RuntimeError):
    """No shooting start converged; best non-converged candidates attached."""

    def __init__(self, message: str, candidates: list["BvpSolution"]):
        super().__init__(message)
        self.candidates = candidates


@dataclass(frozen=True)
class ShootingParams:
    """Shooting unknowns: sqrt_e > 0, initial pendulum angle and rate.

    gamma0 is stored modulo 4*pi (values in [2*pi, 4*pi) label initially
    backward motion, p1(0) < 0, and arise only through refinement).
    """

    sqrt_e: float
    gamma0: float
    gamma_dot0: float

    def __post_init__(self):
        if self.sqrt_e < 0.0:
            raise ValueError(f"sqrt_e must be nonnegative, got {self.sqrt_e!r}")
        object.__setattr__(self, "gamma0", float(self.gamma0) % GAMMA_PERIOD)

    @property
    def energy(self) -> float:
        return self.sqrt_e ** 2

    def to_momentum(self):
        return from_pendulum(PendulumState(self.gamma0, self.gamma_dot0), self.energy)


@dataclass(frozen=True)
class BvpSolution:
    """One shooting solution; converged means residual <= the solve tolerance."""

    params: ShootingParams
    curve: GeodesicCurve
    residual: float
    energy: float
    converged: bool


def endpoint_residual(end_actual: ConfigPoint, end_target: ConfigPoint, w_theta: float = 1.0) -> float:
    """sqrt(dx^2 + dy^2 + w_theta^2 * angle_dist^2)."""
    if w_theta <= 0.0:
        raise ValueError(f"w_theta must be positive, got {w_theta!r}")
    return math.sqrt(
        (end_actual.x - end_target.x) ** 2
        + (end_actual.y - end_target.y) ** 2
        + (w_theta * angle_dist(end_actual.theta, end_target.theta)) ** 2
    )


def shoot(start: ConfigPoint, params: ShootingParams, dt: float = 1e-3) -> GeodesicCurve:
    """Integrate the geodesic with the given shooting parameters over t in [0, 1]."""
    return integrate(FlowState(start, params.to_momentum()), 1.0, dt)


def geodesic_fan(
    start: ConfigPoint,
    energy: float,
    gamma0_list: list[float],
    gamma_dot0: float = 0.0,
    t_final: float = 1.0,
    dt: float = 1e-3,
) -> list[GeodesicCurve]:
    """One curve per gamma0, all from the same start at the same energy."""
    if energy <= 0.0:
        raise ValueError(f"energy must be positive, got {energy!r}")
    if not gamma0_list:
        raise ValueError("gamma0_list must be nonempty")
    curves = []
    for g0 in gamma0_list:
        mf = from_pendulum(PendulumState(g0, gamma_dot0), energy)
        curves.append(integrate(FlowState(start, mf), t_final, dt))
    return curves


def _residual_vector(
    start: ConfigPoint, target: ConfigPoint, u: np.ndarray, w_theta: float, dt: float
) -> np.ndarray:
    params = ShootingParams(max(u[0], _SQRT_E_MIN), u[1], u[2])
    end = shoot(start, params, dt).endpoint()
    return np.array(
        [
            end.x - target.x,
            end.y - target.y,
            w_theta * angle_diff(end.theta, target.theta),
        ]
    )


def _refine(
    start: ConfigPoint,
    target: ConfigPoint,
    u0: np.ndarray,
    w_theta: float,
    target_cost: float,
    max_iter: int,
    dt: float,
) -> tuple[np.ndarray, float]:
    """Damped least squares on the endpoint residual.

    Returns the refined unknowns and the residual norm reached at this dt.
    """

    def resvec(u: np.ndarray) -> np.ndarray:
        return _residual_vector(start, target, u, w_theta, dt)

    u = u0.astype(float).copy()
    r = resvec(u)
    cost = float(np.linalg.norm(r))
    lam = 1e-3
    stalled = 0
    for _ in range(max_iter):
        if cost <= target_cost:
            break
        J = np.empty((3, 3))
        for j in range(3):
            du = np.zeros(3)
            du[j] = _JACOBIAN_FD_STEP
            J[:, j] = (resvec(u + du) - r) / _JACOBIAN_FD_STEP
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > _SINGULAR_CONDITION:
            # simplex fallback; Nelder-Mead stops on its own once the simplex collapses
            res = minimize(
                lambda v: float(np.linalg.norm(resvec(v))),
                u,
                method="Nelder-Mead",
                options={"maxiter": 150, "xatol": 1e-10, "fatol": 1e-14},
            )
            if res.fun < cost:
                u, cost = res.x.copy(), float(res.fun)
            break
        accepted = False
        for _ in range(8):
            try:
                step = np.linalg.solve(J.T @ J + lam * np.eye(3), -J.T @ r)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            u_try = u + step
            u_try[0] = max(u_try[0], _SQRT_E_MIN)
            r_try = resvec(u_try)
            cost_try = float(np.linalg.norm(r_try))
            if cost_try < cost:
                gain = cost - cost_try
                u, r, cost = u_try, r_try, cost_try
                lam = max(lam * 0.3, 1e-12)
                accepted = True
                stalled = stalled + 1 if gain < 1e-14 + 1e-10 * cost else 0
                break
            lam *= 10.0
        if not accepted or stalled >= 3:
            break
    u[0] = max(u[0], _SQRT_E_MIN)
    return u, cost


def _initial_guesses(
    start: ConfigPoint, target: ConfigPoint, n_starts: int, seed: int
) -> list[np.ndarray]:
    """Deterministic stratified grid, topped up pseudorandomly when exhausted."""
    planar = math.hypot(target.x - start.x, target.y - start.y)
    se_init = max(planar + angle_dist(start.theta, target.theta), 0.1)
    guesses: list[np.ndarray] = []
    gammas = [(j + 0.5) * 2.0 * math.pi / 8.0 for j in range(8)]
    for gd in (0.0, -2.0 * se_init, 2.0 * se_init):
        for g0 in gammas:
            guesses.append(np.array([se_init, g0, gd]))
    rng = np.random.default_rng(seed)
    while len(guesses) < n_starts:
        guesses.append(
            np.array(
                [
                    se_init * rng.uniform(0.5, 2.0),
                    rng.uniform(0.0, 2.0 * math.pi),
                    rng.uniform(-3.0, 3.0) * se_init,
                ]
            )
        )
    return guesses[:n_starts]


def _trivial_solution(start: ConfigPoint, dt: float) -> BvpSolution:
    params = ShootingParams(0.0, 0.0, 0.0)
    curve = integrate(FlowState(start, params.to_momentum()), 1.0, dt)
    return BvpSolution(params=params, curve=curve, residual=0.0, energy=0.0, converged=True)


def _is_duplicate(a: ShootingParams, b: ShootingParams) -> bool:
    dg = abs(a.gamma0 - b.gamma0) % GAMMA_PERIOD
    dg = min(dg, GAMMA_PERIOD - dg)
    return (
        abs(a.sqrt_e - b.sqrt_e) < _DUPLICATE_TOL
        and dg < _DUPLICATE_TOL
        and abs(a.gamma_dot0 - b.gamma_dot0) < _DUPLICATE_TOL
    )


def solve_bvp(
    start: ConfigPoint,
    target: ConfigPoint,
    *,
    tol: float = 1e-6,
    w_theta: float = 1.0,
    n_starts: int = 12,
    max_iter: int = 200,
    seed: int = 0,
    dt: float = 1e-3,
) -> list[BvpSolution]:
    """All converged geodesics joining start to target, minimal energy first.

    Deterministic for a fixed seed.  Raises NoConvergenceError (with the best
    non-converged candidates attached) when no start reaches ``tol`` within
    ``max_iter`` refinement steps.
    """
    if tol <= 0.0 or w_theta <= 0.0 or n_starts < 1 or max_iter < 1:
        raise ValueError("tol, w_theta, n_starts and max_iter must be positive")
    if (
        start.x == target.x
        and start.y == target.y
        and angle_dist(start.theta, target.theta) == 0.0
    ):
        return [_trivial_solution(start, dt)]

    # Bulk refinement runs at a coarser step (RK4 endpoint error ~ dt^4 stays
    # orders below tol); a short polish at the requested dt finishes the job.
    dt_coarse = max(dt, 4e-3)
    polish_cost = max(1e-3 * tol, 1e-12)
    candidates: list[BvpSolution] = []
    for u0 in _initial_guesses(start, target, n_starts, seed):
        u, cost = _refine(
            start, target, u0, w_theta, max(polish_cost, 5e-9), max_iter, dt_coarse
        )
        if dt_coarse > dt and cost <= 1e3 * tol:
            u, cost = _refine(start, target, u, w_theta, polish_cost, 30, dt)
        params = ShootingParams(u[0], u[1], u[2])
        curve = shoot(start, params, dt)
        residual = endpoint_residual(curve.endpoint(), target, w_theta)
        candidates.append(
            BvpSolution(
                params=params,
                curve=curve,
                residual=residual,
                energy=params.energy,
                converged=residual <= tol,
            )
        )

    candidates.sort(key=lambda s: (s.energy, s.residual))
    solutions: list[BvpSolution] = []
    for cand in candidates:
        if not cand.converged:
            continue
        if any(_is_duplicate(cand.params, kept.params) for kept in solutions):
            continue
        solutions.append(cand)

    if not solutions:
        best = sorted(candidates, key=lambda s: s.residual)
        raise NoConvergenceError(
            f"no shooting start converged below tol = {tol:g} "
            f"(best residual {best[0].residual:.3e})",
            best,
        )
    return solutions
