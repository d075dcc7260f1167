"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.
"""

import math
import time

import numpy as np
import pytest

from se2geo.analysis import (
    analyze_curve,
    curvature_formula,
    curvature_numeric,
    energy_functional,
    horizontality_residuals,
)
from se2geo.bvp import ShootingParams, endpoint_residual, geodesic_fan, shoot, solve_bvp
from se2geo.cli import main as cli_main
from se2geo.curveio import read_curve_csv
from se2geo.flow import (
    FlowState,
    PendulumState,
    from_pendulum,
    integrate,
    integrate_canonical,
    pendulum_path,
)
from se2geo.lift import (
    ScalarImage,
    count_local_maxima,
    gradient,
    lift,
    smooth,
    theta_brute_force,
    theta_closed_form,
)
from se2geo.se2 import ConfigPoint, angle_dist, from_momentum_frame

TAU = 2.0 * math.pi
ORIGIN = ConfigPoint(0, 0, 0)
ORACLE_TOL = math.pi / 3600 + 1e-12


def _report(name: str, ok: bool, detail: str):
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name} ({detail})")
    assert ok, f"{name}: {detail}"


def _random_states(rng, count):
    states = []
    for _ in range(count):
        E = rng.uniform(0.05, 1.0)
        mf = from_pendulum(
            PendulumState(rng.uniform(0, TAU), rng.uniform(-2, 2) * math.sqrt(E)), E
        )
        q = ConfigPoint(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, TAU))
        states.append(FlowState(q, mf))
    return states


def _fan_curves(t_final=5.0, dt=1e-3):
    gammas = [(2 * j + 1) * math.pi / 12 for j in range(12)]
    return geodesic_fan(ORIGIN, 0.2, gammas, 0.0, t_final, dt)


def test_energy_conservation():
    rng = np.random.default_rng(100)
    t0 = time.perf_counter()
    worst = 0.0
    for s in _random_states(rng, 100):
        c = integrate(s, 5.0, 1e-3)
        H = 0.5 * (c.p1 ** 2 + c.p2 ** 2)
        worst = max(worst, float(np.max(np.abs(H - H[0])) / H[0]))
    elapsed = time.perf_counter() - t0
    _report(
        "energy conservation (100 random, t=5, dt=1e-3)",
        worst <= 1e-8 and elapsed < 10.0,
        f"max relative drift {worst:.3e}, runtime {elapsed:.2f}s",
    )


def test_exact_degenerate_geodesics():
    worst = 0.0
    for E in (1.0, 0.2):
        root = math.sqrt(E)
        straight = integrate(
            FlowState(ORIGIN, from_pendulum(PendulumState(math.pi, 0.0), E)), 1.0, 1e-3
        )
        err_line = max(
            float(np.max(np.abs(straight.x - root * straight.t))),
            float(np.max(np.abs(straight.y))),
        )
        theta0 = 0.7
        fiber = integrate(
            FlowState(ConfigPoint(0, 0, theta0), from_pendulum(PendulumState(0.0, 0.0), E)),
            1.0,
            1e-3,
        )
        err_rot = max(
            float(np.max(np.abs(fiber.theta - (theta0 + root * fiber.t)))),
            float(np.max(np.abs(fiber.x))),
            float(np.max(np.abs(fiber.y))),
        )
        worst = max(worst, err_line, err_rot)
    _report(
        "exact degenerate geodesics (straight line, fiber rotation)",
        worst <= 1e-10,
        f"max trajectory error {worst:.3e}",
    )


def test_pendulum_reduction():
    E = 0.2
    worst = 0.0
    for g0, gd0 in ((math.pi / 6, 0.0), (2.5, 0.0), (1.0, 2.5 * math.sqrt(E))):
        c = integrate(FlowState(ORIGIN, from_pendulum(PendulumState(g0, gd0), E)), 5.0, 1e-3)
        g, _ = pendulum_path(c)
        res = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / c.dt ** 2 + c.energy_initial * np.sin(g[1:-1])
        worst = max(worst, float(np.max(np.abs(res))))

    osc = integrate(FlowState(ORIGIN, from_pendulum(PendulumState(1e-3, 0.0), E)), 40.0, 1e-3)
    g, _ = pendulum_path(osc)
    idx = np.nonzero(np.diff(np.sign(g)) != 0)[0]
    crossings = osc.t[idx] - g[idx] * osc.dt / (g[idx + 1] - g[idx])
    period = float(2.0 * np.diff(crossings).mean())
    period_err = abs(period - TAU / math.sqrt(E)) / (TAU / math.sqrt(E))
    _report(
        "pendulum reduction (residual of gamma'' + E sin gamma; period)",
        worst <= 1e-5 and period_err <= 1e-3,
        f"max residual {worst:.3e}, period error {period_err:.2e}",
    )


def test_horizontality():
    rng = np.random.default_rng(101)
    worst_ratio = 0.0
    curves = _fan_curves() + [integrate(s, 5.0, 1e-3) for s in _random_states(rng, 20)]
    for c in curves:
        bound = 5.0 * c.dt ** 2 * math.sqrt(c.energy_initial)
        worst_ratio = max(worst_ratio, float(horizontality_residuals(c).max()) / bound)
    _report(
        "horizontality |eta(velocity)| <= 5 dt^2 sqrt(E)",
        worst_ratio <= 1.0,
        f"worst residual at {worst_ratio:.3f} of the bound over {len(curves)} curves",
    )


def test_curvature_identity_fan():
    worst = 0.0
    compared = 0
    for c in _fan_curves():
        kn, cusp_n = curvature_numeric(c)
        kf, cusp_f = curvature_formula(c)
        both = np.isfinite(kn) & np.isfinite(kf) & ~(cusp_n | cusp_f)
        compared += int(both.sum())
        if both.any():
            worst = max(worst, float(np.max(np.abs(kn[both] - kf[both]))))
    _report(
        "curvature identity k_sigma = |cot(gamma/2)| on the E=0.2 fan",
        worst <= 1e-4 and compared > 0,
        f"max mismatch {worst:.3e} over {compared} non-cusp samples",
    )


def test_energy_functional_identity():
    rng = np.random.default_rng(102)
    worst_ratio = 0.0
    curves = _fan_curves() + [integrate(s, 5.0, 1e-3) for s in _random_states(rng, 10)]
    curves.append(integrate(FlowState(ORIGIN, from_pendulum(PendulumState(math.pi, 0.0), 1.0)), 1.0, 1e-3))
    curves.append(integrate(FlowState(ORIGIN, from_pendulum(PendulumState(0.0, 0.0), 0.25)), 1.0, 1e-3))
    for c in curves:
        ef = energy_functional(c)
        T = float(c.t[-1] - c.t[0])
        worst_ratio = max(worst_ratio, ef.difference / (1e-6 * c.energy_initial * T))
    _report(
        "energy functional: exact E*T vs curvature-integrand quadrature",
        worst_ratio <= 1.0,
        f"worst difference at {worst_ratio:.2e} of the 1e-6*E*T budget",
    )


def test_connect_nearby_rotated_target():
    t0 = time.perf_counter()
    target = ConfigPoint(0.01, 0.005, math.pi / 3)
    sols = solve_bvp(ORIGIN, target)
    elapsed = time.perf_counter() - t0
    best = sols[0]
    report = analyze_curve(best.curve)
    single_arc = bool(np.min(best.curve.p1) > 0.0 or np.max(best.curve.p1) < 0.0)
    invariants = (
        best.curve.energy_drift <= 1e-9 * max(1.0, best.curve.energy_initial)
        and report.max_eta_residual <= 5.0 * best.curve.dt ** 2 * math.sqrt(best.curve.energy_initial)
    )
    _report(
        "geodesic joining (0,0,0) and (0.01,0.005,pi/3)",
        best.converged and best.residual < 1e-6 and single_arc and invariants and elapsed < 30.0,
        f"residual {best.residual:.2e}, energy {best.energy:.4f}, "
        f"single arc {single_arc}, runtime {elapsed:.1f}s",
    )


def test_default_fan_family_via_cli(tmp_path):
    prefix = tmp_path / "fan"
    code = cli_main(["fan", "--out-prefix", str(prefix)])
    paths = sorted(tmp_path.glob("fan_*.csv"))
    curves = [read_curve_csv(p) for p in paths]
    ok = code == 0 and len(curves) == 12 and (tmp_path / "fan.svg").exists()

    starts = {(c.x[0], c.y[0], c.theta[0]) for c in curves}
    ok = ok and starts == {(0.0, 0.0, 0.0)}

    ends = np.array([(c.x[-1], c.y[-1]) for c in curves])
    gaps = np.linalg.norm(np.diff(ends, axis=0), axis=1)
    t_final = float(curves[0].t[-1])
    bound = 0.2 * math.sqrt(curves[0].energy_initial) * t_final
    ok = ok and float(gaps.max()) < bound

    mirror = 0.0
    for j in range(6):
        a, b = curves[j], curves[11 - j]
        mirror = max(
            mirror,
            abs(a.x[-1] - b.x[-1]),
            abs(a.y[-1] + b.y[-1]),
            angle_dist(a.theta[-1], -b.theta[-1]),
        )
    ok = ok and mirror <= 1e-9
    _report(
        "isoenergetic fan at E=0.2 via cmd_fan defaults",
        ok,
        f"12 curves, max endpoint gap {gaps.max():.3f} < {bound:.3f}, mirror error {mirror:.1e}",
    )


def _oracle_worst_on_image(img: ScalarImage, sigma: float):
    smoothed = smooth(img, sigma)
    gx, gy = gradient(smoothed)
    field = lift(img, sigma)
    worst = 0.0
    unique = True
    for i, j in zip(*np.nonzero(field.regular)):
        closed = theta_closed_form(gx[i, j], gy[i, j])
        brute = theta_brute_force(gx[i, j], gy[i, j])
        worst = max(worst, angle_dist(closed, brute))
        unique = unique and count_local_maxima(gx[i, j], gy[i, j]) == 1
    return worst, unique, int(field.regular.sum())


def test_orientation_lift_oracle():
    rng = np.random.default_rng(103)
    worst = 0.0
    unique = True
    for _ in range(1000):
        gx, gy = rng.normal(size=2)
        worst = max(worst, angle_dist(theta_closed_form(gx, gy), theta_brute_force(gx, gy)))
        unique = unique and count_local_maxima(gx, gy) == 1

    n = 31
    yy, xx = np.meshgrid(np.arange(n) * 1.0, np.arange(n) * 1.0, indexing="ij")
    ramp = ScalarImage(yy.copy())
    c = (n - 1) / 2.0
    blob = ScalarImage(np.exp(-((xx - c) ** 2 + (yy - c) ** 2) / (2.0 * 5.0 ** 2)))
    step = np.zeros((n, n))
    step[:, n // 2 :] = 1.0
    edge = ScalarImage(step)

    checked = 0
    for img, sigma in ((ramp, 0.0), (blob, 0.0), (edge, 1.0)):
        w, u, count = _oracle_worst_on_image(img, sigma)
        worst = max(worst, w)
        unique = unique and u
        checked += count
    _report(
        "orientation argmax: closed form vs 3600-sample brute force",
        worst <= ORACLE_TOL and unique,
        f"worst distance {worst:.6f} <= pi/3600, unique maximizer everywhere, "
        f"{checked} image pixels + 1000 random gradients",
    )


def test_bvp_round_trip_and_determinism():
    rng = np.random.default_rng(104)
    t0 = time.perf_counter()
    worst = 0.0
    all_params = []
    for _ in range(50):
        p = ShootingParams(rng.uniform(0.3, 2.0), rng.uniform(0, TAU), rng.uniform(-2, 2))
        all_params.append(p)
        target = shoot(ORIGIN, p, dt=2e-3).endpoint()
        sols = solve_bvp(ORIGIN, target, n_starts=6, dt=2e-3, seed=3)
        assert sols[0].converged
        worst = max(worst, endpoint_residual(sols[0].curve.endpoint(), target))
    elapsed = time.perf_counter() - t0

    deterministic = True
    for p in all_params[:5]:
        target = shoot(ORIGIN, p, dt=2e-3).endpoint()
        a = solve_bvp(ORIGIN, target, n_starts=6, dt=2e-3, seed=3)
        b = solve_bvp(ORIGIN, target, n_starts=6, dt=2e-3, seed=3)
        deterministic = deterministic and len(a) == len(b)
        deterministic = deterministic and all(
            sa.params == sb.params and sa.residual == sb.residual for sa, sb in zip(a, b)
        )
    _report(
        "shooting round trip over 50 random parameter sets",
        worst <= 1e-6 and deterministic,
        f"worst recovered residual {worst:.2e}, deterministic {deterministic}, "
        f"runtime {elapsed:.0f}s",
    )


def test_reduced_vs_canonical():
    rng = np.random.default_rng(105)
    worst = 0.0
    for s in _random_states(rng, 20):
        c = integrate(s, 1.0, 1e-3)
        canon = integrate_canonical(from_momentum_frame(s.q, s.mf), 1.0, 1e-3)
        end = c.endpoint()
        worst = max(
            worst,
            math.hypot(end.x - canon[-1, 1], end.y - canon[-1, 2]),
            angle_dist(end.theta, canon[-1, 3]),
        )
    _report(
        "reduced vs canonical Hamilton equations at t=1",
        worst <= 1e-8,
        f"max endpoint disagreement {worst:.3e}",
    )
