"""Command line interface: flow, connect, fan, lift, analyze.

Exit codes: 0 success, 2 usage or parse error, 3 integration blow-up,
4 no convergence, 5 irregular sample point.  The environment variable
SE2_SEED overrides --seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .analysis import analyze_curve
from .bvp import (
    BvpSolution,
    NoConvergenceError,
    ShootingParams,
    geodesic_fan,
    solve_bvp,
)
from .curveio import CurveFormatError, read_curve_csv, write_curve_csv
from .flow import FlowState, NonFiniteStateError, PendulumState, from_pendulum, integrate
from .lift import (
    ImageFormatError,
    IrregularPointError,
    field_to_csv,
    inducers_at,
    lift,
    read_image,
)
from .se2 import ConfigPoint
from . import plotting

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTEGRATION = 3
EXIT_NO_CONVERGENCE = 4
EXIT_IRREGULAR = 5

FAN_DEFAULT_GAMMA0 = tuple((2 * j + 1) * math.pi / 12 for j in range(12))


class UsageError(ValueError):
    """Invalid configuration; the message names the offending flag."""


def _fail_usage(flag: str, why: str):
    raise UsageError(f"{flag}: {why}")


def _angle(value: float, degrees: bool) -> float:
    return math.radians(value) if degrees else value


def _parse_pose(text: str, degrees: bool, flag: str) -> ConfigPoint:
    parts = text.split(",")
    if len(parts) != 3:
        _fail_usage(flag, f"expected 'x,y,theta', got {text!r}")
    try:
        x, y, th = (float(p) for p in parts)
    except ValueError:
        _fail_usage(flag, f"non-numeric component in {text!r}")
    return ConfigPoint(x, y, _angle(th, degrees))


def _parse_points(text: str, flag: str) -> list[tuple[float, float]]:
    points = []
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 2:
            _fail_usage(flag, f"expected 'x,y' pairs separated by ';', got {chunk!r}")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError:
            _fail_usage(flag, f"non-numeric coordinate in {chunk!r}")
    if not points:
        _fail_usage(flag, "no points given")
    return points


def _resolve_seed(args) -> int:
    env = os.environ.get("SE2_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            _fail_usage("SE2_SEED", f"must be an integer, got {env!r}")
    return args.seed


def _check_positive(value: float, flag: str):
    if not value > 0.0:
        _fail_usage(flag, f"must be positive, got {value!r}")


def _check_grid(t_final: float, dt: float):
    _check_positive(t_final, "--t-final")
    _check_positive(dt, "--dt")
    if dt > t_final * (1.0 + 1e-12):
        _fail_usage("--dt", f"must not exceed --t-final ({t_final!r})")


def _solution_record(s: BvpSolution) -> dict:
    return {
        "sqrt_e": s.params.sqrt_e,
        "gamma0": s.params.gamma0,
        "gamma_dot0": s.params.gamma_dot0,
        "energy": s.energy,
        "residual": s.residual,
        "converged": s.converged,
    }


def cmd_flow(args) -> int:
    _check_grid(args.t_final, args.dt)
    if args.energy < 0.0:
        _fail_usage("--energy", f"must be nonnegative, got {args.energy!r}")
    start = _parse_pose(args.start, args.degrees, "--start")
    gamma0 = _angle(args.gamma0, args.degrees)
    gamma_dot0 = _angle(args.gamma_dot0, args.degrees)

    mf = from_pendulum(PendulumState(gamma0, gamma_dot0), args.energy)
    curve = integrate(FlowState(start, mf), args.t_final, args.dt)
    for w in curve.warnings:
        print(f"warning: {w}", file=sys.stderr)
    write_curve_csv(args.out, curve)
    if args.svg:
        plotting.plot_flow(curve, args.svg)
    end = curve.endpoint()
    print(f"wrote {args.out} ({len(curve)} samples)")
    print(f"endpoint: x={end.x:.12g} y={end.y:.12g} theta={end.theta:.12g}")
    return EXIT_OK


def cmd_connect(args) -> int:
    _check_positive(args.tol, "--tol")
    _check_positive(args.w_theta, "--w-theta")
    _check_positive(args.dt, "--dt")
    if args.n_starts < 1:
        _fail_usage("--n-starts", "must be at least 1")
    if args.max_iter < 1:
        _fail_usage("--max-iter", "must be at least 1")
    start = _parse_pose(args.start, args.degrees, "--start")
    target = _parse_pose(args.end, args.degrees, "--end")
    seed = _resolve_seed(args)
    summary_path = args.summary or str(Path(args.out).with_suffix(".solutions.json"))

    if (
        start.x == target.x
        and start.y == target.y
        and start.theta == target.theta
    ):
        print("warning: start equals end; returning the zero-energy constant curve", file=sys.stderr)

    exit_code = EXIT_OK
    try:
        solutions = solve_bvp(
            start,
            target,
            tol=args.tol,
            w_theta=args.w_theta,
            n_starts=args.n_starts,
            max_iter=args.max_iter,
            seed=seed,
            dt=args.dt,
        )
    except NoConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        solutions = exc.candidates
        exit_code = EXIT_NO_CONVERGENCE

    best = solutions[0]
    write_curve_csv(args.out, best.curve)
    summary = {
        "start": [start.x, start.y, start.theta],
        "end": [target.x, target.y, target.theta],
        "tol": args.tol,
        "w_theta": args.w_theta,
        "n_starts": args.n_starts,
        "max_iter": args.max_iter,
        "seed": seed,
        "dt": args.dt,
        "solutions": [_solution_record(s) for s in solutions],
    }
    Path(summary_path).write_text(json.dumps(summary, indent=2) + "\n")
    if args.svg:
        plotting.plot_connect(best.curve, start, target, args.svg)
    status = "converged" if best.converged else "NOT converged"
    print(f"{len(solutions)} solution(s); best {status}: energy={best.energy:.12g} residual={best.residual:.3e}")
    print(f"wrote {args.out} and {summary_path}")
    return exit_code


def cmd_fan(args) -> int:
    _check_grid(args.t_final, args.dt)
    _check_positive(args.energy, "--energy")
    start = _parse_pose(args.start, args.degrees, "--start")
    if args.gamma0_list:
        try:
            gammas = [_angle(float(t), args.degrees) for t in args.gamma0_list.split(",")]
        except ValueError:
            _fail_usage("--gamma0-list", f"non-numeric value in {args.gamma0_list!r}")
    else:
        gammas = list(FAN_DEFAULT_GAMMA0)
    gamma_dot0 = _angle(args.gamma_dot0, args.degrees)

    curves = geodesic_fan(start, args.energy, gammas, gamma_dot0, args.t_final, args.dt)
    paths = []
    for i, curve in enumerate(curves):
        path = f"{args.out_prefix}_{i:02d}.csv"
        write_curve_csv(path, curve)
        paths.append(path)
    svg_path = args.svg or f"{args.out_prefix}.svg"
    plotting.plot_fan(curves, svg_path)
    print(f"wrote {len(paths)} curves ({paths[0]} .. {paths[-1]}) and {svg_path}")
    return EXIT_OK


def cmd_lift(args) -> int:
    if args.sigma < 0.0:
        _fail_usage("--sigma", f"must be nonnegative, got {args.sigma!r}")
    if args.eps_reg is not None and args.eps_reg < 0.0:
        _fail_usage("--eps-reg", f"must be nonnegative, got {args.eps_reg!r}")
    if args.complete and not args.points:
        _fail_usage("--complete", "requires --points")
    points = _parse_points(args.points, "--points") if args.points else None
    seed = _resolve_seed(args)

    image = read_image(args.image)
    field = lift(image, args.sigma, args.eps_reg)
    if not field.regular.any():
        print("warning: no regular pixels (constant image?)", file=sys.stderr)
    field_to_csv(args.out, field)
    print(f"wrote {args.out} ({int(field.regular.sum())} regular of {field.width * field.height} pixels)")

    if points is None:
        return EXIT_OK

    inducers = inducers_at(field, points)
    points_path = args.points_out or str(Path(args.out).with_suffix(".inducers.csv"))
    lines = ["x,y,theta\n"]
    for q in inducers:
        lines.append(f"{q.x:.17g},{q.y:.17g},{q.theta:.17g}\n")
    Path(points_path).write_text("".join(lines))
    print(f"wrote {points_path} ({len(inducers)} inducers)")

    if not args.complete:
        return EXIT_OK

    if len(inducers) < 2:
        _fail_usage("--complete", "needs at least two --points")
    def flip(q: ConfigPoint) -> ConfigPoint:
        return ConfigPoint(q.x, q.y, q.theta + math.pi)

    prefix = args.curve_prefix or str(Path(args.out).with_suffix("")) + "_completion"
    for i in range(len(inducers) - 1):
        a, b = inducers[i], inducers[i + 1]
        pairs = [(a, b)]
        if args.try_flip:
            pairs += [(flip(a), b), (a, flip(b)), (flip(a), flip(b))]
        best = None
        for qa, qb in pairs:
            try:
                sols = solve_bvp(
                    qa,
                    qb,
                    tol=args.tol,
                    n_starts=args.n_starts,
                    max_iter=args.max_iter,
                    seed=seed,
                    dt=args.dt,
                )
            except NoConvergenceError:
                continue
            if best is None or sols[0].energy < best.energy:
                best = sols[0]
        if best is None:
            raise NoConvergenceError(
                f"no geodesic found between inducers {i} and {i + 1}", []
            )
        path = f"{prefix}_{i:02d}.csv"
        write_curve_csv(path, best.curve)
        print(
            f"wrote {path} (energy={best.energy:.12g} residual={best.residual:.3e})"
        )
    return EXIT_OK


def cmd_analyze(args) -> int:
    curve = read_curve_csv(args.curve)
    report = analyze_curve(curve)
    doc = report.to_dict()
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    if args.svg:
        plotting.plot_report(report, args.svg)
    agg = doc["aggregates"]
    print(f"wrote {args.out}")
    print(
        "energy functional: exact={energy_functional_exact:.12g} "
        "quadrature={energy_functional_quadrature:.12g} "
        "difference={energy_functional_difference:.3e}".format(**agg)
    )
    print(
        "max eta residual={max_eta_residual:.3e} "
        "max curvature mismatch={max_curvature_mismatch:.3e} "
        "energy drift={energy_drift:.3e}".format(**agg)
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="se2geo",
        description="Sub-Riemannian geodesics on SE(2): integrate, connect, fan, lift, analyze.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--degrees", action="store_true", help="interpret angle inputs as degrees")
        p.add_argument("--seed", type=int, default=0, help="pseudorandom seed (SE2_SEED overrides)")

    p = sub.add_parser("flow", help="integrate one geodesic from pendulum initial data")
    p.add_argument("--start", default="0,0,0", help="start pose 'x,y,theta'")
    p.add_argument("--gamma0", type=float, required=True, help="initial pendulum angle")
    p.add_argument("--gamma-dot0", type=float, default=0.0, dest="gamma_dot0")
    p.add_argument("--energy", type=float, required=True, help="conserved energy E = p1^2 + p2^2")
    p.add_argument("--t-final", type=float, default=1.0, dest="t_final")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--out", required=True, help="curve CSV output path")
    p.add_argument("--svg", help="optional SVG of the planar projection")
    add_common(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("connect", help="solve the two-point boundary value problem")
    p.add_argument("--start", required=True, help="start pose 'x,y,theta'")
    p.add_argument("--end", required=True, help="end pose 'x,y,theta'")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--w-theta", type=float, default=1.0, dest="w_theta")
    p.add_argument("--n-starts", type=int, default=12, dest="n_starts")
    p.add_argument("--max-iter", type=int, default=200, dest="max_iter")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--out", required=True, help="best-curve CSV output path")
    p.add_argument("--summary", help="solutions summary JSON (default: <out>.solutions.json)")
    p.add_argument("--svg", help="optional two-panel SVG (projection + lifted curve)")
    add_common(p)
    p.set_defaults(func=cmd_connect)

    p = sub.add_parser("fan", help="isoenergetic fan of geodesics over gamma0")
    p.add_argument("--start", default="0,0,0")
    p.add_argument("--energy", type=float, default=0.2)
    p.add_argument("--gamma0-list", dest="gamma0_list", help="comma-separated gamma0 values (default: 12 midpoints of (0, 2pi))")
    p.add_argument("--gamma-dot0", type=float, default=0.0, dest="gamma_dot0")
    p.add_argument("--t-final", type=float, default=12.0, dest="t_final")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--out-prefix", required=True, dest="out_prefix")
    p.add_argument("--svg", help="combined SVG path (default: <out-prefix>.svg)")
    add_common(p)
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("lift", help="orientation field of an image, inducers, optional completion")
    p.add_argument("--image", required=True, help="PGM (P2/P5) or grid-CSV image")
    p.add_argument("--sigma", type=float, default=0.0, help="Gaussian smoothing scale")
    p.add_argument("--eps-reg", type=float, default=None, dest="eps_reg", help="regularity threshold")
    p.add_argument("--out", required=True, help="orientation field CSV output path")
    p.add_argument("--points", help="sample points 'x,y;x,y;...' for inducers")
    p.add_argument("--points-out", dest="points_out", help="inducer CSV (default: <out>.inducers.csv)")
    p.add_argument("--complete", action="store_true", help="connect consecutive inducers by geodesics")
    p.add_argument("--try-flip", action="store_true", dest="try_flip", help="also try theta+pi per inducer, keep the lower-energy geodesic")
    p.add_argument("--curve-prefix", dest="curve_prefix", help="completion curve prefix (default: <out>_completion)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--n-starts", type=int, default=12, dest="n_starts")
    p.add_argument("--max-iter", type=int, default=200, dest="max_iter")
    p.add_argument("--dt", type=float, default=1e-3)
    add_common(p)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("analyze", help="diagnostic report for a curve CSV")
    p.add_argument("--curve", required=True, help="curve CSV path")
    p.add_argument("--out", required=True, help="report JSON output path")
    p.add_argument("--svg", help="optional diagnostics SVG")
    add_common(p)
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ImageFormatError, CurveFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonFiniteStateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except NoConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except IrregularPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IRREGULAR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
