"""Figure rendering for the CLI.

All figures are written as SVG with a pinned hash salt and no date
metadata, so identical inputs produce byte-identical files.  Axis limits
come from the data bounding box with a 5% margin, and curves cycle through
a fixed 12-color palette.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .analysis import CurveReport  # noqa: E402
from .flow import GeodesicCurve  # noqa: E402
from .se2 import ConfigPoint  # noqa: E402

PALETTE = (
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
    "#a6761d", "#666666", "#1f78b4", "#b2182b", "#4daf4a", "#984ea3",
)

_RC = {"svg.hashsalt": "se2geo", "svg.fonttype": "none", "font.size": 9}


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), format="svg", metadata={"Date": None})
    plt.close(fig)


def _limits(ax, xs, ys, margin: float = 0.05) -> None:
    """Fixed data-derived limits (bounding box plus a 5% margin)."""
    x_lo, x_hi = float(min(xs)), float(max(xs))
    y_lo, y_hi = float(min(ys)), float(max(ys))
    pad = margin * max(x_hi - x_lo, y_hi - y_lo, 1e-3)
    ax.set_xlim(x_lo - pad, x_hi + pad)
    ax.set_ylim(y_lo - pad, y_hi + pad)


def plot_flow(curve: GeodesicCurve, path: str | Path) -> None:
    """Planar projection of one curve."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        ax.plot(curve.x, curve.y, color=PALETTE[0], lw=1.2)
        ax.plot([curve.x[0]], [curve.y[0]], "o", color=PALETTE[1], ms=4)
        _limits(ax, curve.x, curve.y)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        _save(fig, path)


def plot_fan(curves: list[GeodesicCurve], path: str | Path) -> None:
    """Planar projections of a family of curves from a common start."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        xs, ys = [], []
        for i, c in enumerate(curves):
            ax.plot(c.x, c.y, color=PALETTE[i % len(PALETTE)], lw=1.0)
            xs.extend((c.x.min(), c.x.max()))
            ys.extend((c.y.min(), c.y.max()))
        c0 = curves[0]
        ax.plot([c0.x[0]], [c0.y[0]], "ko", ms=4)
        _limits(ax, xs, ys)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        _save(fig, path)


def plot_connect(
    curve: GeodesicCurve, start: ConfigPoint, target: ConfigPoint, path: str | Path
) -> None:
    """Two panels: planar projection (left) and the (x, y, theta) polyline (right)."""
    with plt.rc_context(_RC):
        fig = plt.figure(figsize=(10, 5))
        ax = fig.add_subplot(1, 2, 1)
        ax.plot(curve.x, curve.y, color=PALETTE[0], lw=1.2)
        ax.plot([start.x, target.x], [start.y, target.y], "o", color=PALETTE[1], ms=4)
        _limits(ax, curve.x, curve.y)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")

        ax3 = fig.add_subplot(1, 2, 2, projection="3d")
        ax3.plot(curve.x, curve.y, curve.theta, color=PALETTE[2], lw=1.2)
        ax3.set_xlabel("x")
        ax3.set_ylabel("y")
        ax3.set_zlabel("theta")
        _save(fig, path)


def plot_report(report: CurveReport, path: str | Path) -> None:
    """Diagnostics: both curvature evaluations, and the no-skid residual."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
        ax1.plot(report.t, report.k_formula, color=PALETTE[0], lw=1.0, label="|cot(gamma/2)|")
        ax1.plot(report.t, report.k_sigma, color=PALETTE[1], lw=0.8, ls="--", label="finite differences")
        ax1.set_ylabel("curvature")
        ax1.set_yscale("log")
        ax1.legend(loc="upper right")

        ax2.plot(report.t[:-1], report.eta_residual, color=PALETTE[2], lw=0.8)
        ax2.set_ylabel("|eta(velocity)|")
        ax2.set_xlabel("t")
        ax2.set_yscale("log")
        _save(fig, path)
