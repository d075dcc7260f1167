"""Curve CSV serialization.

Schema: '#'-prefixed metadata lines (energy, dt, integrator), a
't,x,y,theta,p1,p2,p3' header, then one row per sample at 17 significant
digits, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .flow import GeodesicCurve

CURVE_HEADER = "t,x,y,theta,p1,p2,p3"


class CurveFormatError(ValueError):
    """Malformed curve CSV."""


def write_curve_csv(path: str | Path, curve: GeodesicCurve) -> None:
    lines = [
        f"# energy={curve.energy_initial:.17g}\n",
        f"# dt={curve.dt:.17g}\n",
        f"# integrator={curve.integrator_name}\n",
        CURVE_HEADER + "\n",
    ]
    for row in curve.samples:
        lines.append(",".join(f"{v:.17g}" for v in row) + "\n")
    Path(path).write_text("".join(lines))


def read_curve_csv(path: str | Path) -> GeodesicCurve:
    """Parse a curve CSV back into an identical in-memory curve."""
    meta: dict[str, str] = {}
    rows: list[list[float]] = []
    header_seen = False
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            body = text.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        if not header_seen:
            if text != CURVE_HEADER:
                raise CurveFormatError(
                    f"{path}: line {lineno}: expected header '{CURVE_HEADER}', got {text!r}"
                )
            header_seen = True
            continue
        parts = text.split(",")
        if len(parts) != 7:
            raise CurveFormatError(
                f"{path}: line {lineno}: expected 7 fields, got {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise CurveFormatError(f"{path}: line {lineno}: non-numeric field") from exc
    if not header_seen:
        raise CurveFormatError(f"{path}: missing '{CURVE_HEADER}' header")
    if not rows:
        raise CurveFormatError(f"{path}: no samples")

    samples = np.array(rows)
    try:
        dt = float(meta["dt"]) if "dt" in meta else float(samples[1, 0] - samples[0, 0])
    except (ValueError, IndexError) as exc:
        raise CurveFormatError(f"{path}: cannot determine dt") from exc
    integrator = meta.get("integrator", "unknown")
    try:
        return GeodesicCurve.from_samples(samples, dt, integrator)
    except ValueError as exc:
        # from_samples reports the offending sample index; map it to a file line
        raise CurveFormatError(f"{path}: {exc}") from exc
