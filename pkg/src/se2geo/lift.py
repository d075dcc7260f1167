"""Orientation lifting of grayscale images.

Smooth (Gaussian), differentiate (central differences), then assign to each
regular pixel the angle maximizing the directional response
zeta(theta) = -sin(theta) dI/dx + cos(theta) dI/dy.  The closed-form
maximizer is atan2(-gx, gy); a brute-force grid argmax is kept as an
independent oracle.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import correlate1d

from .se2 import ConfigPoint, angle_wrap


class ZeroGradientError(ValueError):
    """The gradient vanishes: the orientation is undefined."""


class IrregularPointError(ValueError):
    """A sample point fell on a non-regular pixel."""


class ImageFormatError(ValueError):
    """Malformed PGM or grid-CSV input."""


@dataclass(frozen=True)
class ScalarImage:
    """Grayscale function on a uniform grid.

    values[i, j] is the sample at x = x0 + j * spacing,
    y = y0 + i * spacing (row index increases with y).
    """

    values: np.ndarray
    spacing: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] < 3:
            raise ValueError(f"image must be at least 3x3, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("image values must be finite")
        if not self.spacing > 0.0:
            raise ValueError(f"spacing must be positive, got {self.spacing!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class OrientationField:
    """Per-pixel orientation, gradient magnitude, and regularity flag.

    theta is NaN on non-regular pixels (gradient magnitude <= eps_reg).
    """

    theta: np.ndarray
    grad_norm: np.ndarray
    regular: np.ndarray
    spacing: float
    origin: tuple[float, float]
    eps_reg: float

    @property
    def height(self) -> int:
        return self.theta.shape[0]

    @property
    def width(self) -> int:
        return self.theta.shape[1]


def gaussian_kernel(sigma: float, spacing: float) -> np.ndarray:
    """Sampled Gaussian taps with radius ceil(3 sigma / spacing), normalized to sum 1."""
    radius = math.ceil(3.0 * sigma / spacing)
    ticks = np.arange(-radius, radius + 1) * spacing
    k = np.exp(-0.5 * (ticks / sigma) ** 2)
    return k / k.sum()


def smooth(img: ScalarImage, sigma: float) -> ScalarImage:
    """Gaussian smoothing with edge replication; sigma = 0 returns the input unchanged."""
    if sigma < 0.0:
        raise ValueError(f"sigma must be nonnegative, got {sigma!r}")
    if sigma == 0.0:
        return img
    k = gaussian_kernel(sigma, img.spacing)
    out = correlate1d(img.values, k, axis=0, mode="nearest")
    out = correlate1d(out, k, axis=1, mode="nearest")
    return ScalarImage(out, img.spacing, img.origin)


def gradient(img: ScalarImage) -> tuple[np.ndarray, np.ndarray]:
    """(gx, gy) per pixel: central differences inside, one-sided at the borders."""
    h = img.spacing
    v = img.values
    gx = np.empty_like(v)
    gy = np.empty_like(v)
    gx[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * h)
    gx[:, 0] = (v[:, 1] - v[:, 0]) / h
    gx[:, -1] = (v[:, -1] - v[:, -2]) / h
    gy[1:-1, :] = (v[2:, :] - v[:-2, :]) / (2.0 * h)
    gy[0, :] = (v[1, :] - v[0, :]) / h
    gy[-1, :] = (v[-1, :] - v[-2, :]) / h
    return gx, gy


def theta_closed_form(gx: float, gy: float) -> float:
    """The unique maximizer of zeta(theta) = -sin(theta) gx + cos(theta) gy, in [0, 2*pi)."""
    if gx == 0.0 and gy == 0.0:
        raise ZeroGradientError("orientation undefined at zero gradient")
    return angle_wrap(math.atan2(-gx, gy))


def theta_brute_force(gx: float, gy: float, n_samples: int = 3600) -> float:
    """Grid argmax of zeta over n_samples uniform angles; oracle for theta_closed_form."""
    thetas = np.arange(n_samples) * (2.0 * math.pi / n_samples)
    zeta = -np.sin(thetas) * gx + np.cos(thetas) * gy
    return float(thetas[int(np.argmax(zeta))])


def count_local_maxima(gx: float, gy: float, n_samples: int = 3600) -> int:
    """Number of strict local maxima of zeta on the cyclic sample grid.

    Plateaus of equal values are merged, so a maximum straddling two equal
    samples counts once.
    """
    thetas = np.arange(n_samples) * (2.0 * math.pi / n_samples)
    zeta = -np.sin(thetas) * gx + np.cos(thetas) * gy
    # merge cyclic runs of equal values, then compare each run to its neighbors
    change = np.nonzero(np.diff(zeta) != 0.0)[0]
    if change.size == 0:
        return 0
    run_values = zeta[np.concatenate([[0], change + 1])]
    if zeta[-1] == zeta[0]:  # last run wraps into the first
        run_values = run_values[:-1] if run_values.size > 1 else run_values
    m = run_values.size
    if m < 2:
        return 0
    prev = np.roll(run_values, 1)
    nxt = np.roll(run_values, -1)
    return int(np.sum((run_values > prev) & (run_values > nxt)))


def default_eps_reg(img: ScalarImage) -> float:
    """Regularity threshold 1e-6 * (max I - min I) / spacing."""
    v = img.values
    return 1e-6 * float(v.max() - v.min()) / img.spacing


def lift(img: ScalarImage, sigma: float = 0.0, eps_reg: float | None = None) -> OrientationField:
    """Orientation field of an image: smooth, differentiate, take the argmax angle.

    Pixels with gradient magnitude <= eps_reg are flagged non-regular and
    carry theta = NaN.  eps_reg defaults to 1e-6 * range(smoothed I) / spacing.
    """
    smoothed = smooth(img, sigma)
    if eps_reg is None:
        eps_reg = default_eps_reg(smoothed)
    gx, gy = gradient(smoothed)
    norm = np.hypot(gx, gy)
    regular = norm > eps_reg
    theta = np.where(regular, np.arctan2(-gx, gy) % (2.0 * math.pi), np.nan)
    theta = np.where(theta == 2.0 * math.pi, 0.0, theta)
    return OrientationField(theta, norm, regular, smoothed.spacing, smoothed.origin, eps_reg)


def nearest_pixel(field: OrientationField, x: float, y: float) -> tuple[int, int]:
    """Row/column of the grid node closest to (x, y); errors if outside the grid."""
    x0, y0 = field.origin
    j = round((x - x0) / field.spacing)
    i = round((y - y0) / field.spacing)
    if not (0 <= i < field.height and 0 <= j < field.width):
        raise ValueError(f"point ({x}, {y}) lies outside the image rectangle")
    return int(i), int(j)


def inducers_at(field: OrientationField, points: list[tuple[float, float]]) -> list[ConfigPoint]:
    """Oriented inducers (x, y, theta of the nearest pixel) for boundary completion."""
    out = []
    for x, y in points:
        i, j = nearest_pixel(field, x, y)
        if not field.regular[i, j]:
            raise IrregularPointError(
                f"point ({x}, {y}) maps to non-regular pixel (row {i}, col {j})"
            )
        out.append(ConfigPoint(x, y, float(field.theta[i, j])))
    return out


# ---------------------------------------------------------------------------
# file formats


def read_pgm(path: str | Path) -> ScalarImage:
    """Read a PGM image (P2 ASCII or P5 binary, maxval <= 65535)."""
    raw = Path(path).read_bytes()
    if raw[:2] not in (b"P2", b"P5"):
        raise ImageFormatError(f"{path}: not a PGM file (magic {raw[:2]!r})")
    magic = raw[:2].decode()

    # header tokens: magic, width, height, maxval; '#' comments run to end of line
    pos = 2
    tokens = []
    while len(tokens) < 3:
        m = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)").match(raw, pos)
        if m is None:
            raise ImageFormatError(f"{path}: truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ImageFormatError(f"{path}: bad PGM header {tokens!r}") from exc
    if width < 1 or height < 1 or not 0 < maxval <= 65535:
        raise ImageFormatError(f"{path}: bad PGM dimensions {width}x{height}, maxval {maxval}")

    if magic == "P2":
        try:
            data = np.array(raw[pos:].split(), dtype=float)
        except ValueError as exc:
            raise ImageFormatError(f"{path}: non-numeric P2 sample") from exc
    else:
        pos += 1  # single whitespace byte after maxval
        count = width * height
        if maxval < 256:
            data = np.frombuffer(raw, dtype=np.uint8, count=count, offset=pos).astype(float)
        else:
            data = np.frombuffer(raw, dtype=">u2", count=count, offset=pos).astype(float)
    if data.size != width * height:
        raise ImageFormatError(
            f"{path}: expected {width * height} samples, found {data.size}"
        )
    return ScalarImage(data.reshape(height, width))


def write_pgm(path: str | Path, img: ScalarImage, maxval: int = 255) -> None:
    """Write an image as ASCII P2, clipping values into [0, maxval]."""
    v = np.clip(np.rint(img.values), 0, maxval).astype(int)
    lines = [f"P2\n{img.width} {img.height}\n{maxval}\n"]
    for row in v:
        lines.append(" ".join(str(int(x)) for x in row) + "\n")
    Path(path).write_text("".join(lines))


def read_grid_csv(path: str | Path) -> ScalarImage:
    """Read the grid-CSV image format: 'width,height,spacing,x0,y0' then row-major values."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ImageFormatError(f"{path}: empty grid CSV")
    head = lines[0].split(",")
    if len(head) != 5:
        raise ImageFormatError(f"{path}: header must be width,height,spacing,x0,y0")
    try:
        width, height = int(head[0]), int(head[1])
        spacing, x0, y0 = (float(t) for t in head[2:])
    except ValueError as exc:
        raise ImageFormatError(f"{path}: bad grid header {lines[0]!r}") from exc
    try:
        data = np.array([float(t) for ln in lines[1:] for t in ln.split(",") if t.strip()])
    except ValueError as exc:
        raise ImageFormatError(f"{path}: non-numeric grid value") from exc
    if data.size != width * height:
        raise ImageFormatError(f"{path}: expected {width * height} values, found {data.size}")
    return ScalarImage(data.reshape(height, width), spacing, (x0, y0))


def write_grid_csv(path: str | Path, img: ScalarImage) -> None:
    """Write the grid-CSV image format."""
    x0, y0 = img.origin
    lines = [f"{img.width},{img.height},{img.spacing:.17g},{x0:.17g},{y0:.17g}\n"]
    for row in img.values:
        lines.append(",".join(f"{v:.17g}" for v in row) + "\n")
    Path(path).write_text("".join(lines))


def read_image(path: str | Path) -> ScalarImage:
    """Dispatch on content: PGM magic or grid CSV."""
    head = Path(path).read_bytes()[:2]
    if head in (b"P2", b"P5"):
        return read_pgm(path)
    return read_grid_csv(path)


def field_to_csv(path: str | Path, field: OrientationField) -> None:
    """Write the orientation field as 'x,y,theta,grad_norm,regular' rows."""
    x0, y0 = field.origin
    h = field.spacing
    lines = ["x,y,theta,grad_norm,regular\n"]
    for i in range(field.height):
        for j in range(field.width):
            lines.append(
                f"{x0 + j * h:.17g},{y0 + i * h:.17g},"
                f"{field.theta[i, j]:.17g},{field.grad_norm[i, j]:.17g},"
                f"{int(field.regular[i, j])}\n"
            )
    Path(path).write_text("".join(lines))
