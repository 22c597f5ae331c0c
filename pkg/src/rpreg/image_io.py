"""Image loading, Sobel filtering and rotation.

Images are held as :class:`ImageGrid`, a read-only ``(height, width)``
float64 array with intensities in ``[0, 1]``.  Pixel ``(x, y)`` is
``data[y, x]``; rotations are about the geometric center
``((w - 1) / 2, (h - 1) / 2)``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import (
    AngleOutOfRangeError,
    ChannelUnavailableError,
    EmptyRegionError,
    ImageTooSmallError,
    UnsupportedFormatError,
)

CHANNELS = ("red", "green", "blue", "gray")
MAX_ABS_THETA = 45.0
SOBEL_MAX = 4.0 * math.sqrt(2.0)

# source coordinates this close to an integer are snapped onto it
_SNAP = 1e-9


@dataclass(frozen=True, eq=False)
class ImageGrid:
    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"image data must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("image intensities must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def __eq__(self, other):
        if not isinstance(other, ImageGrid):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"ImageGrid(width={self.width}, height={self.height})"


@dataclass(frozen=True)
class PixelRect:
    """Inclusive pixel rectangle ``[x0, x1] x [y0, y1]``."""

    x0: int
    x1: int
    y0: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    @property
    def count(self) -> int:
        return self.width * self.height

    def coords(self) -> np.ndarray:
        """All pixel coordinates as a ``(count, 2)`` int array of ``(x, y)``, row-major."""
        ys, xs = np.mgrid[self.y0:self.y1 + 1, self.x0:self.x1 + 1]
        return np.stack([xs.ravel(), ys.ravel()], axis=1)


@dataclass(frozen=True, eq=False)
class RotatedImage:
    """Result of :func:`rotate`: the warped image plus its in-bounds mask."""

    image: ImageGrid
    valid: np.ndarray = field(repr=False)
    theta: float = 0.0


def load_image(path, channel: str = "gray") -> ImageGrid:
    """Load one channel of an 8-bit PNG/PGM/PPM file, scaled to ``[0, 1]``.

    ``gray`` on RGB input applies the 0.299/0.587/0.114 luma weights; on
    grayscale input it returns the stored values.
    """
    if channel not in CHANNELS:
        raise ValueError(f"unknown channel {channel!r}; expected one of {CHANNELS}")
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "P":
                im = im.convert("RGB")
                mode = "RGB"
            elif mode == "LA":
                im = im.convert("L")
                mode = "L"
            elif mode == "RGBA":
                im = im.convert("RGB")
                mode = "RGB"
            if mode not in ("L", "RGB"):
                raise UnsupportedFormatError(f"{path}: unsupported pixel mode {im.mode!r} (need 8-bit L or RGB)")
            raw = np.asarray(im, dtype=np.uint8)
    except UnsupportedFormatError:
        raise
    except OSError as exc:
        raise UnsupportedFormatError(f"{path}: {exc}") from exc
    return image_from_uint8(raw, channel)


def image_from_uint8(raw: np.ndarray, channel: str = "gray") -> ImageGrid:
    """Convert an 8-bit ``(H, W)`` or ``(H, W, 3)`` array to an :class:`ImageGrid`."""
    raw = np.asarray(raw)
    if raw.ndim == 2:
        if channel != "gray":
            raise ChannelUnavailableError(f"channel {channel!r} requested on a grayscale image")
        return ImageGrid(raw.astype(np.float64) / 255.0)
    if raw.ndim != 3 or raw.shape[2] != 3:
        raise UnsupportedFormatError(f"expected (H, W) or (H, W, 3) array, got {raw.shape}")
    if channel == "gray":
        # integer luma keeps (v, v, v) -> v exact
        rgb = raw.astype(np.int64)
        num = 299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2]
        return ImageGrid(num.astype(np.float64) / 255000.0)
    idx = CHANNELS.index(channel)
    return ImageGrid(raw[..., idx].astype(np.float64) / 255.0)


def save_pgm(img: ImageGrid, path) -> None:
    """Write ``img`` as a binary 8-bit PGM (debug dumps)."""
    arr = np.clip(np.rint(img.data * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PPM")


def sobel_magnitude(img: ImageGrid) -> ImageGrid:
    """Sobel gradient magnitude with edge-replicated borders, divided by 4*sqrt(2)."""
    if img.width < 3 or img.height < 3:
        raise ImageTooSmallError(f"Sobel needs at least 3x3 pixels, got {img.width}x{img.height}")
    p = np.pad(img.data, 1, mode="edge")
    # rows r-1, r, r+1 / columns c-1, c, c+1 of the padded array
    top, mid, bot = p[:-2, :], p[1:-1, :], p[2:, :]
    smooth_y = top + 2.0 * mid + bot
    gx = smooth_y[:, 2:] - smooth_y[:, :-2]
    left, centre, right = p[:, :-2], p[:, 1:-1], p[:, 2:]
    smooth_x = left + 2.0 * centre + right
    gy = smooth_x[2:, :] - smooth_x[:-2, :]
    mag = np.hypot(gx, gy) / SOBEL_MAX
    return ImageGrid(np.clip(mag, 0.0, 1.0))


def _rotation_sources(width: int, height: int, theta: float):
    """Source coordinates ``(sx, sy)`` sampled by each output pixel."""
    rad = math.radians(theta)
    c, s = math.cos(rad), math.sin(rad)
    if theta % 90.0 == 0.0:
        c, s = round(c), round(s)
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    u, v = xs - cx, ys - cy
    sx = cx + c * u - s * v
    sy = cy + s * u + c * v
    for a in (sx, sy):
        r = np.rint(a)
        near = np.abs(a - r) < _SNAP
        a[near] = r[near]
    return sx, sy


def bilinear_sample(data: np.ndarray, sx: np.ndarray, sy: np.ndarray):
    """Bilinear interpolation of ``data`` at ``(sx, sy)``.

    Returns ``(values, valid)``; samples outside ``[0, w-1] x [0, h-1]``
    get value 0 and ``valid = False``.
    """
    h, w = data.shape
    sx = np.asarray(sx, dtype=np.float64)
    sy = np.asarray(sy, dtype=np.float64)
    valid = (sx >= 0) & (sx <= w - 1) & (sy >= 0) & (sy <= h - 1)
    x = np.where(valid, sx, 0.0)
    y = np.where(valid, sy, 0.0)
    x0 = np.minimum(np.floor(x).astype(np.intp), max(w - 2, 0))
    y0 = np.minimum(np.floor(y).astype(np.intp), max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = x - x0
    fy = y - y0
    top = data[y0, x0] * (1.0 - fx) + data[y0, x1] * fx
    bot = data[y1, x0] * (1.0 - fx) + data[y1, x1] * fx
    out = top * (1.0 - fy) + bot * fy
    # exact lattice hits return the stored value untouched
    on_grid = (fx == 0.0) & (fy == 0.0)
    out = np.where(on_grid, data[y0, x0], out)
    return np.where(valid, out, 0.0), valid


def rotate(img: ImageGrid, theta: float, *, max_abs_theta: float = MAX_ABS_THETA) -> RotatedImage:
    """Rotate ``img`` by ``theta`` degrees about its center (inverse map, bilinear).

    Output pixel ``p`` samples the input at ``c + R(theta) (p - c)``; in the
    usual y-down display this turns the content counter-clockwise, so 90
    degrees matches ``np.rot90``.  Pass a larger ``max_abs_theta`` to lift
    the default range guard.
    """
    if not math.isfinite(theta) or abs(theta) > max_abs_theta:
        raise AngleOutOfRangeError(f"|theta| must be <= {max_abs_theta}, got {theta}")
    if theta == 0.0:
        return RotatedImage(img, np.ones(img.data.shape, dtype=bool), 0.0)
    sx, sy = _rotation_sources(img.width, img.height, theta)
    values, valid = bilinear_sample(img.data, sx, sy)
    valid.setflags(write=False)
    return RotatedImage(ImageGrid(np.clip(values, 0.0, 1.0)), valid, float(theta))


def _worst_extent(a: float, b: float, theta_max: float) -> float:
    """max over |t| <= theta_max of a*cos(t) + b*|sin(t)|  (a, b >= 0)."""
    t = math.radians(theta_max)
    peak = math.atan2(b, a)
    if peak <= t:
        return math.hypot(a, b)
    return a * math.cos(t) + b * math.sin(t)


def valid_region(width: int, height: int, max_theta: float, h: int) -> PixelRect:
    """Centered pixel rectangle whose patches stay in bounds for all |theta| <= max_theta.

    The rectangle of patch footprints has the image's aspect ratio and is
    shrunk until every corner of it, rotated by any angle in range, maps
    inside ``[0, w-1] x [0, h-1]``; a pixel qualifies when its whole
    ``(2h+1)^2`` window lies in that rectangle.
    """
    if max_theta < 0 or h < 0:
        raise ValueError("max_theta and h must be non-negative")
    if max_theta > MAX_ABS_THETA:
        raise AngleOutOfRangeError(f"max_theta must be <= {MAX_ABS_THETA}")
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    scale = 1.0
    if max_theta > 0:
        wx = _worst_extent(cx, cy, max_theta)
        wy = _worst_extent(cy, cx, max_theta)
        if wx > 0:
            scale = min(scale, cx / wx)
        if wy > 0:
            scale = min(scale, cy / wy)
        scale *= 1.0 - 1e-12
    ax, ay = scale * cx, scale * cy
    # unrotated case: boundaries are exact half-integers, allow equality
    eps = 1e-9 if max_theta == 0 else 0.0
    x0 = math.ceil(cx - ax + h - eps)
    x1 = math.floor(cx + ax - h + eps)
    y0 = math.ceil(cy - ay + h - eps)
    y1 = math.floor(cy + ay - h + eps)
    if x0 > x1 or y0 > y1:
        raise EmptyRegionError(
            f"no pixel of a {width}x{height} image keeps a radius-{h} patch in bounds up to {max_theta} deg"
        )
    return PixelRect(x0, x1, y0, y1)
