"""Grayscale rasters and the signature preprocessing chain.

Covers binary PGM (P5) reading and writing, median denoising, Otsu
binarization, second-moment slant estimation, rotation and rescaling by
inverse-mapped bilinear resampling, and `preprocess`, which chains them
into the canonical form consumed by feature extraction.

Convention used throughout: 0 is ink, 255 is paper, and image arrays are
indexed (row, column) while geometric math uses (x, y) = (column, row).
"""

import dataclasses
import math
from pathlib import Path

import numpy as np

from .errors import BadTarget, BadWindow, FormatError, IoError, TooFewPixels

BACKGROUND = 255

_WHITESPACE = (9, 10, 11, 12, 13, 32)


@dataclasses.dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale raster; `pixels` is a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("pixels must be 2-D with positive dimensions")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclasses.dataclass(frozen=True, eq=False)
class ForegroundMask:
    """Boolean ink map; True marks foreground.

    `degenerate` is set when the source image was constant, in which case
    the mask is all background and downstream steps that need ink should
    be skipped rather than fed an arbitrary threshold.
    """

    bits: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError("mask must be 2-D")
        object.__setattr__(self, "bits", bits)

    @property
    def count(self) -> int:
        return int(self.bits.sum())


def _power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclasses.dataclass(frozen=True)
class PreprocessConfig:
    """Knobs for the preprocessing chain.

    target_size is (width, height) and both extents must be powers of two
    so the wavelet stage can halve them cleanly.  binarize_threshold
    overrides Otsu when set; slant_enabled switches the rotation step.
    """

    median_window: int = 3
    target_size: tuple[int, int] = (256, 256)
    slant_enabled: bool = True
    binarize_threshold: int | None = None

    def __post_init__(self):
        w = self.median_window
        if not isinstance(w, int) or w < 1 or w % 2 == 0:
            raise BadWindow(f"median window must be an odd integer >= 1, got {w!r}")
        tw, th = self.target_size
        if not (_power_of_two(tw) and _power_of_two(th)):
            raise BadTarget(f"target size must be powers of two, got {self.target_size!r}")
        t = self.binarize_threshold
        if t is not None and not (isinstance(t, int) and 0 <= t <= 255):
            raise ValueError(f"threshold must be None or an int in [0, 255], got {t!r}")


# --- PGM I/O ----------------------------------------------------------------

def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == 0x23:  # '#' comment runs to end of line
            while pos < n and data[pos] not in (10, 13):
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in _WHITESPACE:
        pos += 1
    if start == pos:
        raise FormatError("truncated PGM header")
    return data[start:pos], pos


def _header_int(token: bytes, what: str) -> int:
    if not token.isdigit():
        raise FormatError(f"bad PGM {what}: {token!r}")
    return int(token)


def load_image(path) -> GrayImage:
    """Read a binary (P5) PGM file with maxval 255."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise FormatError(f"unsupported magic {magic!r}, expected P5")
    width, pos = _next_token(data, pos)
    height, pos = _next_token(data, pos)
    maxval, pos = _next_token(data, pos)
    w = _header_int(width, "width")
    h = _header_int(height, "height")
    if w < 1 or h < 1:
        raise FormatError(f"bad PGM dimensions {w}x{h}")
    if _header_int(maxval, "maxval") != 255:
        raise FormatError(f"unsupported maxval {maxval.decode()}, expected 255")
    pos += 1  # single whitespace byte separates header from raster
    if len(data) - pos < w * h:
        raise FormatError(f"truncated PGM raster, need {w * h} bytes")
    px = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos)
    return GrayImage(px.reshape(h, w).copy())


def save_image(img: GrayImage, path) -> None:
    """Write a binary (P5) PGM file with maxval 255."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    try:
        Path(path).write_bytes(header + img.pixels.tobytes())
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# --- denoising and binarization ---------------------------------------------

def median_filter(img: GrayImage, window: int = 3) -> GrayImage:
    """Median over a window x window neighborhood, edges replicated."""
    if not isinstance(window, int) or window < 1 or window % 2 == 0:
        raise BadWindow(f"median window must be an odd integer >= 1, got {window!r}")
    if window == 1:
        return GrayImage(img.pixels.copy())
    pad = window // 2
    padded = np.pad(img.pixels, pad, mode="edge")
    view = np.lib.stride_tricks.sliding_window_view(padded, (window, window))
    med = np.median(view.reshape(img.height, img.width, -1), axis=2)
    return GrayImage(med.astype(np.uint8))


def otsu_threshold(pixels: np.ndarray) -> int:
    """Between-class-variance-maximizing threshold in [1, 255].

    Pixels strictly below the returned value are foreground.  Ties go to
    the smallest threshold.  Caller must ensure the histogram has two
    nonempty classes for some threshold (i.e. the image is not constant).
    """
    hist = np.bincount(np.asarray(pixels, dtype=np.uint8).ravel(), minlength=256)
    hist = hist.astype(np.float64)
    csum = np.cumsum(hist)
    msum = np.cumsum(hist * np.arange(256))
    w0 = csum[:-1]
    w1 = csum[-1] - w0
    s0 = msum[:-1]
    s1 = msum[-1] - s0
    valid = (w0 > 0) & (w1 > 0)
    var = np.zeros(255)
    var[valid] = w0[valid] * w1[valid] * (s0[valid] / w0[valid] - s1[valid] / w1[valid]) ** 2
    return int(np.argmax(var)) + 1


def binarize(img: GrayImage, threshold: int | None = None) -> ForegroundMask:
    """Ink mask: pixel < threshold.  threshold=None selects Otsu's.

    A constant image has no ink/paper separation under any threshold, so
    it yields an all-background mask flagged degenerate instead of an
    arbitrary split.
    """
    px = img.pixels
    if px.min() == px.max():
        return ForegroundMask(np.zeros(px.shape, dtype=bool), degenerate=True)
    if threshold is None:
        threshold = otsu_threshold(px)
    elif not (isinstance(threshold, int) and 0 <= threshold <= 255):
        raise ValueError(f"threshold must be in [0, 255], got {threshold!r}")
    return ForegroundMask(px < threshold)


# --- geometry ---------------------------------------------------------------

def estimate_orientation(mask: ForegroundMask) -> float:
    """Dominant axis angle of the foreground, radians in (-pi/2, pi/2].

    Positive angles lean toward increasing row for increasing column.
    Isotropic foregrounds report 0.
    """
    ys, xs = np.nonzero(mask.bits)
    if xs.size < 2:
        raise TooFewPixels(f"orientation needs >= 2 foreground pixels, got {xs.size}")
    x = xs - xs.mean()
    y = ys - ys.mean()
    mu20 = float((x * x).sum())
    mu02 = float((y * y).sum())
    mu11 = float((x * y).sum())
    # + 0.0 folds a signed zero so the isotropic case lands on atan2(0, .) = 0 or pi
    return 0.5 * math.atan2(2.0 * mu11 + 0.0, mu20 - mu02)


def _sample_bilinear(px: np.ndarray, xs: np.ndarray, ys: np.ndarray, fill: int) -> np.ndarray:
    h, w = px.shape
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = xs - x0
    fy = ys - y0
    out = np.zeros(xs.shape)
    for dy in (0, 1):
        wy = fy if dy else 1.0 - fy
        yi = y0 + dy
        for dx in (0, 1):
            wx = fx if dx else 1.0 - fx
            xi = x0 + dx
            v = np.full(xs.shape, float(fill))
            inb = (yi >= 0) & (yi < h) & (xi >= 0) & (xi < w)
            v[inb] = px[yi[inb], xi[inb]]
            out += wy * wx * v
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def warp_similarity(img: GrayImage, rotation: float = 0.0, scale: float = 1.0,
                    translation: tuple[float, float] = (0.0, 0.0)) -> GrayImage:
    """Rotate/scale about the image center, then translate by (dx, dy) pixels.

    Output keeps the input geometry; uncovered pixels read BACKGROUND.
    Resampling is bilinear over the inverse map.  rotation is radians,
    positive toward increasing row for increasing column.
    """
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    dx, dy = float(translation[0]), float(translation[1])
    if rotation == 0.0 and scale == 1.0 and dx == 0.0 and dy == 0.0:
        return GrayImage(img.pixels.copy())
    h, w = img.pixels.shape
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    yy, xx = np.meshgrid(np.arange(h) - cy - dy, np.arange(w) - cx - dx, indexing="ij")
    ca, sa = math.cos(rotation), math.sin(rotation)
    xs = (ca * xx + sa * yy) / scale + cx
    ys = (-sa * xx + ca * yy) / scale + cy
    return GrayImage(_sample_bilinear(img.pixels, xs, ys, BACKGROUND))


def rotate(img: GrayImage, angle: float) -> GrayImage:
    """Rotate about the image center; see `warp_similarity`."""
    return warp_similarity(img, rotation=angle)


def scale_normalize(img: GrayImage, target_size: tuple[int, int]) -> GrayImage:
    """Resample to (width, height) with pixel-center alignment, edges clamped."""
    tw, th = target_size
    if tw < 1 or th < 1:
        raise BadTarget(f"target size must be positive, got {target_size!r}")
    h, w = img.pixels.shape
    if (tw, th) == (w, h):
        return GrayImage(img.pixels.copy())
    xs = np.clip((np.arange(tw) + 0.5) * (w / tw) - 0.5, 0.0, w - 1.0)
    ys = np.clip((np.arange(th) + 0.5) * (h / th) - 0.5, 0.0, h - 1.0)
    gx, gy = np.meshgrid(xs, ys)
    return GrayImage(_sample_bilinear(img.pixels, gx, gy, BACKGROUND))


# --- full chain ---------------------------------------------------------------

def preprocess(img: GrayImage, config: PreprocessConfig = PreprocessConfig()) -> GrayImage:
    """Denoise, deslant, and rescale a scanned signature.

    Median filter, then (when slant correction is enabled and the image
    carries enough ink to define an axis) rotate by the negated dominant
    angle, then resample to the configured target.  Binarization feeds the
    orientation estimate only; the output stays grayscale.
    """
    out = median_filter(img, config.median_window)
    if config.slant_enabled:
        mask = binarize(out, config.binarize_threshold)
        if not mask.degenerate and mask.count >= 2:
            theta = estimate_orientation(mask)
            if theta != 0.0:
                out = rotate(out, -theta)
    return scale_normalize(out, config.target_size)
