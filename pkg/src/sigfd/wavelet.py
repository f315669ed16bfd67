"""Multi-level 2-D discrete wavelet transform over orthonormal filter banks.

Analysis convention: correlate with the filter under periodic (circular)
extension and keep the even phase, y[k] = sum_t f[t] * x[(2k + t) mod n].
Synthesis is the adjoint scatter, which gives exact reconstruction for
any even extent because periodization preserves the even-lag
orthonormality of the bank.

Rows (the x axis) are filtered before columns (the y axis), so the `h`
detail plane is low-pass in x and high-pass in y (horizontal strokes),
`v` is the transpose, and `d` is high-pass in both.

Filter taps are float64 evaluations of exact spectral factorizations of
the maximally flat half-band polynomial: minimum phase for the dbN
families, the least-asymmetric factor for sym8.  Each lowpass is listed
in ascending scaling-sequence order; the matching highpass is derived on
demand by alternating-sign reversal.
"""

import dataclasses
from enum import Enum

import numpy as np

from .errors import BadLevels, MalformedDecomposition, OddDimension
from .imaging import GrayImage


class WaveletFamily(Enum):
    HAAR = "haar"
    DB2 = "db2"
    DB8 = "db8"
    DB15 = "db15"
    SYM8 = "sym8"

    @classmethod
    def parse(cls, name: str) -> "WaveletFamily":
        try:
            return cls(name.strip().lower())
        except ValueError:
            known = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown wavelet family {name!r}, expected one of: {known}") from None


_HAAR_LOWPASS = (
    0.7071067811865476,
    0.7071067811865476,
)

_DB2_LOWPASS = (
    0.48296291314453416,
    0.8365163037378079,
    0.2241438680420134,
    -0.12940952255126037,
)

_DB8_LOWPASS = (
    0.05441584224310401,
    0.31287159091429995,
    0.6756307362972898,
    0.5853546836542067,
    -0.015829105256349306,
    -0.2840155429615469,
    0.0004724845739132828,
    0.12874742662047847,
    -0.017369301001807547,
    -0.044088253930794755,
    0.013981027917398282,
    0.008746094047405777,
    -0.004870352993451574,
    -0.00039174037337694705,
    0.0006754494064505693,
    -0.00011747678412476953,
)

_DB15_LOWPASS = (
    0.004538537361578899,
    0.04674339489276627,
    0.20602386398699574,
    0.4926317717081396,
    0.6458131403574243,
    0.3390025354547315,
    -0.19320413960914543,
    -0.28888259656696563,
    0.06528295284877282,
    0.190146714007123,
    -0.039666176555790945,
    -0.1111209360372317,
    0.033877143923507685,
    0.05478055058450761,
    -0.025767007328439964,
    -0.020810050169693083,
    0.015083918027835902,
    0.005101000360407543,
    -0.006487734560315745,
    -0.00024175649076162427,
    0.0019433239803822114,
    -0.000373482354137617,
    -0.0003595652443624688,
    0.00015589648992059973,
    2.5792699155318936e-05,
    -2.8133296266047814e-05,
    3.36298718173758e-06,
    1.8112704079405772e-06,
    -6.316882325881664e-07,
    6.133359913305752e-08,
)

_SYM8_LOWPASS = (
    0.001889950332767689,
    -0.0003029205147241331,
    -0.014952258337062199,
    0.0038087520138944896,
    0.04913717967373029,
    -0.027219029917103486,
    -0.0519458381078818,
    0.36444189483617895,
    0.777185751699628,
    0.4813596512590534,
    -0.061273359067811076,
    -0.14329423835127267,
    0.007607487324976609,
    0.03169508781152599,
    -0.0005421323318000107,
    -0.0033824159510050028,
)

_LOWPASS_TAPS = {
    WaveletFamily.HAAR: _HAAR_LOWPASS,
    WaveletFamily.DB2: _DB2_LOWPASS,
    WaveletFamily.DB8: _DB8_LOWPASS,
    WaveletFamily.DB15: _DB15_LOWPASS,
    WaveletFamily.SYM8: _SYM8_LOWPASS,
}


@dataclasses.dataclass(frozen=True, eq=False)
class FilterPair:
    """Analysis lowpass/highpass taps of one orthonormal bank."""

    lowpass: np.ndarray
    highpass: np.ndarray


def analysis_filters(family: WaveletFamily) -> FilterPair:
    """Quadrature-mirror pair for a family: g[k] = (-1)^k h[L-1-k]."""
    h = np.array(_LOWPASS_TAPS[family])
    g = (-1.0) ** np.arange(h.size) * h[::-1]
    return FilterPair(h, g)


@dataclasses.dataclass(frozen=True, eq=False)
class DetailSet:
    """The three detail planes of one level: h, v, d orientation."""

    h: np.ndarray
    v: np.ndarray
    d: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class WaveletDecomposition:
    """Approximation plane plus per-level details, finest level first."""

    family: WaveletFamily
    levels: int
    approx: np.ndarray
    details: tuple[DetailSet, ...]


def _analyze(x: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    idx = (2 * np.arange(n // 2)[:, None] + np.arange(taps.size)) % n
    y = x[..., idx] @ taps
    return np.moveaxis(y, -1, axis)


def _synthesize(y: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    y = np.moveaxis(y, axis, -1)
    m = y.shape[-1]
    out = np.zeros(y.shape[:-1] + (2 * m,))
    base = 2 * np.arange(m)
    for t, c in enumerate(taps):
        # stride-2 indices are distinct mod 2m, so += has no collisions
        out[..., (base + t) % (2 * m)] += c * y
    return np.moveaxis(out, -1, axis)


def dwt2_level(plane: np.ndarray, filters: FilterPair):
    """One analysis step: returns (approx, h, v, d) at half extent."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise OddDimension("plane must be 2-D")
    for n in plane.shape:
        if n < 2 or n % 2:
            raise OddDimension(f"plane extents must be even and >= 2, got {plane.shape}")
    lo = _analyze(plane, filters.lowpass, axis=1)
    hi = _analyze(plane, filters.highpass, axis=1)
    ll = _analyze(lo, filters.lowpass, axis=0)
    lh = _analyze(lo, filters.highpass, axis=0)
    hl = _analyze(hi, filters.lowpass, axis=0)
    hh = _analyze(hi, filters.highpass, axis=0)
    return ll, lh, hl, hh


def dwt2_multi(img: GrayImage, family: WaveletFamily, levels: int) -> WaveletDecomposition:
    """Iterate `dwt2_level` on the approximation `levels` times."""
    if not isinstance(levels, int) or levels < 1:
        raise BadLevels(f"levels must be an integer >= 1, got {levels!r}")
    h, w = img.pixels.shape
    step = 1 << levels
    if h % step or w % step:
        raise BadLevels(f"{w}x{h} image does not support {levels} halvings")
    filters = analysis_filters(family)
    plane = img.pixels.astype(np.float64)
    details = []
    for _ in range(levels):
        plane, lh, hl, hh = dwt2_level(plane, filters)
        details.append(DetailSet(lh, hl, hh))
    return WaveletDecomposition(family, levels, plane, tuple(details))


def idwt2(dec: WaveletDecomposition) -> np.ndarray:
    """Invert a decomposition back to the full-resolution float plane."""
    if dec.levels != len(dec.details) or dec.levels < 1:
        raise MalformedDecomposition(
            f"declared {dec.levels} levels but carry {len(dec.details)} detail sets")
    filters = analysis_filters(dec.family)
    plane = np.asarray(dec.approx, dtype=np.float64)
    for level in reversed(dec.details):
        for band in (level.h, level.v, level.d):
            if np.asarray(band).shape != plane.shape:
                raise MalformedDecomposition(
                    f"detail shape {np.asarray(band).shape} != approx shape {plane.shape}")
        lo = _synthesize(plane, filters.lowpass, 0) + _synthesize(level.h, filters.highpass, 0)
        hi = _synthesize(level.v, filters.lowpass, 0) + _synthesize(level.d, filters.highpass, 0)
        plane = _synthesize(lo, filters.lowpass, 1) + _synthesize(hi, filters.highpass, 1)
    return plane


def subband_images(dec: WaveletDecomposition) -> list[tuple[str, GrayImage]]:
    """Subband planes rescaled to uint8 for inspection.

    Each plane is mapped affinely so its min..max spans 0..255; a constant
    plane maps to mid-gray.  Names: approx, then h1/v1/d1 for the finest
    level onward.
    """
    named = [("approx", dec.approx)]
    for i, level in enumerate(dec.details, start=1):
        named += [(f"h{i}", level.h), (f"v{i}", level.v), (f"d{i}", level.d)]
    out = []
    for name, plane in named:
        lo, hi = float(plane.min()), float(plane.max())
        if hi == lo:
            px = np.full(plane.shape, 128, dtype=np.uint8)
        else:
            px = np.rint((plane - lo) * (255.0 / (hi - lo))).astype(np.uint8)
        out.append((name, GrayImage(px)))
    return out
