"""Similarity-invariant Fourier features over wavelet approximation planes.

The coarsest approximation plane is scanned row-major into a 1-D
sequence, transformed with a radix-2 FFT, and normalized so that the
retained magnitudes ignore where the scan started, any global intensity
gain, and any constant offset: a circular shift only rotates phases, a
gain cancels in the a[n]/a[1] ratio, and an offset lives entirely in
a[0], which is dropped.
"""

import dataclasses
from pathlib import Path

import numpy as np

from .errors import BadLength, DegenerateDescriptor, FormatError, IoError
from .imaging import GrayImage, PreprocessConfig, preprocess
from .wavelet import WaveletDecomposition, WaveletFamily, dwt2_multi

NORMALIZER_EPS = 1e-12

# 1-D real scan of a coefficient plane; length is a power of two, at least 4.
CoefficientSequence = np.ndarray
# Complex spectrum of a CoefficientSequence, same length; real input gives
# conjugate symmetry a[N-n] == conj(a[n]).
FourierCoefficients = np.ndarray


@dataclasses.dataclass(frozen=True)
class DescriptorMeta:
    """Extraction parameters a descriptor must share to be comparable."""

    family: WaveletFamily | None
    levels: int | None
    k: int


@dataclasses.dataclass(frozen=True, eq=False)
class FourierDescriptor:
    """`k` nonnegative magnitudes plus the parameters that produced them."""

    magnitudes: np.ndarray
    meta: DescriptorMeta

    def __post_init__(self):
        mags = np.asarray(self.magnitudes, dtype=np.float64)
        if mags.ndim != 1 or mags.size != self.meta.k or self.meta.k < 1:
            raise ValueError("magnitudes must be 1-D of length meta.k")
        if not np.all(np.isfinite(mags)) or mags.min() < 0:
            raise ValueError("magnitudes must be finite and nonnegative")
        object.__setattr__(self, "magnitudes", mags)


@dataclasses.dataclass(frozen=True)
class SimilarityTransform:
    """Rotation (radians), scale, translation, and scan-start shift."""

    rotation: float = 0.0
    scale: float = 1.0
    translation: tuple[float, float] = (0.0, 0.0)
    start_shift: int = 0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")


@dataclasses.dataclass(frozen=True)
class PipelineConfig:
    """End-to-end extraction parameters."""

    family: WaveletFamily = WaveletFamily.SYM8
    levels: int = 3
    k: int = 64
    preprocess: PreprocessConfig = PreprocessConfig()

    @property
    def meta(self) -> DescriptorMeta:
        return DescriptorMeta(self.family, self.levels, self.k)


def serialize_coefficients(dec: WaveletDecomposition) -> CoefficientSequence:
    """Row-major scan of the coarsest approximation plane."""
    return np.asarray(dec.approx, dtype=np.float64).ravel()


def _bit_reverse_permutation(n: int) -> np.ndarray:
    rev = np.zeros(n, dtype=np.intp)
    half, step = 1, n >> 1
    while half < n:
        rev[half:2 * half] = rev[:half] + step
        half <<= 1
        step >>= 1
    return rev


def _fft_radix2(x: np.ndarray) -> np.ndarray:
    n = x.size
    y = x[_bit_reverse_permutation(n)]
    m = 1
    while m < n:
        twiddle = np.exp(-1j * np.pi * np.arange(m) / m)
        blocks = y.reshape(-1, 2 * m)
        even = blocks[:, :m].copy()
        odd = blocks[:, m:] * twiddle
        blocks[:, :m] = even + odd
        blocks[:, m:] = even - odd
        m <<= 1
    return y


def dft(sequence: CoefficientSequence) -> FourierCoefficients:
    """Normalized spectrum a[n] = (1/N) sum_t u(t) exp(-2j pi n t / N).

    N must be a power of two, at least 4.
    """
    u = np.asarray(sequence, dtype=np.float64)
    n = u.size
    if u.ndim != 1 or n < 4 or n & (n - 1):
        raise BadLength(f"need a 1-D power-of-two sequence of length >= 4, got shape {u.shape}")
    return _fft_radix2(u.astype(np.complex128)) / n


def normalize_descriptor(spectrum: FourierCoefficients, k: int,
                         family: WaveletFamily | None = None,
                         levels: int | None = None) -> FourierDescriptor:
    """Retain |a[n] / a[1]| for n = 2 .. k+1.

    Dividing by a[1] rather than a[0] removes gain (and the phases that a
    start shift introduces) while staying well-defined for zero-mean
    sequences; dropping a[0] removes any constant offset.  |a[1]| below
    NORMALIZER_EPS means there is no carrier to normalize against.
    """
    a = np.asarray(spectrum, dtype=np.complex128)
    n = a.size
    if a.ndim != 1 or not 2 <= k <= n - 2:
        raise BadLength(f"need 2 <= k <= N-2, got k={k!r} with N={n}")
    if abs(a[1]) <= NORMALIZER_EPS:
        raise DegenerateDescriptor(
            f"|a[1]| = {abs(a[1]):.3e} is below {NORMALIZER_EPS:.0e}; "
            "sequence has no usable fundamental")
    return FourierDescriptor(np.abs(a[2:k + 2] / a[1]),
                             DescriptorMeta(family, levels, k))


def extract_features(img: GrayImage, config: PipelineConfig = PipelineConfig()) -> FourierDescriptor:
    """Full chain: preprocess, decompose, transform, normalize."""
    pre = preprocess(img, config.preprocess)
    dec = dwt2_multi(pre, config.family, config.levels)
    spectrum = dft(serialize_coefficients(dec))
    return normalize_descriptor(spectrum, config.k, family=config.family, levels=config.levels)


# --- descriptor files --------------------------------------------------------

_MAGIC = "SIGFD"
_VERSION = "v1"


def save_descriptor(fd: FourierDescriptor, path) -> None:
    """Write one descriptor as text: a header line, then one float per line.

    Floats are written with shortest round-trip repr, so a load returns
    bit-identical values.
    """
    meta = fd.meta
    if meta.family is None or meta.levels is None:
        raise ValueError("descriptor must carry family and levels to be saved")
    lines = [f"{_MAGIC} {_VERSION} {meta.family.value} {meta.levels} {meta.k}"]
    lines += [repr(float(v)) for v in fd.magnitudes]
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load_descriptor(path) -> FourierDescriptor:
    try:
        text = Path(path).read_text(encoding="ascii")
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"{path}: empty descriptor file")
    fields = lines[0].split()
    if len(fields) != 5 or fields[0] != _MAGIC or fields[1] != _VERSION:
        raise FormatError(f"{path}: bad descriptor header {lines[0]!r}")
    try:
        family = WaveletFamily.parse(fields[2])
        levels = int(fields[3])
        k = int(fields[4])
        values = [float(s) for s in lines[1:]]
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if levels < 1 or k < 1:
        raise FormatError(f"{path}: bad header values levels={levels} k={k}")
    if len(values) != k:
        raise FormatError(f"{path}: header says {k} magnitudes, file has {len(values)}")
    mags = np.array(values)
    if not np.all(np.isfinite(mags)) or (mags < 0).any():
        raise FormatError(f"{path}: magnitudes must be finite and nonnegative")
    return FourierDescriptor(mags, DescriptorMeta(family, levels, k))
