"""Offline signature recognition with wavelet-domain Fourier descriptors."""

__version__ = "0.1.0"
