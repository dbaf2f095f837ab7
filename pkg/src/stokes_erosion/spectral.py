"""Spectral primitives on uniform periodic grids over [0, 2*pi).

All signals are sampled at alpha_j = 2*pi*j/n. Spectra use the numpy FFT
layout and are stored as coefficients c_k such that

    f(alpha) = sum_k c_k exp(i*k*alpha),   c = fft(f)/n.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "wavenumbers",
    "to_spectrum",
    "from_spectrum",
    "enforce_real",
    "diff",
    "diff_spectrum",
    "antiderivative",
    "gaussian_filter",
    "upsample",
    "eval_series",
]


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers k = -n/2 ... n/2-1 in FFT order."""
    return np.fft.fftfreq(n, d=1.0 / n)


def to_spectrum(f: np.ndarray) -> np.ndarray:
    return np.fft.fft(f) / len(f)


def from_spectrum(c: np.ndarray) -> np.ndarray:
    return np.real(np.fft.ifft(c) * len(c))


def enforce_real(c: np.ndarray) -> np.ndarray:
    """Project a spectrum onto conjugate symmetry (real-valued signal)."""
    n = len(c)
    idx = (-np.arange(n)) % n
    return 0.5 * (c + np.conj(c[idx]))


def diff_spectrum(c: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of a spectrum with respect to alpha."""
    n = len(c)
    k = wavenumbers(n)
    ik = (1j * k) ** order
    if order % 2 == 1:
        # the Nyquist mode has no well-defined odd derivative on a real grid
        ik[n // 2] = 0.0
    return c * ik


def diff(f: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of real samples with respect to alpha."""
    return from_spectrum(diff_spectrum(to_spectrum(f), order))


def antiderivative(f: np.ndarray) -> np.ndarray:
    """Zero-mean periodic antiderivative of the zero-mean part of f."""
    c = to_spectrum(f)
    n = len(f)
    k = wavenumbers(n)
    out = np.zeros_like(c)
    nz = k != 0
    out[nz] = c[nz] / (1j * k[nz])
    out[n // 2] = 0.0
    return from_spectrum(out)


def gaussian_filter(f: np.ndarray, sigma: float) -> np.ndarray:
    """Periodic Gaussian convolution, exp(-k^2 sigma^2 / 2) in spectral space.

    Preserves the mean exactly (k = 0 factor is 1).
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if not np.all(np.isfinite(f)):
        raise ValueError("non-finite input signal")
    if sigma == 0.0:
        return np.asarray(f, dtype=float).copy()
    k = wavenumbers(len(f))
    return from_spectrum(to_spectrum(f) * np.exp(-0.5 * (k * sigma) ** 2))


def upsample(f: np.ndarray, rate: int) -> np.ndarray:
    """Fourier interpolation of real samples onto a rate*n uniform grid."""
    if rate == 1:
        return np.asarray(f, dtype=float).copy()
    n = len(f)
    c = np.fft.fft(f)
    m = rate * n
    cpad = np.zeros(m, dtype=complex)
    cpad[: n // 2] = c[: n // 2]
    cpad[-(n // 2) :] = c[-(n // 2) :]
    # split the (real) Nyquist coefficient symmetrically
    cpad[n // 2] = 0.5 * c[n // 2]
    cpad[-(n // 2)] += 0.5 * c[n // 2]
    return np.real(np.fft.ifft(cpad)) * rate


def eval_series(c: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric series with spectrum c at arbitrary alpha."""
    n = len(c)
    k = wavenumbers(n)
    phase = np.exp(1j * np.outer(np.atleast_1d(alpha), k))
    out = np.real(phase @ c)
    return out if np.ndim(alpha) else float(out[0])
