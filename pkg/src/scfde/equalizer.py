"""Per-bin MMSE and ZF equalization, decision-point SINR and the slicer."""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEigenvalue, DimensionMismatch


class EqualizerKind(enum.Enum):
    MMSE = "mmse"
    ZF = "zf"


@dataclass(frozen=True)
class Constellation:
    """Unit-energy PSK points ``exp(j 2 pi m / order)``."""

    points: np.ndarray

    @classmethod
    def psk(cls, bits):
        if int(bits) != bits or bits < 1:
            raise ValueError("PSK needs a positive integer number of bits")
        order = 1 << int(bits)
        return cls(np.exp(2j * np.pi * np.arange(order) / order))

    @property
    def order(self):
        return self.points.size

    @property
    def bits(self):
        return int(np.log2(self.order))


@dataclass(frozen=True)
class ResidualNoiseStats:
    """Moments of ``n_tilde = y_tilde - sqrt(snr) x`` for MMSE equalization.

    ``mean`` is the deterministic residual-ISI term for the given block,
    ``diag_cov`` the diagonal of ``E[n n^H]`` averaged over unit-power
    symbols, and ``variance`` the noise-only variance at every position.
    """

    mean: np.ndarray
    diag_cov: np.ndarray
    variance: float


def _require_nonzero(gains):
    if np.any(gains == 0):
        raise DegenerateEigenvalue("zero-forcing cannot invert a zero frequency bin")


def fde_coefficients(fr, snr, kind):
    lam = fr.lam
    if kind is EqualizerKind.MMSE:
        return np.conj(lam) / (np.abs(lam) ** 2 + 1.0 / snr)
    _require_nonzero(fr.gains)
    return 1.0 / lam


def equalize(y, coeffs):
    """DFT, per-bin multiply, inverse DFT."""
    y = np.asarray(y, dtype=complex)
    if y.shape[-1] != np.shape(coeffs)[-1]:
        raise DimensionMismatch("received block and coefficients differ in length")
    return np.fft.ifft(coeffs * np.fft.fft(y, axis=-1), axis=-1)


def harmonic_mean_term(gains, snr, kind):
    """The per-realization average that the SINR formulas invert.

    MMSE: ``mean_k 1 / (1 + snr |lambda_k|^2)``; ZF: ``mean_k 1 / (snr |lambda_k|^2)``.
    Reduces over the last axis, so ``gains`` may hold many realizations.
    """
    if kind is EqualizerKind.MMSE:
        return np.mean(1.0 / (1.0 + snr * gains), axis=-1)
    _require_nonzero(gains)
    return np.mean(1.0 / (snr * gains), axis=-1)


def sinr_from_gains(gains, snr, kind):
    t = harmonic_mean_term(gains, snr, kind)
    if kind is EqualizerKind.MMSE:
        return 1.0 / t - 1.0
    return 1.0 / t


def decision_sinr(fr, snr, kind):
    """Unbiased decision-point SINR, identical for every symbol of the block."""
    return float(sinr_from_gains(fr.gains, snr, kind))


def residual_noise_stats(fr, snr, x):
    x = np.asarray(x, dtype=complex)
    if x.shape != (fr.block_length,):
        raise DimensionMismatch(f"expected {fr.block_length} symbols")
    gains = fr.gains
    denom = snr * gains + 1.0
    # W H_eq - I is diagonal in frequency with entries -1 / (snr |lambda|^2 + 1)
    mean = -np.sqrt(snr) * np.fft.ifft(np.fft.fft(x) / denom)
    diag_cov = np.full(fr.block_length, np.mean(snr / denom))
    variance = float(np.mean(snr ** 2 * gains / denom ** 2))
    return ResidualNoiseStats(mean, diag_cov, variance)


def slicer(y_hat, snr, constellation):
    """Nearest-point hard decisions on ``y_hat / sqrt(snr)``; ties go to the lowest index."""
    z = np.asarray(y_hat, dtype=complex) / np.sqrt(snr)
    dist = np.abs(z[..., None] - constellation.points) ** 2
    return np.argmin(dist, axis=-1)
