"""Channel realizations and the spectral view of the cyclic-prefix channel.

Vectors are in ascending time order, ``x[0]`` being the first payload symbol.
With a cyclic prefix of ``nu`` symbols the block sees the circulant channel
``H_eq[t, s] = h[(t - s) mod L]``, whose eigenvalues are the L-point DFT of
the zero-padded taps.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BlockTooShort, DegenerateEigenvalue, DimensionMismatch
from .streams import complex_normal


@dataclass(frozen=True)
class ChannelTaps:
    """One realization of the taps ``h_0 ... h_nu``."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.atleast_1d(np.asarray(self.taps, dtype=complex))
        if taps.ndim != 1 or taps.size == 0:
            raise ValueError("taps must be a non-empty 1-D sequence")
        object.__setattr__(self, "taps", taps)

    @property
    def memory(self):
        return self.taps.size - 1


@dataclass(frozen=True)
class FrequencyResponse:
    """The L eigenvalues of the equivalent circulant channel."""

    lam: np.ndarray
    block_length: int
    memory: int

    @property
    def gains(self):
        """Per-bin power gains ``|lambda_k|^2``."""
        return np.abs(self.lam) ** 2


@dataclass(frozen=True)
class ExponentialOrders:
    alpha: np.ndarray
    snr: float
    m_count: int


def draw_channel(memory, rng):
    """Draw ``memory + 1`` i.i.d. CN(0, 1) taps from ``rng``."""
    if memory < 0:
        raise ValueError("memory must be non-negative")
    return ChannelTaps(complex_normal(rng, memory + 1))


def _check_block(memory, block_length):
    if block_length < memory + 1:
        raise BlockTooShort(
            f"block length must be at least nu+1 (got L={block_length}, nu={memory})")


def frequency_response(taps, block_length):
    """Eigenvalues ``lambda_k = sum_i h_i exp(-j 2 pi i k / L)``, k = 0..L-1."""
    h = taps.taps if isinstance(taps, ChannelTaps) else np.asarray(taps, dtype=complex)
    memory = h.size - 1
    _check_block(memory, block_length)
    return FrequencyResponse(np.fft.fft(h, n=block_length), block_length, memory)


def batch_gains(taps, block_length):
    """``|lambda|^2`` for a stack of tap vectors with shape (n, nu + 1)."""
    _check_block(taps.shape[-1] - 1, block_length)
    lam = np.fft.fft(taps, n=block_length, axis=-1)
    return lam.real ** 2 + lam.imag ** 2


def circulant_matrix(taps, block_length):
    """Explicit ``H_eq``; used for checks, the library itself never builds it."""
    h = taps.taps if isinstance(taps, ChannelTaps) else np.asarray(taps, dtype=complex)
    _check_block(h.size - 1, block_length)
    col = np.zeros(block_length, dtype=complex)
    col[: h.size] = h
    idx = (np.arange(block_length)[:, None] - np.arange(block_length)[None, :]) % block_length
    return col[idx]


def circulant_apply(taps, block_length, x):
    """Compute ``H_eq @ x`` through the DFT."""
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != block_length:
        raise DimensionMismatch(f"expected {block_length} samples, got {x.shape[-1]}")
    fr = frequency_response(taps, block_length)
    return np.fft.ifft(fr.lam * np.fft.fft(x, axis=-1), axis=-1)


def add_cyclic_prefix(x, memory):
    if memory == 0:
        return x
    return np.concatenate([x[..., -memory:], x], axis=-1)


def cp_convolve(h, x):
    """Noiseless CP channel: prefix, linear convolution, prefix removal.

    ``h`` has shape (..., nu + 1) and ``x`` shape (..., L); leading axes
    broadcast, so a whole block of trials goes through in one call.
    """
    memory = h.shape[-1] - 1
    L = x.shape[-1]
    _check_block(memory, L)
    xcp = add_cyclic_prefix(x, memory)
    y = np.zeros(np.broadcast_shapes(h.shape[:-1], x.shape[:-1]) + (L,), dtype=complex)
    # received sample t (after stripping nu samples) is sum_i h_i xcp[nu + t - i]
    for i in range(memory + 1):
        y += h[..., i : i + 1] * xcp[..., memory - i : memory - i + L]
    return y


def cp_transmit(taps, x, snr, noise_rng=None):
    """Send one block through the cyclic-prefix channel.

    Returns ``sqrt(snr) * H_eq @ x + n`` with ``n`` drawn CN(0, 1) from
    ``noise_rng``. Pass ``noise_rng=None`` for a noiseless channel.
    """
    h = taps.taps if isinstance(taps, ChannelTaps) else np.asarray(taps, dtype=complex)
    x = np.asarray(x, dtype=complex)
    y = np.sqrt(snr) * cp_convolve(h, x)
    if noise_rng is not None:
        y = y + complex_normal(noise_rng, y.shape)
    return y


def exponential_orders(fr, snr):
    """Per-bin fading exponents ``alpha_k = -log|lambda_k|^2 / log snr``."""
    if snr <= 1:
        raise ValueError("exponential orders need snr > 1")
    gains = fr.gains
    if np.any(gains == 0):
        raise DegenerateEigenvalue("a frequency bin is exactly zero")
    alpha = -np.log(gains) / np.log(snr)
    return ExponentialOrders(alpha, float(snr), int(np.count_nonzero(alpha > 1)))
