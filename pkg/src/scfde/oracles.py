"""Numerical checks of the outage lemmas and of DFT interpolation.

These run independently of the sweep code paths they support: the tail
probabilities draw their own Gaussian variables, and the interpolation
routines rebuild fine-grid spectra from coarse samples without an FFT.
"""

from dataclasses import dataclass

import numpy as np

from . import streams
from .errors import InvalidConfig
from .montecarlo import (MIN_SUCCESSES, EstimatePoint, db_to_linear, default_window, fit_slope,
                         map_blocks)
from .spectrum import frequency_response

_SINGULAR = 1e-9


@dataclass(frozen=True)
class InterpolationWeights:
    """Weights mapping L coarse DFT samples onto the ``T * L`` fine grid."""

    gamma: np.ndarray  # shape (T * L, L)
    factor: int

    def apply(self, lam):
        return self.gamma @ np.asarray(lam)


@dataclass(frozen=True)
class TailResult:
    points: list
    fit: object


@dataclass(frozen=True)
class SlopePair:
    """Tail curves for the same taps at two block lengths."""

    points: list
    points_other: list
    fit: object
    fit_other: object

    @property
    def difference(self):
        return abs(self.fit.slope - self.fit_other.slope)


def _lemma1_block(n, m, snrs, seed, block, rows):
    rng = streams.stream(seed, streams.TAPS, block)
    lam = streams.complex_normal(rng, (rows, n))
    g = lam.real ** 2 + lam.imag ** 2
    counts = np.array([np.count_nonzero(np.sum(1.0 / (1.0 + s * g), axis=-1) > m)
                       for s in snrs], dtype=np.int64)
    return counts, 0


def lemma1_tail_probability(n, m, snr_db_grid, trials, seed, workers=1, max_points=3):
    """Estimate ``P[sum_k 1/(1 + snr |lambda_k|^2) > m]`` for n i.i.d. CN(0,1) variables.

    The returned fit uses the top ``max_points`` of the default window; it is
    ``None`` when fewer than two points have enough successes.
    """
    if not 0 < m < n:
        raise InvalidConfig(f"m must lie in (0, n) = (0, {n})")
    snrs = db_to_linear(snr_db_grid)
    counts, _ = map_blocks(_lemma1_block, trials, (n, m, snrs, seed), workers)
    points = [EstimatePoint.from_counts(db, int(c), trials) for db, c in zip(snr_db_grid, counts)]
    return TailResult(points, _try_fit(points, default_window(points, max_points=max_points)))


def _try_fit(points, window):
    if len(window) < 2:
        return None
    return fit_slope(points, window)


def _lemma2_block(memory, L, L2, m, snrs, seed, block, rows):
    rng = streams.stream(seed, streams.TAPS, block)
    taps = streams.complex_normal(rng, (rows, memory + 1))
    out = []
    for size in (L, L2):
        lam = np.fft.fft(taps, n=size, axis=-1)
        g = lam.real ** 2 + lam.imag ** 2
        out.append([np.count_nonzero(np.sum(1.0 / (1.0 + s * g), axis=-1) > m) for s in snrs])
    return np.array(out, dtype=np.int64), 0


def lemma2_slope_pair(memory, L, L_other, m, snr_db_grid, trials, seed, workers=1,
                      max_points=3, min_successes=MIN_SUCCESSES):
    """Tail probabilities of the same taps zero-padded to two block lengths.

    Both slopes are fitted on the same SNR points: the top ``max_points`` of
    the highest run where both curves reach ``min_successes``. A difference
    of slopes is noisier than either slope, so callers comparing against a
    tight tolerance should raise ``min_successes``.
    """
    if min(L, L_other) < memory + 1:
        raise InvalidConfig("block length must be at least nu+1")
    if not 0 < m < memory + 1:
        raise InvalidConfig(f"m must lie in (0, nu+1) = (0, {memory + 1})")
    snrs = db_to_linear(snr_db_grid)
    counts, _ = map_blocks(_lemma2_block, trials, (memory, L, L_other, m, snrs, seed), workers)
    pa = [EstimatePoint.from_counts(db, int(c), trials) for db, c in zip(snr_db_grid, counts[0])]
    pb = [EstimatePoint.from_counts(db, int(c), trials) for db, c in zip(snr_db_grid, counts[1])]
    both = [EstimatePoint.from_counts(a.snr_db, min(a.successes, b.successes), trials)
            for a, b in zip(pa, pb)]
    window = default_window(both, min_successes, max_points)
    return SlopePair(pa, pb, _try_fit(pa, window), _try_fit(pb, window))


def dft_interpolate(fr, omega):
    """Continuous spectrum ``G(omega)`` rebuilt from the L DFT samples."""
    L = fr.block_length
    theta = 2 * np.pi * np.arange(L) / L
    den = 1.0 - np.exp(-1j * (omega - theta))
    hit = np.flatnonzero(np.abs(den) < _SINGULAR)
    if hit.size:
        # on the sampling grid the numerator kills every other term
        return complex(fr.lam[hit[0]])
    num = 1.0 - np.exp(-1j * L * omega)
    return complex(np.sum(fr.lam * num / den) / L)


def interpolation_weights(block_length, factor):
    """Coefficients ``gamma[k, i]`` with ``lam_fine = gamma @ lam``."""
    L, T = block_length, factor
    fine = T * L
    k = np.arange(fine)[:, None]
    i = np.arange(L)[None, :]
    num = 1.0 - np.exp(-2j * np.pi * k * L / fine)
    den = 1.0 - np.exp(-1j * (2 * np.pi * k / fine - 2 * np.pi * i / L))
    singular = np.abs(den) < _SINGULAR
    gamma = np.where(singular, 0.0, num / np.where(singular, 1.0, den)) / L
    rows, cols = np.nonzero(singular)
    gamma[rows, :] = 0.0
    gamma[rows, cols] = 1.0
    return InterpolationWeights(gamma, T)


def zero_pad_subsample_check(taps, base_L, factor, tol=1e-10):
    """Check that every ``factor``-th fine-grid sample equals a coarse one.

    Also rebuilds the fine grid from the coarse samples with
    :func:`interpolation_weights`. Returns ``(ok, max_error)``.
    """
    coarse = frequency_response(taps, base_L).lam
    fine = frequency_response(taps, factor * base_L).lam
    err_sub = np.max(np.abs(fine[::factor] - coarse))
    err_interp = np.max(np.abs(interpolation_weights(base_L, factor).apply(coarse) - fine))
    err = float(max(err_sub, err_interp))
    return err <= tol, err


def remark1_independence_check(memory, trials, seed, block_length=None):
    """Largest pairwise complex correlation between eigenvalues over many draws.

    ``block_length`` defaults to ``memory + 1``, where the eigenvalues are
    independent; larger blocks serve as a negative control.
    """
    L = memory + 1 if block_length is None else block_length
    if L == 1:
        return 0.0
    rng = streams.stream(seed, streams.TAPS, 0)
    taps = streams.complex_normal(rng, (trials, memory + 1))
    lam = np.fft.fft(taps, n=L, axis=-1)
    gram = lam.T @ lam.conj() / trials
    power = np.real(np.diag(gram))
    corr = np.abs(gram) / np.sqrt(np.outer(power, power))
    np.fill_diagonal(corr, 0.0)
    return float(corr.max())
