"""Mutual information, outage events and the analytic diversity order.

Rates are in bits per symbol and every logarithm is base 2.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .equalizer import EqualizerKind, harmonic_mean_term
from .errors import InvalidConfig


class Regime(enum.Enum):
    FULL_DIVERSITY = "full_diversity"
    RATE_LIMITED = "rate_limited"


@dataclass(frozen=True)
class DiversityReport:
    d: int
    regime: Regime
    interval: tuple  # (lo, hi], hi may be math.inf


def mutual_info_from_gains(gains, snr, kind):
    """Vectorized mutual information over the last axis of ``gains``."""
    t = harmonic_mean_term(gains, snr, kind)
    if kind is EqualizerKind.MMSE:
        return -np.log2(t)
    return np.log2(1.0 + 1.0 / t)


def mutual_info(fr, snr, kind):
    return float(mutual_info_from_gains(fr.gains, snr, kind))


def outage_from_gains(gains, snr, rate, kind):
    return mutual_info_from_gains(gains, snr, kind) < rate


def outage_indicator(fr, snr, rate, kind):
    """True when the equalized mutual information falls strictly below ``rate``."""
    return bool(outage_from_gains(fr.gains, snr, rate, kind))


def _check(memory, block_length, rate=None):
    if memory < 0:
        raise InvalidConfig("channel memory must be non-negative")
    if block_length < memory + 1:
        raise InvalidConfig("block length must be at least nu+1")
    if rate is not None and not rate > 0:
        raise InvalidConfig("rate must be positive")


def rate_intervals(memory, block_length):
    """Partition of the positive rates into constant-diversity intervals.

    Returns ``[(d, (lo, hi)), ...]`` from ``d = nu + 1`` down to ``d = 1``;
    every interval is open on the left and closed on the right.
    """
    _check(memory, block_length)
    if memory == 0:
        return [(1, (0.0, math.inf))]
    out = []
    lo = 0.0
    for d in range(memory + 1, 1, -1):
        hi = math.log2(block_length / (d - 1))
        out.append((d, (lo, hi)))
        lo = hi
    out.append((1, (lo, math.inf)))
    return out


def analytic_diversity(rate, memory, block_length, kind=EqualizerKind.MMSE):
    """Diversity order predicted for the given rate, memory and block length."""
    _check(memory, block_length, rate)
    if kind is EqualizerKind.ZF:
        regime = Regime.FULL_DIVERSITY if memory == 0 else Regime.RATE_LIMITED
        return DiversityReport(1, regime, (0.0, math.inf))
    intervals = rate_intervals(memory, block_length)
    for d, (lo, hi) in intervals:
        if rate <= hi:
            regime = Regime.FULL_DIVERSITY if d == memory + 1 else Regime.RATE_LIMITED
            return DiversityReport(d, regime, (lo, hi))
    raise AssertionError("unreachable: last interval is unbounded")


def rate_shift(rate, from_block, to_block):
    """Rate at block length ``to_block`` with the same outage exponent."""
    return rate + math.log2(to_block / from_block)


def union_bound_pep(fr, snr, rate):
    """Union bound on the conditional symbol error of MMSE SC-FDE, clipped to [0, 1]."""
    g = fr.gains
    spread = np.mean(snr * g / (snr * g + 1.0) ** 2)
    if spread == 0:
        return 1.0
    bound = 2.0 ** rate * math.exp(-1.0 / spread)
    return float(min(1.0, max(0.0, bound)))
