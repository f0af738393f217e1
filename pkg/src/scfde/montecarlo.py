"""Monte Carlo outage and symbol-error curves, Wilson intervals and slope fits.

Trials are split into fixed blocks of :data:`~scfde.streams.BLOCK_TRIALS`;
each block reads its own counter-based streams, so the integer counts are the
same for any worker count. All SNR points of a sweep reuse the same channel,
symbol and noise draws (common random numbers).
"""

import enum
import functools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import streams
from .equalizer import Constellation, EqualizerKind, slicer
from .errors import InsufficientData, InvalidConfig
from .infotheory import outage_from_gains
from .spectrum import cp_convolve

log = logging.getLogger(__name__)

#: Minimum success count for a point to enter the default slope window.
MIN_SUCCESSES = 30


class Target(enum.Enum):
    OUTAGE = "outage"
    SYMBOL_ERROR = "ser"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class SweepConfig:
    memory: int
    block_length: int
    rate: float
    kind: EqualizerKind
    snr_grid_db: tuple
    trials_per_point: int
    master_seed: int = 0
    target: Target = Target.OUTAGE
    noiseless: bool = False

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        if self.memory < 0:
            raise InvalidConfig("nu must be non-negative")
        if self.block_length < self.memory + 1:
            raise InvalidConfig("block length must be at least nu+1")
        if not self.rate > 0:
            raise InvalidConfig("rate must be positive")
        if not self.snr_grid_db:
            raise InvalidConfig("empty SNR grid")
        if any(b <= a for a, b in zip(self.snr_grid_db, self.snr_grid_db[1:])):
            raise InvalidConfig("SNR grid must be strictly increasing")
        if self.trials_per_point < 1:
            raise InvalidConfig("trials_per_point must be at least 1")
        if not 0 <= self.master_seed < 1 << 64:
            raise InvalidConfig("seed must fit in 64 unsigned bits")
        if self.target is Target.SYMBOL_ERROR and (self.rate != int(self.rate) or self.rate < 1):
            raise InvalidConfig("symbol-error sweeps need an integer rate >= 1")

    @property
    def snr_linear(self):
        return db_to_linear(self.snr_grid_db)


@dataclass(frozen=True)
class EstimatePoint:
    snr_db: float
    p_hat: float
    trials: int
    successes: int
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, snr_db, successes, trials):
        lo, hi = wilson_interval(successes, trials)
        return cls(float(snr_db), successes / trials, int(trials), int(successes), lo, hi)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    window: tuple
    residual: float


@dataclass
class Sweep:
    config: SweepConfig
    points: list
    redraws: int = 0
    meta: dict = field(default_factory=dict)


def wilson_interval(successes, trials, confidence=0.95):
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(
        confidence_level=confidence, method="wilson")
    p = successes / trials
    return float(min(max(ci.low, 0.0), p)), float(max(min(ci.high, 1.0), p))


# -- block workers ------------------------------------------------------------

def _draw_taps(seed, block, n, memory, kind, block_length):
    """Taps for one block; ZF trials with an exactly-zero bin are redrawn."""
    rng = streams.stream(seed, streams.TAPS, block)
    taps = streams.complex_normal(rng, (n, memory + 1))
    redraws = 0
    if kind is EqualizerKind.ZF:
        lam = np.fft.fft(taps, n=block_length, axis=-1)
        for row in np.flatnonzero(np.any(lam == 0, axis=-1)):
            trial = block * streams.BLOCK_TRIALS + int(row)
            attempt = 0
            while np.any(np.fft.fft(taps[row], n=block_length) == 0):
                attempt += 1
                redraws += 1
                r = streams.stream(seed, streams.REDRAW, trial, attempt=attempt)
                taps[row] = streams.complex_normal(r, memory + 1)
    return taps, redraws


def _outage_block(config, block, n):
    taps, redraws = _draw_taps(config.master_seed, block, n, config.memory,
                               config.kind, config.block_length)
    lam = np.fft.fft(taps, n=config.block_length, axis=-1)
    gains = lam.real ** 2 + lam.imag ** 2
    counts = np.array([np.count_nonzero(outage_from_gains(gains, s, config.rate, config.kind))
                       for s in config.snr_linear], dtype=np.int64)
    return counts, redraws


def _ser_block(config, block, n):
    L = config.block_length
    seed = config.master_seed
    taps, redraws = _draw_taps(seed, block, n, config.memory, config.kind, L)
    const = Constellation.psk(int(config.rate))
    sent = streams.stream(seed, streams.SYMBOLS, block).integers(0, const.order, size=(n, L))
    x = const.points[sent]
    noise = None
    if not config.noiseless:
        noise = streams.complex_normal(streams.stream(seed, streams.NOISE, block), (n, L))
    lam = np.fft.fft(taps, n=L, axis=-1)
    gains = lam.real ** 2 + lam.imag ** 2
    hx = cp_convolve(taps, x)
    counts = np.empty(len(config.snr_grid_db), dtype=np.int64)
    for i, s in enumerate(config.snr_linear):
        y = np.sqrt(s) * hx if noise is None else np.sqrt(s) * hx + noise
        if config.kind is EqualizerKind.MMSE:
            w = np.conj(lam) / (gains + 1.0 / s)
        else:
            w = 1.0 / lam
        y_hat = np.fft.ifft(w * np.fft.fft(y, axis=-1), axis=-1)
        counts[i] = np.count_nonzero(slicer(y_hat, s, const) != sent)
    return counts, redraws


def _run_blocks(worker, spans, *args):
    total, redraws = None, 0
    for block, n in spans:
        c, r = worker(*args, block, n)
        total = c if total is None else total + c
        redraws += r
    return total, redraws


def map_blocks(worker, n_trials, args=(), workers=1):
    """Sum ``worker(*args, block, n)`` integer counts over all trial blocks.

    ``worker`` returns ``(counts, redraws)``; it must be a module-level
    function when ``workers > 1``.
    """
    spans = list(streams.block_spans(n_trials))
    if workers <= 1 or len(spans) == 1:
        return _run_blocks(worker, spans, *args)
    shards = [spans[i::workers] for i in range(workers)]
    total, redraws = None, 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_blocks, worker, shard, *args) for shard in shards if shard]
        for fut in futures:
            c, r = fut.result()
            total = c if total is None else total + c
            redraws += r
    return total, redraws


def run_sweep(config, workers=1):
    """Run a full sweep and keep the redraw count alongside the points."""
    if config.target is Target.OUTAGE:
        counts, redraws = map_blocks(_outage_block, config.trials_per_point, (config,), workers)
        per_point = config.trials_per_point
    else:
        counts, redraws = map_blocks(_ser_block, config.trials_per_point, (config,), workers)
        per_point = config.trials_per_point * config.block_length
    points = [EstimatePoint.from_counts(db, int(c), per_point)
              for db, c in zip(config.snr_grid_db, counts)]
    if redraws:
        log.info("redrew %d degenerate channels", redraws)
    return Sweep(config, points, redraws)


def estimate_outage(config, workers=1):
    if config.target is not Target.OUTAGE:
        raise InvalidConfig("estimate_outage needs target=OUTAGE")
    return run_sweep(config, workers).points


def estimate_ser(config, workers=1):
    """Symbol error rate; ``trials`` in each point counts symbols, not blocks."""
    if config.target is not Target.SYMBOL_ERROR:
        raise InvalidConfig("estimate_ser needs target=SYMBOL_ERROR")
    return run_sweep(config, workers).points


# -- slope fitting ------------------------------------------------------------

def default_window(curve, min_successes=MIN_SUCCESSES, max_points=None):
    """Highest-SNR contiguous run of points with at least ``min_successes``.

    With ``max_points`` only the top points of that run are kept.
    """
    window = []
    for i in reversed(range(len(curve))):
        if curve[i].successes >= min_successes:
            window.append(i)
        elif window:
            break
    window.reverse()
    if max_points is not None:
        window = window[-max_points:]
    return tuple(window)


def fit_slope(curve, window=None):
    """Least-squares slope of log10(p) against log10(SNR), negated.

    Points with zero successes inside ``window`` are skipped.
    """
    if window is None:
        window = default_window(curve)
    window = tuple(i for i in window if curve[i].successes > 0)
    if len(window) < 2:
        raise InsufficientData("need at least two points with nonzero counts to fit a slope")
    x = np.array([curve[i].snr_db / 10.0 for i in window])
    y = np.log10([curve[i].p_hat for i in window])
    res = stats.linregress(x, y)
    r2 = res.rvalue ** 2 if np.isfinite(res.rvalue) else 1.0
    return SlopeFit(-float(res.slope), float(res.intercept), window, float(r2))
