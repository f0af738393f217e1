"""Counter-based random streams.

Every random draw in a sweep is addressed by ``(master_seed, purpose, block)``
through a Philox generator whose key is the master seed and whose counter
starts at a distinct high word. A trial's randomness therefore depends only
on the master seed and its trial index, never on how trials are scheduled
across workers.
"""

import numpy as np

#: Trials are processed in fixed-size blocks; trial ``t`` lives in block
#: ``t // BLOCK_TRIALS`` at row ``t % BLOCK_TRIALS``.
BLOCK_TRIALS = 1 << 16

TAPS = 0
SYMBOLS = 1
NOISE = 2
REDRAW = 3

_MASK64 = (1 << 64) - 1


def stream(master_seed, purpose, block, attempt=0):
    """Return the generator for one ``(purpose, block)`` substream.

    Parameters
    ----------
    master_seed : int
        Non-negative seed, at most 64 bits.
    purpose : int
        One of TAPS, SYMBOLS, NOISE or REDRAW.
    block : int
        Block index (or trial index for REDRAW streams).
    attempt : int
        Redraw attempt number; 0 for the primary streams.
    """
    if not 0 <= master_seed <= _MASK64:
        raise ValueError("master_seed must be a 64-bit unsigned integer")
    # Philox increments the lowest counter word first, so streams that differ
    # in any of the upper three words never overlap.
    counter = np.array([0, attempt, purpose, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=master_seed, counter=counter))


def trial_stream(master_seed, trial):
    """Single-trial stream for scalar use of the channel primitives."""
    return stream(master_seed, REDRAW, trial, attempt=_MASK64)


def block_spans(n_trials, block_trials=BLOCK_TRIALS):
    """Yield ``(block_index, n_rows)`` covering ``n_trials`` trials."""
    n_blocks = -(-n_trials // block_trials)
    for b in range(n_blocks):
        yield b, min(block_trials, n_trials - b * block_trials)


def complex_normal(rng, shape):
    """Draw circularly-symmetric CN(0, 1) samples."""
    shape = (shape,) if np.ndim(shape) == 0 else tuple(shape)
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)
