"""Counter-based noise draws.

Stream: Philox4x64-10 (numpy's ``Philox``) with the 128-bit key
``seed + (t_index << 64)``.  Trial ``i`` owns the output block at counter
value ``i``, i.e. ``Philox(key=key, counter=i).random_raw(4)``, so any single
(seed, T index, trial) triple can be regenerated on its own and the draws do
not depend on evaluation order.

Each 64-bit word becomes a uniform on (0, 1) as ``((w >> 12) + 0.5) * 2**-52``
and the four uniforms of a block feed two Box-Muller pairs, giving four
standard normals per trial.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
WORDS_PER_TRIAL = 4


def stream_key(seed: int, t_index: int) -> int:
    if not 0 <= seed <= MASK64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if t_index < 0:
        raise ValueError("t_index must be non-negative")
    return seed | (t_index << 64)


def raw_blocks(seed: int, t_index: int, n_trials: int, first_trial: int = 0) -> np.ndarray:
    bg = np.random.Philox(key=stream_key(seed, t_index), counter=first_trial)
    return bg.random_raw(WORDS_PER_TRIAL * n_trials).reshape(n_trials, WORDS_PER_TRIAL)


def uniforms(raw: np.ndarray) -> np.ndarray:
    return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


def box_muller(u: np.ndarray) -> np.ndarray:
    r0 = np.sqrt(-2.0 * np.log(u[:, 0]))
    r1 = np.sqrt(-2.0 * np.log(u[:, 2]))
    a0 = 2.0 * np.pi * u[:, 1]
    a1 = 2.0 * np.pi * u[:, 3]
    return np.stack([r0 * np.cos(a0), r0 * np.sin(a0), r1 * np.cos(a1), r1 * np.sin(a1)], axis=1)


def trial_normals(seed: int, t_index: int, n_trials: int, first_trial: int = 0) -> np.ndarray:
    """Standard normals of shape ``(n_trials, 4)`` for trials ``first_trial ...``."""
    return box_muller(uniforms(raw_blocks(seed, t_index, n_trials, first_trial)))
