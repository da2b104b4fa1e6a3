"""
Seed derivation helpers.

Every random draw in the package is keyed on a master seed plus integer keys
(trial index, node id, stage ...), so results do not depend on execution order
or worker count.
"""
from typing import Union

import numpy as np

from .errors import ParameterError

_MASK64 = (1 << 64) - 1

# Stream tags keep independent consumers of one master seed apart.
STREAM_PLANT = 1
STREAM_EDGES = 2
STREAM_REDUCE = 3
STREAM_LOUVAIN = 4
STREAM_TRIAL = 5
STREAM_LANDSCAPE = 6
STREAM_THEOREM2 = 7
STREAM_LEMMA2 = 8


def derive_seed(master: int, *keys: int) -> int:
    """Derive a 64-bit seed from a master seed and a path of integer keys."""
    entropy = [int(master) & _MASK64] + [int(k) & _MASK64 for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def seed_rng(seed: Union[int, np.integer]) -> np.random.Generator:
    """Generator for a raw 64-bit seed; negative seeds wrap to their unsigned value."""
    if isinstance(seed, bool) or int(seed) != seed:
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    return np.random.default_rng(int(seed) & _MASK64)


def rng_for(master: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *keys))


def row_uniforms(seed: Union[int, np.integer], stream: int, row: int, width: int) -> np.ndarray:
    """
    Uniform draws for the node pairs (row, 0..width-1).

    The draw for pair (row, col) depends only on (seed, stream, row, col), which
    is what lets pair sampling be split over node ranges freely.
    """
    return rng_for(int(seed), stream, row).random(width)
