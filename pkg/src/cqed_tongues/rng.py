"""Counter-based random streams.

Every stream is Philox4x64-10 keyed by ``(seed, stream_index)``; the block
counter starts at zero.  Raw 64-bit words map to doubles in ``(0, 1]`` as
``((w >> 11) + 1) * 2**-53`` and Gaussian deviates come from the Box-Muller
cosine branch, one deviate per pair of words.  See ``docs/rng.md`` for test
vectors.
"""

import math

import numpy as np

__all__ = ["CounterStream", "philox_block"]

_MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0**-53


def _philox(key0, key1, counter_start):
    # numpy's Philox increments the counter before producing a block, so
    # starting it at (c - 1) yields block c first.
    ctr = (counter_start - 1) & ((1 << 256) - 1)
    words = np.array([(ctr >> (64 * i)) & _MASK64 for i in range(4)], dtype=np.uint64)
    key = np.array([key0 & _MASK64, key1 & _MASK64], dtype=np.uint64)
    return np.random.Philox(counter=words, key=key)


def philox_block(key, counter):
    """The four output words of Philox4x64-10 for a 128-bit key and 256-bit counter.

    ``key`` and ``counter`` are integers; word 0 is the least significant.
    """
    bitgen = _philox(key & _MASK64, key >> 64, counter)
    return [int(w) for w in bitgen.random_raw(4)]


class CounterStream:
    """Reproducible stream for one ``(seed, stream_index)`` pair."""

    def __init__(self, seed, stream_index):
        if not 0 <= seed <= _MASK64 or not 0 <= stream_index <= _MASK64:
            raise ValueError("seed and stream index must be unsigned 64-bit integers")
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        self._bitgen = _philox(self.seed, self.stream_index, 0)

    def raw(self, n):
        return self._bitgen.random_raw(n)

    def uniform(self, n=None):
        """Doubles in ``(0, 1]``."""
        count = 1 if n is None else n
        words = self.raw(count)
        u = ((words >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_M53
        return float(u[0]) if n is None else u

    def normal(self, n=None):
        count = 1 if n is None else n
        u = self.uniform(2 * count).reshape(count, 2)
        z = np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * math.pi * u[:, 1])
        return float(z[0]) if n is None else z
