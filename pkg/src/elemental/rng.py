"""Seeded random streams with reproducible, platform-independent child derivation."""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 step applied to a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Mix an experiment seed with a sequence of task keys into a 64-bit state."""
    h = splitmix64(int(seed) & _MASK64)
    for k in keys:
        h = splitmix64(h ^ (int(k) & _MASK64))
    return h


class RandomStream:
    """A numpy PCG64 generator whose state is a pure function of ``(seed, *keys)``.

    Two streams built from the same seed and keys produce identical draws on
    every platform, so work can be split into tasks that each own a child
    stream and merged later in task order.
    """

    def __init__(self, seed: int, *keys: int):
        self.seed = int(seed)
        self.keys = tuple(int(k) for k in keys)
        self.state = derive_seed(self.seed, *self.keys)
        self.generator = np.random.Generator(np.random.PCG64(self.state))

    def child(self, *keys: int) -> "RandomStream":
        return RandomStream(self.seed, *self.keys, *keys)

    def uniform(self, size=None) -> np.ndarray:
        """Uniform draws on the open interval (0, 1).

        Values are (k + 1/2) / 2**53 for integer k, so 0 and 1 never occur.
        """
        k = self.generator.integers(0, 1 << 53, size=size, dtype=np.int64)
        return (k + 0.5) * 2.0**-53

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, keys={self.keys})"
