"""Portable seeded random stream (SplitMix64 + Box-Muller).

Every random draw in the package goes through :class:`Rng`, so a seed fixes
results bit-for-bit on any platform and in any language that implements the
same two algorithms.
"""

import math

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class Rng:
    """SplitMix64 generator.

    Uniforms use the top 53 bits of each output. Normals come from the
    Box-Muller transform, consuming two uniforms and caching the sine
    branch for the next call.
    """

    def __init__(self, seed=0):
        self.state = int(seed) & _MASK64
        self._spare = None

    def next_u64(self):
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, low=0.0, high=1.0):
        """One draw from ``[low, high)``."""
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return low + (high - low) * u

    def uniform_array(self, shape, low=0.0, high=1.0):
        n = int(np.prod(shape))
        out = np.fromiter((self.uniform(low, high) for _ in range(n)), dtype=np.float64, count=n)
        return out.reshape(shape)

    def normal(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()  # (0, 1]: keeps log finite
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def normal_array(self, shape):
        n = int(np.prod(shape))
        out = np.fromiter((self.normal() for _ in range(n)), dtype=np.float64, count=n)
        return out.reshape(shape)

    def randbelow(self, n):
        """Integer in ``[0, n)`` (multiply-shift on the top 53 bits)."""
        return int(self.uniform() * n)

    def permutation(self, n):
        """Fisher-Yates shuffle of ``range(n)``."""
        perm = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm


def as_rng(seed_or_rng):
    """Accept an :class:`Rng`, an int seed, or None (seed 0)."""
    if isinstance(seed_or_rng, Rng):
        return seed_or_rng
    if seed_or_rng is None:
        return Rng(0)
    if isinstance(seed_or_rng, (int, np.integer)):
        return Rng(int(seed_or_rng))
    raise TypeError(f"expected Rng or int seed, got {type(seed_or_rng).__name__}")
