"""Seeded random streams that replay bit-for-bit across platforms.

Raw 64-bit words come from numpy's PCG64 bit generator seeded through
``SeedSequence(seed, spawn_key=key)``; both have a documented, version-stable
output. Everything above the raw words is done here explicitly so that no
distribution sampler of the library is involved:

* uniforms are ``(word >> 11) * 2**-53`` in ``[0, 1)``;
* normals use the Box-Muller transform on consecutive uniform pairs,
  ``sqrt(-2 ln(1 - u1)) * (cos, sin)(2 pi u2)``;
* subsets use a partial Fisher-Yates shuffle with ``j = i + floor(u (n - i))``.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["Rng", "derive_key"]

_MASK64 = (1 << 64) - 1


def derive_key(*parts: int) -> tuple[int, ...]:
    return tuple(int(p) & _MASK64 for p in parts)


class Rng:
    def __init__(self, seed: int, key=()):
        if seed < 0 or seed > _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self.key = derive_key(*key)
        self._bits = np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key))

    def raw(self, size: int) -> np.ndarray:
        return self._bits.random_raw(size)

    def uniform(self, size: int) -> np.ndarray:
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, size: int) -> np.ndarray:
        if size == 0:
            return np.empty(0)
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        angle = 2.0 * math.pi * u[:, 1]
        out = np.column_stack((radius * np.cos(angle), radius * np.sin(angle))).ravel()
        return out[:size]

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in ``[low, high]``."""
        return low + int(self.uniform(1)[0] * (high - low + 1))

    def _shuffle_prefix(self, n: int, k: int) -> np.ndarray:
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} of {n} elements")
        perm = np.arange(n, dtype=np.int64)
        u = self.uniform(k)
        for i in range(k):
            j = i + int(u[i] * (n - i))
            perm[i], perm[j] = perm[j], perm[i]
        return perm[:k]

    def subset(self, n: int, k: int) -> np.ndarray:
        """Sorted uniformly random ``k``-subset of ``range(n)``."""
        return np.sort(self._shuffle_prefix(n, k))

    def permutation(self, n: int) -> np.ndarray:
        return self._shuffle_prefix(n, n)
