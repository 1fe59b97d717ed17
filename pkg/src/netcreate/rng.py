"""Portable seeded random stream shared by Python code and compiled kernels.

The generator is xoshiro256** (Blackman & Vigna) with its 256-bit state
initialised from a 64-bit seed by four rounds of splitmix64. Bounded draws
use rejection sampling on the low end of the 64-bit range, so every value in
``[0, bound)`` is exactly equally likely. The state lives in a 4-element
``uint64`` array so that the same stream can be advanced from Python and
from inside a numba kernel without copying.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64_words(seed: int, count: int = 4) -> list[int]:
    x = seed & _MASK64
    out = []
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


def seed_state(seed: int) -> np.ndarray:
    """Return a fresh xoshiro256** state array for ``seed``."""
    words = _splitmix64_words(int(seed))
    if not any(words):  # all-zero state is a fixed point
        words[0] = 1
    return np.array(words, dtype=np.uint64)


@nb.njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@nb.njit(cache=True)
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@nb.njit(cache=True)
def below(s, bound):
    """Uniform integer in ``[0, bound)``; ``bound`` must be positive."""
    b = np.uint64(bound)
    # smallest x accepted is (2**64 - b) % b, i.e. (-b) % b in modular arithmetic
    threshold = (np.uint64(0) - b) % b
    while True:
        x = next_u64(s)
        if x >= threshold:
            return np.int64(x % b)


class Rng:
    """Thin object wrapper around a xoshiro256** state array."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self.state = seed_state(self.seed)

    def below(self, bound: int) -> int:
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        return int(below(self.state, bound))

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed})"
