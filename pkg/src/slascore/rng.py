"""Deterministic random number generation for parameter init and batching.

The generator is a plain splitmix64 stream so that goldens produced here
can be reproduced bit-for-bit by any other implementation:

    state <- state + 0x9E3779B97F4A7C15          (mod 2^64)
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9  (mod 2^64)
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB  (mod 2^64)
    output z XOR (z >> 31)

Uniform doubles take the top 53 bits: u = (z >> 11) * 2^-53, u in [0, 1).
Integer draws use floor(u * n); shuffles are Fisher-Yates from the top.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    """Seeded splitmix64 stream with uniform/shuffle helpers."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + u * (hi - lo)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return int(self.uniform() * n)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by this stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
