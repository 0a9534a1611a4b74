"""Portable seeded pseudo-random number generator.

Layout reproducibility is part of the public contract ("same seed, same
layout"), so the generator is pinned to a fixed, language-neutral
algorithm instead of whatever the host runtime ships: SplitMix64
(Steele, Lea & Flood's mix function, the one used to seed xoshiro
generators). Any reimplementation that follows the recipe below produces
identical streams:

    state    <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z        <- state
    z        <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z        <- (z XOR (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output   <- z XOR (z >> 31)

Doubles are derived by taking the top 53 bits: (output >> 11) * 2^-53,
uniform in [0, 1).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Deterministic 64-bit generator; one instance per reproducible task."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.next_float()

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection, bias-free.

        Draws 64-bit words until one falls below the largest multiple
        of n; for n far below 2^64 the first draw almost always wins.
        """
        if n <= 0:
            raise ValueError("n must be positive")
        limit = _MASK64 - (_MASK64 + 1) % n
        while True:
            x = self.next_u64()
            if x <= limit:
                return x % n
