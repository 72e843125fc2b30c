"""Deterministic random number generation.

The generator is SplitMix64 (Steele, Lea & Flood; reference constants
0x9E3779B97F4A7C15 / 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB), chosen
because its whole state is one 64-bit word and its output sequence is
fixed by those constants alone, so any language can replay a seed.
Uniform doubles take the top 53 bits shifted into (0, 1]:

    u = ((z >> 11) + 1) * 2**-53

(never 0, so log(u) below is always defined). Normal deviates use the
basic Box-Muller transform and consume BOTH variates of each pair, which
keeps the stream position a pure function of how many numbers were asked
for.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """64-bit SplitMix64 stream seeded with an integer."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_uniform(self) -> float:
        """Uniform double in (0, 1]."""
        return ((self.next_u64() >> 11) + 1) * 2.0**-53

    def next_gaussian_pair(self) -> tuple[float, float]:
        """One Box-Muller pair of independent standard normals."""
        u1 = self.next_uniform()
        u2 = self.next_uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        return r * math.cos(theta), r * math.sin(theta)

    def gaussians(self, n: int, mean: float = 0.0, std_dev: float = 1.0) -> list[float]:
        """n normal deviates; n odd discards the second variate of the
        final pair (after consuming it, keeping the stream deterministic)."""
        out: list[float] = []
        while len(out) < n:
            z0, z1 = self.next_gaussian_pair()
            out.append(mean + std_dev * z0)
            if len(out) < n:
                out.append(mean + std_dev * z1)
        return out
