"""Deterministic random streams for simulations.

The generator is specified bit-exactly so any run can be reproduced from
its seed alone:

- seed expansion: one splitmix64 step of the user seed. state is advanced
  by the odd constant 0x9E3779B97F4A7C15 mod 2^64 and the result mixed as
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) *
  0x94D049BB133111EB; z ^ (z >> 31), all mod 2^64. A zero expansion maps
  to the splitmix constant so the stream state is never zero.
- stream: xorshift64*. x ^= x >> 12; x ^= x << 25; x ^= x >> 27 (mod
  2^64), output (x * 0x2545F4914F6CDD1D) mod 2^64.
- uniform: ((u64 >> 11) + 1) * 2^-53, a double in (0, 1] (never 0, so it
  is safe under log).
- normal: Box-Muller, sqrt(-2 ln u1) * cos(2 pi u2); the sine mate is
  cached and returned by the next call.
- split(index): a child generator seeded with mix64(seed ^ mix64(index+1))
  where mix64 is the splitmix64 step above; children are decorrelated
  streams reproducible from (seed, index) alone.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(v: int) -> int:
    """One splitmix64 step: advance by the golden constant and mix."""
    v = (v + _GOLDEN) & _MASK
    v = ((v ^ (v >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    v = ((v ^ (v >> 27)) * 0x94D049BB133111EB) & _MASK
    return v ^ (v >> 31)


class Rng:
    """Splittable xorshift64* stream with the documented bit-exact layout."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self._state = _mix64(self.seed) or _GOLDEN
        self._pending_normal = None

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK

    def uniform(self) -> float:
        """Double in (0, 1]."""
        return ((self.next_u64() >> 11) + 1) * 2.0**-53

    def normal(self) -> float:
        """Standard normal draw (Box-Muller pair, second value cached)."""
        if self._pending_normal is not None:
            z = self._pending_normal
            self._pending_normal = None
            return z
        u1 = self.uniform()
        u2 = self.uniform()
        radius = math.sqrt(-2.0 * math.log(u1))
        angle = 2.0 * math.pi * u2
        self._pending_normal = radius * math.sin(angle)
        return radius * math.cos(angle)

    def split(self, index: int) -> "Rng":
        """Independent child stream derived from (seed, index)."""
        return Rng(_mix64(self.seed ^ _mix64((int(index) + 1) & _MASK)))
