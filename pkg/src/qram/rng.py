"""Portable seeded random numbers, identical on every platform.

Everything random in this package (scenario targets, environment resets,
network initialisation, action sampling) goes through :class:`PortableRng` so
that a run is fully determined by its integer seed.  The generator is
xorshift64* seeded through one splitmix64 step, which maps any 64-bit seed
(including 0) to a healthy non-zero state:

    seeding:  z = (seed + 0x9E3779B97F4A7C15) mod 2^64
              z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
              z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2^64
              state = z ^ (z >> 31)        (0 replaced by the splitmix gamma)

    step:     state ^= state >> 12
              state ^= (state << 25) mod 2^64
              state ^= state >> 27
              output = (state * 0x2545F4914F6CDD1D) mod 2^64

Doubles take the top 53 bits of the output (``output >> 11``) times 2^-53,
so streams are bit-identical across machines and reimplementations.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_XORSHIFT_MULT = 0x2545F4914F6CDD1D


def _splitmix64(seed: int) -> int:
    z = (seed + _SPLITMIX_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class PortableRng:
    """xorshift64* stream; one instance per independent random stream."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        state = _splitmix64(int(seed) & _MASK64)
        self._state = state if state != 0 else _SPLITMIX_GAMMA

    def next_u64(self) -> int:
        s = self._state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _MASK64
        s ^= s >> 27
        self._state = s
        return (s * _XORSHIFT_MULT) & _MASK64

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 output bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n).  Uses the modulo reduction; the bias is
        below 2^-60 for the small n used here."""
        if n <= 0:
            raise ValueError("randint needs n >= 1")
        return self.next_u64() % n
