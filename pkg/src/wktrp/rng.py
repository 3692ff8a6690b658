"""Seedable PRNG used everywhere randomness is needed.

This is PCG32 (M.E. O'Neill's minimal 32-bit permuted congruential
generator, pcg-random.org): 64-bit LCG state, xorshift-rotate output.
It is reimplemented here instead of using ``random``/``numpy.random``
because the compiled search kernel carries an identical copy, and both
backends must consume the exact same stream to produce identical runs.
"""

from __future__ import annotations

_M64 = (1 << 64) - 1
_M32 = (1 << 32) - 1

PCG_MULT = 6364136223846793005

# Default stream selector; any odd increment defines a distinct stream.
DEFAULT_STREAM = 0xDA3E39CB94B95BDB

# Separate stream for weight generation so that solver runs and instance
# weight draws never interleave.
WEIGHT_STREAM = 0x853C49E6748FEA9B

_INV32 = 1.0 / 4294967296.0


class Pcg32:
    """PCG32 generator. ``seed`` picks the start point, ``stream`` the sequence."""

    __slots__ = ("state", "inc")

    def __init__(self, seed: int, stream: int = DEFAULT_STREAM):
        self.inc = ((stream << 1) | 1) & _M64
        self.state = 0
        self.next32()
        self.state = (self.state + (seed & _M64)) & _M64
        self.next32()

    def next32(self) -> int:
        old = self.state
        self.state = (old * PCG_MULT + self.inc) & _M64
        xorshifted = (((old >> 18) ^ old) >> 27) & _M32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & _M32

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 32 bits of resolution."""
        return self.next32() * _INV32

    def randbelow(self, bound: int) -> int:
        """Unbiased integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        threshold = ((1 << 32) - bound) % bound
        while True:
            r = self.next32()
            if r >= threshold:
                return r % bound

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def __repr__(self) -> str:  # pragma: no cover
        return f"Pcg32(state={self.state:#x}, inc={self.inc:#x})"
