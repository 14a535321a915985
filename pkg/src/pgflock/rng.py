"""Deterministic seeded random streams.

Every random decision in a run is drawn from a per-robot or per-world
stream derived from one master seed, so runs are reproducible bit-for-bit
regardless of how trials are scheduled.  The generator is splitmix64: a
single 64-bit counter state advanced by a fixed increment and mixed on
output.  The same step function is reimplemented inside the numba kernels
(see _kernels.py); tests pin the two implementations together.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15

# stream tags keep robot / world / trial derivations disjoint
TAG_ROBOT = 0x526F626F74
TAG_WORLD = 0x576F726C64
TAG_TRIAL = 0x547269616C


def mix64(z: int) -> int:
    """splitmix64 output mix of a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(master: int, *keys: int) -> int:
    """Fold integer keys into a master seed, one mixing round per key.

    Pure function of its arguments; used for per-robot streams and for
    (cell, trial) child seeds in the batch harness.
    """
    state = master & MASK64
    for k in keys:
        state = mix64((state + GOLDEN + (k & MASK64)) & MASK64)
    return state


class SplitMix64:
    """Sequential stream over a derived seed.

    Mirrors the in-kernel generator exactly: tests compare the two
    step-for-step, and behavior-level unit tests share draws with
    engine runs.
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def next_float(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the half-open interval [lo, hi)."""
        if hi <= lo:
            raise ValueError(f"empty interval [{lo}, {hi})")
        return lo + int(self.next_float() * (hi - lo))
