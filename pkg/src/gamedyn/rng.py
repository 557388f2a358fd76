"""Counter-based pseudo-randomness built on the SplitMix64 finalizer.

Every random quantity in the package is a pure function of a 64-bit seed
and a 64-bit counter.  Draw k of stream `seed` is::

    mix64((seed + (k + 1) * GOLDEN) mod 2**64)

which makes any block of draws reproducible in isolation: parallel workers
never need to share generator state.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MIX_C1 = 0xBF58476D1CE4E5B9
MIX_C2 = 0x94D049BB133111EB

_MASK = (1 << 64) - 1
# (bits >> 11) + 0.5 scaled into (0, 1); exactly representable, never 0 or 1
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int, reduced mod 2**64."""
    z &= _MASK
    z ^= z >> 30
    z = (z * MIX_C1) & _MASK
    z ^= z >> 27
    z = (z * MIX_C2) & _MASK
    z ^= z >> 31
    return z


def bits_block(seed: int, offset: int, count: int) -> np.ndarray:
    """Vectorized draws ``offset .. offset+count-1`` of stream `seed` as uint64."""
    if count < 0:
        raise ValueError("count must be non-negative")
    k = np.arange(offset, offset + count, dtype=np.uint64)
    z = (np.uint64(seed) + (k + np.uint64(1)) * np.uint64(GOLDEN))
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(MIX_C1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(MIX_C2)
        z ^= z >> np.uint64(31)
    return z


def uniforms_block(seed: int, offset: int, count: int) -> np.ndarray:
    """Uniform(0,1) draws for the given counter range, endpoints excluded."""
    bits = bits_block(seed, offset, count)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _INV_2_53
