"""Seeded randomness shared by every generator in the package.

All streams come from numpy's PCG64 bit generator. Bounded integers are drawn
with the multiply-shift map ``floor(x * m / 2**64)`` applied to raw 64-bit
outputs: no rejection, deterministic consumption of exactly one word per draw,
and a bias of at most ``m / 2**64 < 2**-32`` for every ``m < 2**32``.
"""

from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "pcg64+multiply-shift"

_MASK64 = (1 << 64) - 1
_LOW32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 finalizer (Steele, Lea & Flood 2014)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(master: int, index: int, stream: int = 0) -> int:
    """Derive the 64-bit seed of trial ``index`` from ``master``.

    ``stream`` separates independent uses inside one trial (graph vs initial set).
    """
    h = splitmix64(master & _MASK64)
    h = splitmix64(h ^ (index & _MASK64))
    return splitmix64(h ^ (stream & _MASK64))


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def bit_generator(seed: int) -> np.random.PCG64:
    return np.random.PCG64(check_seed(seed))


def raw_words(bg: np.random.PCG64, size: int) -> np.ndarray:
    return bg.random_raw(size).astype(np.uint64, copy=False)


def bounded(words: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Map uniform 64-bit ``words`` to integers in ``[0, bounds)`` elementwise.

    Exact ``floor(w * m / 2**64)`` computed in two 32-bit halves so that no
    intermediate exceeds 64 bits.
    """
    m = np.asarray(bounds, dtype=np.uint64)
    if m.size and int(m.max()) >= 1 << 32:
        raise ValueError("bound must be below 2**32")
    hi = words >> _SHIFT32
    lo = words & _LOW32
    return (hi * m + ((lo * m) >> _SHIFT32)) >> _SHIFT32


def uniforms(bg: np.random.PCG64, size: int) -> np.ndarray:
    """Reals in [0, 1) from the top 53 bits of raw words."""
    return (raw_words(bg, size) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
