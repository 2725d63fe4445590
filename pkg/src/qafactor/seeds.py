"""Deterministic per-shot seed derivation shared by all stochastic runners.

Shot k of a run with master seed m uses

    shot_seed(m, k) = splitmix64(m XOR (k * 0x9E3779B97F4A7C15 mod 2**64))

The golden-ratio multiply spreads the shot index over the 64-bit word and
splitmix64 (Steele, Lea & Flood's SplittableRandom finalizer) mixes the
result.  Identical (master seed, shot index) pairs therefore yield
identical shots regardless of worker count or execution order.
"""
from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 mixing step on a 64-bit word."""
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return (x ^ (x >> 31)) & _MASK


def shot_seed(master_seed: int, shot_index: int) -> int:
    """64-bit seed for one shot, stable under any degree of parallelism."""
    if shot_index < 0:
        raise ValueError("shot index must be >= 0")
    return splitmix64((master_seed & _MASK) ^ ((shot_index * _GOLDEN) & _MASK))
