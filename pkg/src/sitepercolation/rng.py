"""Seeded randomness used throughout the package.

Every random quantity comes from numpy's Philox4x64 counter-based bit
generator keyed by ``(seed, stream)``. Distinct ``stream`` tags give
independent substreams of the same seed without any shared state, so a
graph, its coins and its vertex order can be regenerated in any order.

Per-trial seeds are derived with the SplitMix64 finalizer.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1

# stream tags
GRAPH = 1
COINS = 2
SIGMA = 3
SAMPLES = 4
REPAIR = 5


def splitmix64(x: int) -> int:
    """One SplitMix64 step: advance by the golden gamma, then finalize."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *indices: int) -> int:
    """Mix ``base_seed`` with a tuple of indices into a fresh 64-bit seed."""
    h = splitmix64(base_seed & MASK64)
    for i in indices:
        h = splitmix64(h ^ (i & MASK64))
    return h


def philox(seed: int, stream: int) -> np.random.Generator:
    key = np.array([seed & MASK64, stream & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def raw_draws(seed: int, stream: int, size: int) -> np.ndarray:
    """``size`` raw uint64 words from the ``(seed, stream)`` substream."""
    key = np.array([seed & MASK64, stream & MASK64], dtype=np.uint64)
    return np.random.Philox(key=key).random_raw(size).astype(np.uint64)


def coin_threshold(p: float | Fraction) -> int:
    """Integer cut-off ``t`` with ``P(raw < t) = p`` for a uniform 64-bit word.

    The conversion goes through :class:`~fractions.Fraction`, so a rational
    ``p`` such as ``Fraction(13, 1000)`` is mapped exactly once.
    """
    q = Fraction(p)
    if q < 0 or q > 1:
        raise ValueError(f"probability out of range: {p}")
    return (q.numerator << 64) // q.denominator


def heads(raw: np.ndarray, threshold: int) -> np.ndarray:
    """Boolean coin outcomes ``raw < threshold`` (handles ``p = 1``)."""
    if threshold > MASK64:
        return np.ones(raw.shape, dtype=bool)
    return raw < np.uint64(threshold)
