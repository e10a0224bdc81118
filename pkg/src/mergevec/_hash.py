"""Counter-based hashing used for stateless pseudo-random draws.

The Shuffle sampler has to answer "does sentence s belong to sub-corpus i
in epoch e?" from any worker without shared state, so the draw is a pure
function of (seed, epoch, sentence_id, sub_model_id).  splitmix64 gives a
well-mixed 64-bit value per key; the top 53 bits become a uniform in [0, 1).
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def splitmix64(x: int | np.uint64) -> np.uint64:
    """One splitmix64 finalization round (scalar)."""
    with np.errstate(over="ignore"):
        z = (np.uint64(x) + _GOLDEN) & _MASK
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def mix_key(*parts: int) -> np.uint64:
    """Hash a tuple of non-negative integers into one 64-bit value."""
    h = np.uint64(0)
    for p in parts:
        h = splitmix64(h ^ np.uint64(p))
    return h


def unit_uniform(*parts: int) -> float:
    """Deterministic uniform draw in [0, 1) keyed on the given integers."""
    return float(mix_key(*parts) >> np.uint64(11)) * _INV_2_53


def unit_uniform_array(ids: np.ndarray, *parts: int) -> np.ndarray:
    """Vectorized `unit_uniform` over an array of ids.

    Equals ``[unit_uniform(*parts, i) for i in ids]`` exactly: the scalar
    chain is replayed with `ids` substituted as the final key component.
    """
    h = np.uint64(0)
    for p in parts:
        h = splitmix64(h ^ np.uint64(p))
    with np.errstate(over="ignore"):
        z = (h ^ ids.astype(np.uint64)) + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53
