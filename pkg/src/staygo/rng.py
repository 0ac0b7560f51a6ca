"""Counter-based uniforms: a stateless hash of integer keys.

Each draw is a pure function of its key tuple, so traces can be generated
in any order (or partially) and still agree bit for bit across runs and
platforms.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def hash_keys(*keys) -> np.ndarray:
    """64-bit hash of broadcast integer key arrays (first key is usually a seed)."""
    arrays = np.broadcast_arrays(*[np.asarray(k, dtype=np.int64) for k in keys])
    h = np.zeros(arrays[0].shape, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for a in arrays:
            h = _splitmix(h ^ a.astype(np.uint64))
    return h


def uniforms(*keys) -> np.ndarray:
    """Uniform floats in [0, 1) keyed on integer tuples."""
    h = hash_keys(*keys)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
