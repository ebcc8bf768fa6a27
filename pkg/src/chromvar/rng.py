"""Counter-based 64-bit random stream (SplitMix64 finaliser).

Output ``i`` of stream ``key`` is ``mix64(key + (i + 1) * GOLDEN_GAMMA)``, so
any single draw can be recomputed from ``(key, i)`` alone.  Keys for derived
streams come from :func:`derive_key`, which folds extra integers into a key
with the same mixer.

Constants (Steele, Lea & Flood, "Fast splittable pseudorandom number
generators", 2014):

    GOLDEN_GAMMA = 0x9E3779B97F4A7C15
    MIX_MUL_1    = 0xBF58476D1CE4E5B9
    MIX_MUL_2    = 0x94D049BB133111EB
    shifts       = 30, 27, 31
"""
from __future__ import annotations

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL_1 = 0xBF58476D1CE4E5B9
MIX_MUL_2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1

_U64 = np.uint64


def mix64(z: int) -> int:
    """Scalar SplitMix64 finaliser on a Python int (taken mod 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_MUL_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MUL_2) & MASK64
    return z ^ (z >> 31)


def derive_key(*parts: int) -> int:
    """Fold integers into one 64-bit stream key; order matters."""
    key = 0
    for part in parts:
        key = mix64((key ^ (int(part) & MASK64)) + GOLDEN_GAMMA)
    return key


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> _U64(30))
    z = z * _U64(MIX_MUL_1)
    z = z ^ (z >> _U64(27))
    z = z * _U64(MIX_MUL_2)
    return z ^ (z >> _U64(31))


def raw64(key: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of stream ``key`` as uint64."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _U64(key & MASK64) + idx * _U64(GOLDEN_GAMMA)
        return _mix_array(z)


def uniforms(key: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) built from the top 53 bits of each output."""
    return (raw64(key, start, count) >> _U64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def sample_subset(key: int, n: int, a: int) -> np.ndarray:
    """Uniform ``a``-subset of ``range(n)`` (sorted), by a partial Fisher-Yates shuffle."""
    if not 0 <= a <= n:
        raise ValueError(f"need 0 <= a <= n, got a={a}, n={n}")
    perm = np.arange(n)
    u = uniforms(key, 0, a)
    for i in range(a):
        j = i + min(int(u[i] * (n - i)), n - i - 1)
        perm[i], perm[j] = perm[j], perm[i]
    return np.sort(perm[:a])
