"""Deterministic stream derivation from a single 64-bit root seed.

Every randomized experiment draws from ``stream(root_seed, name)``: the
name is hashed with FNV-1a, mixed into the root seed by two splitmix64
rounds, and the result seeds a NumPy generator.  Identical (seed, name)
pairs therefore reproduce identical draws, independent of the order in
which experiments run.
"""

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One splitmix64 output for the given state (Steele et al. mixing)."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def fnv1a64(text: str) -> int:
    """FNV-1a hash of the UTF-8 bytes of ``text`` (stable across runs)."""
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


def derive_seed(root_seed: int, name: str) -> int:
    """64-bit child seed for the substream ``name``."""
    x = (int(root_seed) & _MASK) ^ fnv1a64(name)
    return splitmix64(splitmix64(x))


def stream(root_seed: int, name: str) -> np.random.Generator:
    """NumPy generator for the named substream of ``root_seed``."""
    return np.random.default_rng(derive_seed(root_seed, name))
