"""Seeded random streams.

Every stream is a Philox-4x64 counter-based generator keyed by a
``numpy.random.SeedSequence`` built from a root seed and a tuple of
non-negative integers (experiment tag, N, trial, ...).  The same root and
key give the same stream on every platform, independent of the order in
which streams are created.
"""
from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _key_part(k) -> int:
    if isinstance(k, str):
        return zlib.crc32(k.encode("utf-8"))
    k = int(k)
    if k < 0:
        raise ValueError(f"stream keys must be non-negative, got {k}")
    return k


def stream(seed: int, *key) -> np.random.Generator:
    """Generator for root ``seed`` and stream ``key``."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(_key_part(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key) -> int:
    """A 63-bit integer seed for the sub-stream ``key`` (recorded in result rows)."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(_key_part(k) for k in key))
    hi, lo = (int(w) for w in ss.generate_state(2, dtype=np.uint32))
    return ((hi << 32) | lo) >> 1
