"""Seeded random streams.

Every consumer derives its own generator from the run seed plus a task key, so
results never depend on call order or on a shared global state.
"""

import zlib

import numpy as np


def _key(k) -> int:
    if isinstance(k, (int, np.integer)):
        return int(k) & 0xFFFFFFFF
    return zlib.crc32(str(k).encode())


def substream(seed: int, *keys) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(_key(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
