"""Seeded, splittable random streams.

Every sampler in the package takes an explicit ``numpy.random.Generator``.
Experiments derive independent substreams from ``(seed, namespace, index)``
so that any single trial can be replayed in isolation.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part: int | str) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValueError(f"substream keys must be non-negative, got {part}")
    return int(part)


def substream(seed: int, *keys: int | str) -> np.random.Generator:
    """Return a generator determined by ``seed`` and the key path ``keys``.

    String keys are hashed with CRC32, so ``substream(7, "gap", 3)`` is stable
    across processes and Python versions.
    """
    entropy = [_key(seed), *(_key(k) for k in keys)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def child_seed(rng: np.random.Generator) -> int:
    """Draw a 63-bit integer seed from ``rng`` (for kernels with their own RNG)."""
    return int(rng.integers(0, 2**63 - 1))
