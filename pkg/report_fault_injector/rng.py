"""Named random streams derived from a single root seed.

Each consumer asks for its own stream by name, so adding a new consumer never
shifts the numbers another one draws.
"""

import hashlib

import numpy as np


def _spawn_key(name: str) -> tuple[int, ...]:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))


def stream(seed: int, name: str) -> np.random.Generator:
    """Return a generator for ``name`` under root ``seed``."""
    sequence = np.random.SeedSequence(entropy=seed % 2**64, spawn_key=_spawn_key(name))
    return np.random.default_rng(sequence)
