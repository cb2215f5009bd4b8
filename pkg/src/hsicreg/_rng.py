"""Deterministic random streams derived from a base seed and an index path.

Every piece of randomness in the package flows through `substream`: a
counter-based Philox generator keyed by ``(seed, *key)``.  The stream a given
key yields never depends on how many other streams exist or on the order they
are consumed in, so replicate-level work can be sharded across any number of
workers without changing a single drawn value.
"""
from __future__ import annotations

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for the stream keyed by ``(seed, *key)``."""
    ss = np.random.SeedSequence(entropy=_checked(seed), spawn_key=tuple(_checked(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse ``(seed, *key)`` into a single reusable 63-bit integer seed."""
    ss = np.random.SeedSequence(entropy=_checked(seed), spawn_key=tuple(_checked(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def _checked(value: int) -> int:
    out = int(value)
    if out < 0:
        raise ValueError(f"seeds and stream keys must be nonnegative integers, got {value!r}")
    return out
