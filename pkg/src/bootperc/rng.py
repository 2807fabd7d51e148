"""Seed-stream derivation.

Every random component draws from its own substream, derived from a user
seed plus a tuple of purpose tags (strings or ints).  Substreams are built
on numpy's splittable ``SeedSequence``, so graph sampling, seed-set choice
and selection-rule randomness never share state: re-running one component
with the same seed is bit-reproducible regardless of what else ran.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _tag_to_int(tag) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    return int(tag) & _MASK64


def seed_sequence(seed: int, *tags) -> np.random.SeedSequence:
    """SeedSequence keyed by (seed, *tags)."""
    entropy = [int(seed) & _MASK64] + [_tag_to_int(t) for t in tags]
    return np.random.SeedSequence(entropy)


def substream(seed: int, *tags) -> np.random.Generator:
    """Independent Generator for the given (seed, *tags) key."""
    return np.random.default_rng(seed_sequence(seed, *tags))


def derive_seed(seed: int, *tags) -> int:
    """Stable 64-bit integer seed derived from (seed, *tags).

    Used where an API wants a plain integer seed (e.g. per-trial graph
    parameters) rather than a Generator.
    """
    return int(seed_sequence(seed, *tags).generate_state(1, np.uint64)[0])
