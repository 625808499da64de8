# utils/streams.py
"""
Named, independent random sub-streams derived from one master seed.

Every consumer asks for a stream by (purpose, *ids), e.g. ("train", client, round).
Adding a new purpose never shifts the draws of an existing one.
"""
import hashlib
from typing import Union

import numpy as np

StreamKey = Union[int, str]


def _purpose_key(purpose: str) -> int:
    # md5 of the name, truncated to 32 bits.
    return int(hashlib.md5(purpose.encode("utf-8")).hexdigest()[:8], 16)


def _entropy(master_seed: int, purpose: str, ids) -> list:
    words = [int(master_seed) & 0xFFFFFFFF, _purpose_key(purpose)]
    for item in ids:
        if isinstance(item, str):
            words.append(_purpose_key(item))
        else:
            words.append(int(item) & 0xFFFFFFFF)
    return words


def stream(master_seed: int, purpose: str, *ids: StreamKey) -> np.random.Generator:
    """Return a fresh Generator for the named sub-stream."""
    return np.random.default_rng(np.random.SeedSequence(_entropy(master_seed, purpose, ids)))


def derive_seed(master_seed: int, purpose: str, *ids: StreamKey) -> int:
    """Return a 32-bit integer seed for APIs that take a plain int."""
    seq = np.random.SeedSequence(_entropy(master_seed, purpose, ids))
    return int(seq.generate_state(1, dtype=np.uint32)[0])
