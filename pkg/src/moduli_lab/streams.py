"""Derived random streams: one root seed, one independent generator per purpose."""

import hashlib

import numpy as np


def stream_id(purpose: str) -> int:
    """Stable 64-bit id of a purpose string (independent of ``PYTHONHASHSEED``)."""
    return int.from_bytes(hashlib.sha256(purpose.encode()).digest()[:8], "little")


def stream(seed: int, purpose: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), stream_id(purpose)]))
