# services/resampler/rng.py
"""
Named random streams. Every stream is PCG64 seeded from
SeedSequence(rng_seed, spawn_key=key), so a stream depends only on the run
seed and its key, never on how work is split across processes.
"""

from __future__ import annotations

import numpy as np

SEED_STREAM = 0
PIXEL_STREAM = 1
REPLICATE_STREAM = 2
DRAW_STREAM = 3
OBSERVED_STREAM = 4
FLOOR_STREAM = 5


def stream(rng_seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(rng_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def seed_stream(rng_seed: int) -> np.random.Generator:
    return stream(rng_seed, SEED_STREAM)


def pixel_stream(rng_seed: int, index: int) -> np.random.Generator:
    return stream(rng_seed, PIXEL_STREAM, index)


def replicate_stream(rng_seed: int, ladder_index: int, replicate: int) -> np.random.Generator:
    return stream(rng_seed, REPLICATE_STREAM, ladder_index, replicate)


def draw_stream(rng_seed: int, draw: int) -> np.random.Generator:
    return stream(rng_seed, DRAW_STREAM, draw)


def observed_stream(rng_seed: int, replicate: int) -> np.random.Generator:
    """Observed field shared by every ladder size of one replicate (nested crops)."""
    return stream(rng_seed, OBSERVED_STREAM, replicate)


def floor_stream(rng_seed: int, replicate: int) -> np.random.Generator:
    return stream(rng_seed, FLOOR_STREAM, replicate)


def child_seed(rng: np.random.Generator) -> int:
    """A 63-bit seed for a nested run, drawn from an existing stream."""
    return int(rng.integers(0, 2**63 - 1))
