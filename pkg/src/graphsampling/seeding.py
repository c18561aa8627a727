"""Deterministic seeding helpers.

All randomness in the package flows through counter-based Philox
generators keyed by a user seed plus an optional stream tuple, so each
(seed, trial, ...) combination maps to an independent stream that does
not depend on evaluation order.
"""
from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator for the given seed and derivation stream.

    ``make_rng(seed)`` is the root stream; ``make_rng(seed, t)`` and
    ``make_rng(seed, t, j)`` are independent sub-streams (trial t,
    sub-stream j) derived by seed-sequence hashing.
    """
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    key = tuple(int(s) for s in stream)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def child_seed(seed: int, *stream: int) -> int:
    """Collapse (seed, stream) to a single integer sub-seed.

    Useful when an API takes a plain seed but the caller needs per-trial
    derivation; the mapping is the same seed-sequence hash as make_rng.
    """
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    ss = np.random.SeedSequence(entropy=int(seed),
                                spawn_key=tuple(int(s) for s in stream))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
