"""Small shared helpers."""

from __future__ import annotations

import numpy as np


def rng_from(*parts: int) -> np.random.Generator:
    """Deterministic generator keyed by a tuple of non-negative integers."""
    for p in parts:
        if p < 0:
            raise ValueError(f"seed components must be non-negative, got {p}")
    return np.random.default_rng(np.random.SeedSequence(list(parts)))


def derive_seed(*parts: int) -> int:
    """Collapse a seed tuple into a single integer seed."""
    ss = np.random.SeedSequence(list(parts))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
