"""Input validation and seeded randomness helpers."""

import numpy as np
from sklearn.utils import check_array


def check_points(X, allow_empty=True):
    """Return ``X`` as a float ``(n, 2)`` array, rejecting NaN/inf."""
    if X is None:
        raise ValueError("points must not be None")
    arr = np.asarray(X, dtype=float)
    if arr.size == 0:
        if not allow_empty:
            raise ValueError("at least one point is required")
        return np.zeros((0, 2))
    arr = check_array(arr, dtype=float, ensure_2d=True)
    if arr.shape[1] != 2:
        raise ValueError(f"points must have shape (n, 2), got {arr.shape}")
    return arr


def make_rng(seed, *key):
    """Counter-based generator for the stream identified by ``(seed, *key)``.

    Streams with different keys are statistically independent and stable
    across runs, which is what per-cell and per-retry reproducibility needs.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    seed = 0 if seed is None else int(seed)
    spawn_key = tuple(int(k) & 0xFFFFFFFF for k in key)
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(rng):
    """Draw a fresh integer seed from ``rng``."""
    return int(rng.integers(0, 2**63 - 1))


def stream_seed(seed, *key):
    """Integer seed for the sub-stream ``(seed, *key)``; stable across runs."""
    seed = 0 if seed is None else int(seed)
    spawn_key = tuple(int(k) & 0xFFFFFFFF for k in key)
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=spawn_key)
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)
