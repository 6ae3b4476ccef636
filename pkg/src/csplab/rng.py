"""Deterministic seed derivation.

Every sampling routine in this package takes an explicit integer seed and is a
pure function of (parameters, seed).  When an experiment needs many streams
(one per trial, per grid cell, ...), sub-seeds are derived by hashing the
master seed together with a label and the stream coordinates, so results do
not depend on execution order or worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np

MAX_SEED = 2**64


def derive_seed(master: int, *parts: object) -> int:
    """Derive a 64-bit sub-seed from a master seed and stream coordinates.

    Coordinates are rendered with repr(), so ints, floats and short strings
    are all acceptable.  The same (master, parts) always yields the same
    sub-seed.
    """
    text = repr(int(master)) + "|" + "|".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") % MAX_SEED


def make_rng(seed: int) -> np.random.Generator:
    """Build the generator used by all samplers (PCG64, fixed algorithm)."""
    if not 0 <= int(seed) < MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(int(seed)))
