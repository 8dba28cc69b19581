"""Deterministic seed derivation.

Every experiment draws all randomness from one master seed. Child streams are
derived by hashing the master seed together with a component name and indices,
so trials are reproducible independently of execution order.
"""

from __future__ import annotations

import hashlib

import numpy as np


def child_seed(master: int, *parts) -> int:
    """64-bit child seed from a master seed plus component name/index parts."""
    label = ":".join([str(int(master))] + [str(p) for p in parts])
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def rng_for(master: int, *parts) -> np.random.Generator:
    """Seeded generator for one component of an experiment."""
    return np.random.default_rng(child_seed(master, *parts))
