"""Seeded random number generation with tagged sub-stream derivation.

One root seed drives the whole pipeline; every consumer derives its own
stream from (root seed, purpose tag) so adding a consumer never perturbs
the draws of existing ones.  PCG64 gives identical draw sequences across
platforms for a given seed.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(root_seed: int, tag: str) -> int:
    """Stable 64-bit seed from a root seed and a purpose tag."""
    digest = hashlib.sha256(f"{root_seed}:{tag}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(root_seed: int, tag: str = "") -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(root_seed, tag)))
