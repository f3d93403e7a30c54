"""
Counter-based random streams split per component.

Every randomized operation draws from a Philox generator keyed by a hash of
(seed, labels). Streams for different labels are independent, so reordering
unrelated components does not perturb each other's draws.
"""

import hashlib

import numpy as np


def derive_key(seed: int, *labels: object) -> int:
    """128-bit Philox key for (seed, labels)."""
    material = "\x1f".join([str(int(seed))] + [str(label) for label in labels])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:16], "little")


def rng_for(seed: int, *labels: object) -> np.random.Generator:
    """Generator for one component's stream; identical (seed, labels) give identical draws."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *labels)))
