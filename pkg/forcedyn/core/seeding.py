"""
Deterministic seed derivation.

All randomness in an experiment flows from one root seed. Each consumer
derives its own child seed from the root and a tuple of purpose tags, so
adding a new consumer never shifts the random streams of existing ones.

Examples:
    >>> child = derive_seed(7, "grid", "round-15")
    >>> rng = make_rng(7, "trajectories", "round-15")
"""

import hashlib
from typing import Union

import numpy as np

SeedTag = Union[str, int, float]

_SEED_MASK = (1 << 63) - 1


def derive_seed(root: int, *tags: SeedTag) -> int:
    """
    Derive a child seed from a root seed and purpose tags.

    The child is the first 8 bytes of SHA-256 over the root and the tags,
    masked to 63 bits so it is a valid numpy seed on every platform.

    Args:
        root: Root experiment seed
        *tags: Purpose tags (command, hole id, trial index, ...)

    Returns:
        Non-negative 63-bit integer seed
    """
    payload = "/".join([str(int(root))] + [str(tag) for tag in tags])
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & _SEED_MASK


def make_rng(root: int, *tags: SeedTag) -> np.random.Generator:
    """Return a numpy Generator seeded with ``derive_seed(root, *tags)``."""
    return np.random.default_rng(derive_seed(root, *tags))
