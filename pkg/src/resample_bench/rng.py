"""Seed derivation for reproducible, order-independent random streams.

Every stochastic component draws from its own named sub-stream so that
results do not depend on execution order and individual components can be
reproduced in isolation (running SMOTE alone with seed s is bit-identical
to the SMOTE half of a combined run with seed s).
"""

import hashlib

import numpy as np

__all__ = ["derive_seed", "substream"]

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, *labels) -> int:
    """Derive a 64-bit sub-seed from a base seed and a label path.

    The derivation is a SHA-256 digest of the decimal seed joined with the
    stringified labels, so it is stable across platforms and Python builds
    (unlike hash()).
    """
    h = hashlib.sha256()
    h.update(str(int(seed) & _MASK64).encode("ascii"))
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little")


def substream(seed: int, *labels) -> np.random.Generator:
    """A PCG64 generator seeded from (seed, *labels).

    PCG64 produces the same stream on every platform for a given seed,
    which the determinism guarantees rely on.
    """
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *labels)))
