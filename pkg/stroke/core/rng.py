"""
Seeded random streams.

Every stochastic component (bootstrap, SMOTE, fold shuffling, SAG epochs)
draws from a labeled child stream of one master seed, so experiments are
bit-reproducible and parallel tasks never share state.
"""

import hashlib
from typing import Optional

import numpy as np

DEFAULT_SEED = 42


class RngStream:
    """
    Deterministic random stream keyed by (seed, label).

    Single consumer: parallel work must derive its own child stream.
    """

    def __init__(self, seed: int, label: str):
        if not label:
            raise ValueError("RngStream label must be non-empty")
        self.seed = int(seed)
        self.label = label

        # Label hashed into the spawn key so distinct labels are independent
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        spawn_key = tuple(int(w) for w in np.frombuffer(digest, dtype=np.uint32))
        sequence = np.random.SeedSequence(entropy=self.seed % (1 << 64), spawn_key=spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def child(self, label: str) -> "RngStream":
        """Independent stream for a sub-task, e.g. child("tree-7")"""
        if not label:
            raise ValueError("RngStream label must be non-empty")
        return RngStream(self.seed, f"{self.label}/{label}")

    # Thin wrappers over numpy.random.Generator

    def random(self, size: Optional[int] = None):
        return self.generator.random(size)

    def integers(self, low: int, high: int, size: Optional[int] = None):
        return self.generator.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)

    def choice(self, n: int, size: int, replace: bool = True) -> np.ndarray:
        return self.generator.choice(n, size=size, replace=replace)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, label={self.label!r})"


def derive_stream(master_seed: int, label: str) -> RngStream:
    """Child stream of the master seed for one labeled component"""
    return RngStream(master_seed, label)
