"""Deterministic random-number streams.

Every consumer of randomness gets its own named stream so that adding or
reordering draws in one subsystem never perturbs another. A stream is fully
determined by the root seed and the path of labels used to reach it.
"""

from __future__ import annotations

import hashlib

import numpy as np


class Rng:
    """A seeded generator addressable by (seed, label-path)."""

    def __init__(self, key: tuple[int, ...]):
        self.key = key
        self.gen = np.random.default_rng(np.random.SeedSequence(key))

    def split(self, label: str) -> "Rng":
        """Derive an independent child stream; deterministic per (key, label)."""
        return Rng(self.key + _label_words(label))

    def __repr__(self) -> str:
        return f"Rng(key={self.key})"


def make_rng(seed: int) -> Rng:
    return Rng((int(seed),))


def split_rng(rng: Rng, label: str) -> Rng:
    return rng.split(label)


def _label_words(label: str) -> tuple[int, ...]:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return tuple(int.from_bytes(digest[i: i + 4], "little") for i in range(0, 16, 4))
