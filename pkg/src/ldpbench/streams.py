"""Deterministic random streams, independently derivable from a master seed.

Every source of randomness in the package is a numpy Generator obtained
through :func:`substream`, keyed by the master seed plus a derivation path
(purpose tag and integer indices). Identical paths always yield identical
streams, so any experiment cell can be reproduced in isolation and cells can
run concurrently without sharing generator state.
"""

from __future__ import annotations

import operator
import zlib
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SeededStream:
    """A numpy Generator together with the derivation path that produced it."""

    generator: np.random.Generator
    lineage: tuple

    def random(self, *args, **kwargs):
        return self.generator.random(*args, **kwargs)


def _entropy_word(part) -> int:
    """Map a path element to a non-negative integer for SeedSequence entropy."""
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    word = operator.index(part)
    if word < 0:
        raise ValueError(f"stream path elements must be non-negative, got {part!r}")
    return word


def substream(master_seed: int, *path) -> SeededStream:
    """Derive the stream identified by (master_seed, *path).

    Path elements are purpose tags (strings) and indices (non-negative
    integers). The derivation is splittable and collision-resistant via
    numpy's SeedSequence, and stable across processes.
    """
    entropy = [_entropy_word(master_seed)] + [_entropy_word(p) for p in path]
    generator = np.random.default_rng(np.random.SeedSequence(entropy))
    return SeededStream(generator=generator, lineage=(master_seed, *path))


def as_generator(rng) -> np.random.Generator:
    """Accept either a SeededStream or a bare numpy Generator."""
    if isinstance(rng, SeededStream):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected a numpy Generator or SeededStream, got {type(rng).__name__}")


def lineage_of(rng) -> tuple | None:
    return rng.lineage if isinstance(rng, SeededStream) else None
