"""Probability distributions over the integer domain [0, n]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Tolerance on the total mass of a distribution.
SUM_TOL = 1e-10


@dataclass(frozen=True)
class Distribution:
    """A probability vector over the integers 0..n (n + 1 weights).

    Weights must be non-negative and sum to 1 within ``SUM_TOL``. The weight
    array is copied and frozen, so instances are safe to share.
    """

    n: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] != self.n + 1:
            raise ValueError(f"expected {self.n + 1} weights for domain [0, {self.n}], got shape {w.shape}")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        total = float(w.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_weights(cls, weights) -> "Distribution":
        w = np.asarray(weights, dtype=np.float64)
        return cls(n=w.shape[0] - 1, weights=w)

    @classmethod
    def uniform(cls, n: int) -> "Distribution":
        return cls(n=n, weights=np.full(n + 1, 1.0 / (n + 1)))

    @classmethod
    def point_mass(cls, n: int, at: int) -> "Distribution":
        w = np.zeros(n + 1)
        w[at] = 1.0
        return cls(n=n, weights=w)

    def support(self) -> np.ndarray:
        """Indices carrying strictly positive mass."""
        return np.flatnonzero(self.weights > 0)
