"""Obfuscation mechanisms as explicit stochastic matrices.

A channel maps a true value i in [0, n] to a reported value j in [0, n] with
probability ``matrix[i, j]``. The module builds the truncated geometric and
k-randomized-response channels, measures the privacy level a channel actually
provides (both in the uniform and in the metric-graded sense), and applies a
channel to individual values with a caller-supplied random stream.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .streams import as_generator

#: Tolerance on each row's total probability.
ROW_SUM_TOL = 1e-12
#: Allowed absolute drift between iterated alpha powers and exp(-eps*k).
POWER_DRIFT_TOL = 1e-12


def absolute_distance(i, j):
    """Default ground metric on the integer domain: d(i, j) = |i - j|."""
    return abs(i - j)


@dataclass(frozen=True)
class PrivacyLevel:
    """Privacy budget epsilon (in nats) with its derived decay rate.

    ``alpha = exp(-epsilon)`` is the per-step decay of the geometric
    mechanism; ``one_minus_alpha`` is provided separately because computing
    1 - alpha directly loses precision for small epsilon.
    """

    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive and finite, got {self.epsilon!r}")

    @property
    def alpha(self) -> float:
        return math.exp(-self.epsilon)

    @property
    def one_minus_alpha(self) -> float:
        # -expm1 avoids cancellation when epsilon is tiny
        return -math.expm1(-self.epsilon)


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix C with C[i, j] = P[reported = j | true = i].

    The matrix is validated (non-negative entries, rows summing to 1 within
    ``ROW_SUM_TOL``), copied, and frozen; channels are immutable and safe to
    share across threads.
    """

    n: int
    matrix: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.shape != (self.n + 1, self.n + 1):
            raise ValueError(f"expected a {self.n + 1}x{self.n + 1} matrix, got shape {m.shape}")
        if np.any(m < 0):
            raise ValueError("channel entries must be non-negative")
        row_err = float(np.max(np.abs(m.sum(axis=1) - 1.0)))
        if row_err > ROW_SUM_TOL:
            raise ValueError(f"rows must sum to 1 (max deviation {row_err:.3e})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @cached_property
    def row_cdf(self) -> np.ndarray:
        """Per-row cumulative probabilities, used for inverse-CDF sampling."""
        c = np.cumsum(self.matrix, axis=1)
        c.setflags(write=False)
        return c


def _alpha_powers(level: PrivacyLevel, k_max: int) -> np.ndarray:
    """Powers alpha^0..alpha^k_max by repeated multiplication, drift-checked."""
    powers = np.empty(k_max + 1)
    powers[0] = 1.0
    for k in range(1, k_max + 1):
        powers[k] = powers[k - 1] * level.alpha
    drift = float(np.max(np.abs(powers - np.exp(-level.epsilon * np.arange(k_max + 1)))))
    if drift > POWER_DRIFT_TOL:
        raise ArithmeticError(f"alpha power recurrence drifted by {drift:.3e} at k_max={k_max}")
    return powers


def build_truncated_geometric(n: int, level: PrivacyLevel) -> Channel:
    """Geometric noise on [0, n] with the out-of-range tails folded onto 0 and n.

    Interior columns carry (1-alpha)/(1+alpha) * alpha^|i-j|; the boundary
    columns absorb the mass of the untruncated geometric lying outside the
    domain, which telescopes to alpha^i/(1+alpha) and alpha^(n-i)/(1+alpha).
    """
    if n < 1:
        raise ValueError("domain bound n must be at least 1 (got a single-point domain)")
    powers = _alpha_powers(level, n)
    one_plus = 1.0 + level.alpha
    interior = level.one_minus_alpha / one_plus
    idx = np.arange(n + 1)
    gap = np.abs(idx[:, None] - idx[None, :])
    m = interior * powers[gap]
    m[:, 0] = powers[idx] / one_plus
    m[:, n] = powers[n - idx] / one_plus
    return Channel(n=n, matrix=m, label="geometric")


def build_krr(k: int, level: PrivacyLevel) -> Channel:
    """k-randomized response: keep the true value with elevated probability.

    Diagonal entries are exp(eps)/(k-1+exp(eps)) and off-diagonal entries
    1/(k-1+exp(eps)); computed in terms of alpha = exp(-eps) so that large
    epsilon does not overflow.
    """
    if k < 2:
        raise ValueError(f"alphabet size k must be at least 2, got {k}")
    denom = 1.0 + (k - 1) * level.alpha
    m = np.full((k, k), level.alpha / denom)
    np.fill_diagonal(m, 1.0 / denom)
    return Channel(n=k - 1, matrix=m, label="krr")


def identity_channel(n: int) -> Channel:
    """The noiseless channel (reports the true value); useful as a baseline."""
    return Channel(n=n, matrix=np.eye(n + 1), label="identity")


def _log_ratio_by_pair(matrix: np.ndarray) -> np.ndarray:
    """max_y log(C[x, y] / C[x', y]) for every ordered pair (x, x').

    Columns where both entries are zero impose no constraint and are treated
    as -inf; a zero against a positive entry yields +inf.
    """
    with np.errstate(divide="ignore"):
        logm = np.log(matrix)
    diff = logm[:, None, :] - logm[None, :, :]
    diff[np.isnan(diff)] = -np.inf
    return diff.max(axis=2)


def tightest_ldp_epsilon(ch: Channel) -> float:
    """Smallest eps such that C[x, y] <= exp(eps) * C[x', y] for all x, x', y.

    Returns +inf when some column mixes zero and nonzero entries (the
    likelihood ratio is unbounded there).
    """
    return float(np.max(_log_ratio_by_pair(ch.matrix)))


def ground_metric_matrix(d, n: int) -> np.ndarray:
    """Tabulate a ground metric on [0, n]^2 and check it is one."""
    size = n + 1
    m = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            m[i, j] = d(i, j)
    if np.any(m < 0):
        raise ValueError("ground metric must be non-negative")
    if np.any(np.diag(m) != 0):
        raise ValueError("ground metric must vanish on the diagonal")
    if np.any(m != m.T):
        raise ValueError("ground metric must be symmetric")
    return m


def tightest_d_privacy_epsilon(ch: Channel, d=absolute_distance) -> float:
    """Smallest eps such that C[x, y] <= exp(eps * d(x, x')) * C[x', y] everywhere.

    The maximum of log(C[x, y]/C[x', y]) / d(x, x') over x != x' and y.
    Returns +inf when a column mixes zero and nonzero entries, and also when
    two distinct values at ground distance 0 have different rows.
    """
    dist = ground_metric_matrix(d, ch.n)
    num = _log_ratio_by_pair(ch.matrix)
    off = ~np.eye(ch.n + 1, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = num / dist
    # pairs at distance 0: unconstrained if the ratio is <= 1, hopeless otherwise
    degenerate = off & (dist == 0)
    scaled[degenerate & (num > 0)] = np.inf
    scaled[degenerate & (num <= 0)] = -np.inf
    return float(np.max(scaled[off]))


def apply(ch: Channel, x: int, rng) -> int:
    """Report a value for true value x: one inverse-CDF draw from row x."""
    x = operator.index(x)
    if not 0 <= x <= ch.n:
        raise ValueError(f"value {x} outside the domain [0, {ch.n}]")
    gen = as_generator(rng)
    j = int(np.searchsorted(ch.row_cdf[x], gen.random(), side="right"))
    return min(j, ch.n)


def apply_many(ch: Channel, values, rng) -> np.ndarray:
    """Vectorized :func:`apply`: one report per input value.

    Consumes exactly one uniform per value, in input order, so the output is
    independent of how values are grouped internally.
    """
    xs = np.asarray(values)
    if xs.dtype.kind not in "iu":
        raise ValueError("values must be integers")
    if xs.size and (xs.min() < 0 or xs.max() > ch.n):
        raise ValueError(f"values outside the domain [0, {ch.n}]")
    gen = as_generator(rng)
    u = gen.random(xs.shape[0])
    out = np.empty(xs.shape[0], dtype=np.int64)
    cdf = ch.row_cdf
    for v in np.unique(xs):
        mask = xs == v
        out[mask] = np.searchsorted(cdf[v], u[mask], side="right")
    np.minimum(out, ch.n, out=out)
    return out


def calibrate_epsilon_for_radius(target_ratio_log: float, radius: int) -> PrivacyLevel:
    """Pick eps so the geometric likelihood ratio within the given radius stays
    at most exp(target_ratio_log): eps = target_ratio_log / radius."""
    if not target_ratio_log > 0:
        raise ValueError(f"target_ratio_log must be positive, got {target_ratio_log!r}")
    radius = operator.index(radius)
    if radius < 1:
        raise ValueError(f"radius must be a positive integer, got {radius}")
    return PrivacyLevel(epsilon=target_ratio_log / radius)
