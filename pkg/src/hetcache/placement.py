"""Cache realization: turning caching probabilities into concrete file sets.

The interval construction lays segments of length q[f] end to end over
[0, sum(q)] and samples them with unit-spaced points at a common uniform
offset. Each draw yields distinct files (segments never exceed length 1),
the cache holds exactly n_cache files whenever sum(q) = n_cache, and file f
is included with probability exactly q[f].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import CachingPolicy

__all__ = ["CacheRealization", "realize", "realize_batch"]


@dataclass(frozen=True)
class CacheRealization:
    """Set of cached file ranks (1-indexed) drawn for one helper."""

    files: frozenset[int]

    def __contains__(self, rank: int) -> bool:
        return rank in self.files

    def __len__(self) -> int:
        return len(self.files)


def realize(policy: CachingPolicy, n_cache: int, rng: np.random.Generator) -> CacheRealization:
    """Draw one cache realization from the caching probabilities.

    With ``sum(q) = n_cache`` the result has exactly ``n_cache`` distinct
    files; a deficit ``sum(q) < n_cache`` yields proportionally fewer files
    (the construction runs over [0, sum(q)] unchanged). Boundary points
    belong to the segment on their right.
    """
    ranks = realize_batch(policy, n_cache, 1, rng)[0]
    return CacheRealization(files=frozenset(int(r) for r in ranks if r > 0))


def realize_batch(
    policy: CachingPolicy, n_cache: int, n_draws: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized independent cache draws, one row per helper.

    Returns an int array of shape (n_draws, ceil(sum(q))) of 1-indexed file
    ranks, zero-padded on rows that land fewer points (possible only when
    sum(q) is fractional or below n_cache).
    """
    q = policy.q
    if np.any(q > 1.0):
        raise ValueError("caching probabilities above 1 cannot be realized")
    total = float(q.sum())
    if total > n_cache + 1e-9:
        raise ValueError(f"sum(q) = {total:.12g} exceeds the cache capacity {n_cache}")
    width = min(total, float(n_cache))
    max_pts = int(math.ceil(width - 1e-12))
    if max_pts == 0:
        return np.zeros((n_draws, 0), dtype=np.int64)

    bounds = np.cumsum(q)
    u = rng.random((n_draws, 1))
    points = u + np.arange(max_pts, dtype=np.float64)[None, :]
    inside = points < width  # half-open window [0, sum(q))
    # side='right' puts boundary points into the right-hand segment and makes
    # zero-length segments (q[f] = 0) unreachable.
    files = np.searchsorted(bounds, points, side="right") + 1
    files[~inside] = 0
    files[files > q.size] = 0  # floating-point spill past the last boundary
    return files
