"""Zipf content-popularity model.

Requests hit a catalog of ``n_files`` items ranked by popularity; rank f
(1-indexed) is requested with probability f^-skew / sum_n n^-skew.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["PopularityModel", "zipf_pmf", "sample_request"]


@dataclass(frozen=True)
class PopularityModel:
    """Immutable Zipf request distribution over ranks 1..n_files."""

    n_files: int
    skew: float
    pmf: np.ndarray = field(repr=False)

    @property
    def cdf(self) -> np.ndarray:
        return np.cumsum(self.pmf)


def zipf_pmf(n_files: int, skew: float) -> PopularityModel:
    """Build the Zipf PMF by direct summation of the normalizer.

    Parameters
    ----------
    n_files : int
        Catalog size, at least 1.
    skew : float
        Concentration parameter, >= 0 (0 gives the uniform distribution).
    """
    if n_files < 1:
        raise ValueError(f"n_files = {n_files} must be >= 1")
    if skew < 0.0:
        raise ValueError(f"skew = {skew} must be >= 0")
    ranks = np.arange(1, n_files + 1, dtype=np.float64)
    weights = ranks ** (-float(skew))
    pmf = weights / weights.sum()
    return PopularityModel(n_files=int(n_files), skew=float(skew), pmf=pmf)


def sample_request(model: PopularityModel, rng: np.random.Generator, size: int | None = None):
    """Draw file ranks (1-indexed) from the popularity distribution.

    Inverse-CDF sampling: deterministic given the generator state. Returns a
    single int when ``size`` is None, else an int array of that shape.
    """
    u = rng.random(size)
    idx = np.searchsorted(model.cdf, u, side="right")
    # Guard the u == 1.0 - eps edge against cumulative rounding.
    idx = np.minimum(idx, model.n_files - 1)
    if size is None:
        return int(idx) + 1
    return idx + 1
