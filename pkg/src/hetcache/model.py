"""Network and caching-policy types shared by the analysis, solvers and simulator.

Radio quantities are entered in the customary units (dBm powers, dB biases
and SINR threshold, densities per square meter) and converted to linear scale
exactly once, here; all downstream math is linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = ["NetworkConfig", "CachingPolicy", "db_to_linear", "dbm_to_mw"]

REF_CELL_AREA = np.pi * 250.0**2
"""Reference disc area (m^2) used when densities are given as per-cell counts."""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def dbm_to_mw(value_dbm: float) -> float:
    return 10.0 ** (value_dbm / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Two-tier topology: macro tier (1) overlaid with cache helpers (2).

    Attributes
    ----------
    lambda1, lambda2, lambda_u : float
        Macro-BS, helper and user densities in points per m^2.
    m1 : int
        Macro-BS antenna count (helpers are single-antenna).
    p1_dbm, p2_dbm : float
        Per-tier transmit powers.
    b1_db, b2_db : float
        Association bias factors.
    alpha : float
        Path-loss exponent, > 2.
    gamma0_db : float
        SINR threshold defining transmission success.
    n_cache : int
        Helper cache capacity in files.
    """

    lambda1: float
    lambda2: float
    lambda_u: float
    m1: int = 4
    p1_dbm: float = 46.0
    p2_dbm: float = 21.0
    b1_db: float = 0.0
    b2_db: float = 10.0
    alpha: float = 3.7
    gamma0_db: float = -10.0
    n_cache: int = 100

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2", "lambda_u"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.alpha <= 2.0:
            raise ValueError(f"alpha = {self.alpha} must exceed 2")
        if self.m1 < 1 or self.m1 != int(self.m1):
            raise ValueError(f"m1 = {self.m1} must be a positive integer")
        if self.n_cache < 0:
            raise ValueError(f"n_cache = {self.n_cache} must be >= 0")

    # -- linear-scale views ---------------------------------------------
    @property
    def p1_mw(self) -> float:
        return dbm_to_mw(self.p1_dbm)

    @property
    def p2_mw(self) -> float:
        return dbm_to_mw(self.p2_dbm)

    @property
    def b1_lin(self) -> float:
        return db_to_linear(self.b1_db)

    @property
    def b2_lin(self) -> float:
        return db_to_linear(self.b2_db)

    @property
    def gamma0_lin(self) -> float:
        return db_to_linear(self.gamma0_db)

    # -- cross-tier ratios (tier 1 relative to tier 2) -------------------
    @property
    def lambda12(self) -> float:
        return self.lambda1 / self.lambda2

    @property
    def p12(self) -> float:
        return self.p1_mw / self.p2_mw

    @property
    def b12(self) -> float:
        return self.b1_lin / self.b2_lin

    def with_(self, **changes) -> "NetworkConfig":
        """Functional update, e.g. ``cfg.with_(gamma0_db=0.0)``."""
        return replace(self, **changes)


def default_config(**overrides) -> NetworkConfig:
    """Baseline fixture: 1 macro BS and 25 helpers/users per reference cell,
    46/21 dBm powers, 0/10 dB biases, alpha 3.7, -10 dB threshold."""
    cfg = NetworkConfig(
        lambda1=1.0 / REF_CELL_AREA,
        lambda2=25.0 / REF_CELL_AREA,
        lambda_u=25.0 / REF_CELL_AREA,
    )
    return cfg.with_(**overrides) if overrides else cfg


@dataclass(frozen=True)
class CachingPolicy:
    """Per-file helper caching probabilities q[f], 0-indexed over ranks 1..N_f."""

    q: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 1 or q.size < 1:
            raise ValueError("q must be a non-empty 1-D vector")
        if np.any(q < -1e-12) or np.any(q > 1.0 + 1e-12):
            raise ValueError("caching probabilities must lie in [0, 1]")
        object.__setattr__(self, "q", np.clip(q, 0.0, 1.0))

    @property
    def n_files(self) -> int:
        return self.q.size

    def total(self) -> float:
        return float(self.q.sum())

    def check_capacity(self, n_cache: int, tol: float = 1e-9) -> None:
        """Raise unless sum(q) <= n_cache + tol."""
        if self.total() > n_cache + tol:
            raise ValueError(
                f"policy mass {self.total():.12g} exceeds cache capacity {n_cache}"
            )
