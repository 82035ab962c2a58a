"""Monte Carlo ground truth for the closed-form offloading analysis.

Each drop realizes the three point processes on a disc (macro BSs, helpers,
users, plus the probed user pinned at the origin), draws every helper's cache,
associates every user by biased received power among the BSs that can serve
its request, mutes helpers left without users, and measures the probed user's
downlink SINR against the threshold. No closed-form shortcut from the
analysis module is reused on the simulation path: association, activity and
fading are all sampled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.spatial import cKDTree

from .model import CachingPolicy, NetworkConfig, dbm_to_mw
from .placement import realize_batch
from .popularity import PopularityModel

__all__ = [
    "SimConfig",
    "SimEstimate",
    "MeanEstimate",
    "NetworkRealization",
    "DropRecord",
    "NoCandidateError",
    "drop_network",
    "associate",
    "evaluate_drop",
    "estimate_offloading",
    "estimate_association",
    "estimate_active_fraction",
]

_MIN_EXPECTED_POINTS = 30.0
_KNN = 16  # helper neighbours fetched per user before the exhaustive fallback


class NoCandidateError(RuntimeError):
    """The probed user has no serving candidate (empty window); resample."""


@dataclass(frozen=True)
class SimConfig:
    """Simulation window and budget on top of a network configuration.

    The window must keep the expected count of every point process at or
    above 30 and span at least ten nearest-helper spacings, which controls
    boundary truncation; the window-doubling invariance test in the suite
    backs this up empirically.
    """

    network: NetworkConfig
    window_radius: float = 2500.0
    n_drops: int = 20_000
    noise_dbm: float | None = None
    seed: int = 0
    require_selection: bool = False

    def __post_init__(self) -> None:
        if self.n_drops < 1:
            raise ValueError(f"n_drops = {self.n_drops} must be >= 1")
        area = math.pi * self.window_radius**2
        net = self.network
        for name in ("lambda1", "lambda2", "lambda_u"):
            expected = getattr(net, name) * area
            if expected < _MIN_EXPECTED_POINTS:
                raise ValueError(
                    f"window_radius {self.window_radius} m gives only {expected:.1f} "
                    f"expected points for {name}; need >= {_MIN_EXPECTED_POINTS}"
                )
        helper_spacing = 0.5 / math.sqrt(net.lambda2)
        if self.window_radius < 10.0 * helper_spacing:
            raise ValueError(
                f"window_radius {self.window_radius} m is below ten helper spacings "
                f"({10.0 * helper_spacing:.0f} m)"
            )

    @property
    def noise_mw(self) -> float:
        return 0.0 if self.noise_dbm is None else dbm_to_mw(self.noise_dbm)


@dataclass(frozen=True)
class SimEstimate:
    """Event-probability estimate with a normal-approximation 95% interval."""

    p_hat: float
    n_drops: int
    half_width_95: float

    @staticmethod
    def from_events(events: np.ndarray) -> "SimEstimate":
        n = events.size
        p = float(np.mean(events))
        return SimEstimate(p, n, 1.96 * math.sqrt(p * (1.0 - p) / n))


@dataclass(frozen=True)
class MeanEstimate:
    """Sample-mean estimate of a bounded per-drop quantity."""

    mean: float
    n_drops: int
    half_width_95: float

    @staticmethod
    def from_samples(values: np.ndarray) -> "MeanEstimate":
        n = values.size
        return MeanEstimate(float(np.mean(values)), n, 1.96 * float(np.std(values)) / math.sqrt(n))


@dataclass(frozen=True)
class NetworkRealization:
    """One drop: positions, realized caches, and the drawing configuration."""

    config: SimConfig
    mbs_xy: np.ndarray = field(repr=False)
    helper_xy: np.ndarray = field(repr=False)
    user_xy: np.ndarray = field(repr=False)
    cache_mask: np.ndarray = field(repr=False)  # (n_helpers, n_files) bool

    @property
    def n_files(self) -> int:
        return self.cache_mask.shape[1]


@dataclass(frozen=True)
class DropRecord:
    """Outcome of one drop for the probed user."""

    requested_rank: int
    tier2: bool
    success: bool
    active_fraction: float


def _ppp_disc(rng: np.random.Generator, density: float, radius: float) -> np.ndarray:
    n = rng.poisson(density * math.pi * radius**2)
    r = radius * np.sqrt(rng.random(n))
    theta = rng.random(n) * (2.0 * math.pi)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def drop_network(cfg: SimConfig, policy: CachingPolicy, rng: np.random.Generator) -> NetworkRealization:
    """Draw the three point processes and realize every helper's cache.

    Helpers draw caches independently (vectorized batch of the interval
    construction). The probed user sits at the origin and is not part of the
    user process.
    """
    net = cfg.network
    mbs = _ppp_disc(rng, net.lambda1, cfg.window_radius)
    helpers = _ppp_disc(rng, net.lambda2, cfg.window_radius)
    users = _ppp_disc(rng, net.lambda_u, cfg.window_radius)
    n_helpers = helpers.shape[0]
    mask = np.zeros((n_helpers, policy.n_files), dtype=bool)
    if n_helpers:
        ranks = realize_batch(policy, net.n_cache, n_helpers, rng)
        rows = np.repeat(np.arange(n_helpers), ranks.shape[1])
        cols = ranks.ravel() - 1
        keep = cols >= 0
        mask[rows[keep], cols[keep]] = True
    return NetworkRealization(
        config=cfg, mbs_xy=mbs, helper_xy=helpers, user_xy=users, cache_mask=mask
    )


def _tier_scale(net: NetworkConfig) -> float:
    """Helper-vs-macro association distance scale: the helper tier wins
    exactly when its candidate distance is below scale * (macro distance)."""
    return ((net.p2_mw * net.b2_lin) / (net.p1_mw * net.b1_lin)) ** (1.0 / net.alpha)


def associate(real: NetworkRealization, f: int) -> tuple[int, int]:
    """Associate the probed user (origin) requesting rank ``f`` by strongest
    biased received power.

    Candidates are every macro BS plus the helpers whose realized cache holds
    ``f``. Returns (tier, index into that tier's position array).

    Raises
    ------
    NoCandidateError
        If the window contains neither a macro BS nor a caching helper.
    """
    net = real.config.network
    d1sq = np.inf
    m_idx = -1
    if real.mbs_xy.shape[0]:
        norms = np.einsum("ij,ij->i", real.mbs_xy, real.mbs_xy)
        m_idx = int(np.argmin(norms))
        d1sq = float(norms[m_idx])
    caching = real.cache_mask[:, f - 1]
    d2sq = np.inf
    h_idx = -1
    if caching.any():
        hn = np.einsum("ij,ij->i", real.helper_xy, real.helper_xy)
        hn = np.where(caching, hn, np.inf)
        h_idx = int(np.argmin(hn))
        d2sq = float(hn[h_idx])
    if not (math.isfinite(d1sq) or math.isfinite(d2sq)):
        raise NoCandidateError(f"no macro BS and no helper caching rank {f} in window")
    if d2sq < d1sq * _tier_scale(net) ** 2:
        return 2, h_idx
    return 1, m_idx


def _associate_users(
    real: NetworkRealization, requests: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized association of every background user.

    Returns (tier2 flags, serving helper index or -1). Uses a k-nearest-
    neighbour shortlist per user: the closest shortlisted cacher is the
    global nearest cacher, and when the shortlist has no cacher but already
    extends past the macro-tier cutoff the helper tier has provably lost, so
    only the rare remainder needs an exhaustive scan.
    """
    net = real.config.network
    users = real.user_xy
    nu = users.shape[0]
    tier2 = np.zeros(nu, dtype=bool)
    serving = np.full(nu, -1, dtype=np.int64)
    if nu == 0 or real.helper_xy.shape[0] == 0:
        return tier2, serving

    if real.mbs_xy.shape[0]:
        d1 = cKDTree(real.mbs_xy).query(users, k=1)[0]
    else:
        d1 = np.full(nu, np.inf)
    cutoff = d1 * _tier_scale(net)

    n_helpers = real.helper_xy.shape[0]
    k = min(_KNN, n_helpers)
    dist, idx = cKDTree(real.helper_xy).query(users, k=k)
    if k == 1:
        dist, idx = dist[:, None], idx[:, None]
    hit = real.cache_mask[idx, requests[:, None]]
    has_hit = hit.any(axis=1)
    first = hit.argmax(axis=1)
    rowsel = np.arange(nu)
    near_dist = dist[rowsel, first]
    near_idx = idx[rowsel, first]

    won = has_hit & (near_dist < cutoff)
    tier2[won] = True
    serving[won] = near_idx[won]

    # Users whose shortlist had no cacher may still have one inside the
    # cutoff if the shortlist itself ends short of it.
    pending = np.flatnonzero(~has_hit & (dist[:, -1] < cutoff) & (k < n_helpers))
    for u in pending:
        cachers = np.flatnonzero(real.cache_mask[:, requests[u]])
        if cachers.size == 0:
            continue
        delta = real.helper_xy[cachers] - users[u]
        d2sq = np.einsum("ij,ij->i", delta, delta)
        best = int(np.argmin(d2sq))
        if d2sq[best] < cutoff[u] ** 2:
            tier2[u] = True
            serving[u] = cachers[best]
    return tier2, serving


def _active_fraction(real: NetworkRealization, active: np.ndarray) -> float:
    """Active share among helpers in the inner half-radius (edge control)."""
    hn = np.einsum("ij,ij->i", real.helper_xy, real.helper_xy)
    inner = hn <= (0.5 * real.config.window_radius) ** 2
    if not inner.any():
        return float("nan")
    return float(np.mean(active[inner]))


def evaluate_drop(
    real: NetworkRealization,
    pop: PopularityModel,
    rng: np.random.Generator,
    forced_rank: int | None = None,
) -> DropRecord:
    """Run one drop end to end and record the probed user's offloading event.

    Every background user draws its own request and associates; helpers with
    no associated user are muted. The probed user draws a request (or uses
    ``forced_rank``), associates, and, when helper-served, measures SINR with
    an exponential serving channel, gamma macro interference channels (shape
    = macro antenna count, unit mean) and exponential helper interference
    channels. Macro BSs always transmit.
    """
    cfg = real.config
    net = cfg.network
    nu = real.user_xy.shape[0]
    requests = np.searchsorted(pop.cdf, rng.random(nu))
    requests = np.minimum(requests, pop.n_files - 1)
    typical_rank = forced_rank if forced_rank is not None else int(
        np.minimum(np.searchsorted(pop.cdf, rng.random()), pop.n_files - 1) + 1
    )

    tier2_users, serving_users = _associate_users(real, requests)
    active = np.zeros(real.helper_xy.shape[0], dtype=bool)
    if tier2_users.any():
        active[serving_users[tier2_users]] = True
    frac = _active_fraction(real, active)

    tier, node = associate(real, typical_rank)
    if tier != 2:
        return DropRecord(typical_rank, tier2=False, success=False, active_fraction=frac)

    serving_xy = real.helper_xy[node]
    r_sq = float(serving_xy @ serving_xy)
    signal = net.p2_mw * rng.exponential() * r_sq ** (-net.alpha / 2.0)

    interference = 0.0
    if real.mbs_xy.shape[0]:
        dm = np.einsum("ij,ij->i", real.mbs_xy, real.mbs_xy)
        gains = rng.gamma(net.m1, 1.0 / net.m1, dm.size)
        interference += float(np.sum(net.p1_mw * gains * dm ** (-net.alpha / 2.0)))
    others = active.copy()
    others[node] = False
    oidx = np.flatnonzero(others)
    if oidx.size:
        dh = np.einsum("ij,ij->i", real.helper_xy[oidx], real.helper_xy[oidx])
        gains = rng.exponential(size=oidx.size)
        interference += float(np.sum(net.p2_mw * gains * dh ** (-net.alpha / 2.0)))

    sinr = signal / (interference + cfg.noise_mw)
    success = bool(sinr > net.gamma0_lin)
    if success and cfg.require_selection:
        rivals = int(np.sum(serving_users[tier2_users] == node))
        success = bool(rng.random() < 1.0 / (rivals + 1.0))
    return DropRecord(typical_rank, tier2=True, success=success, active_fraction=frac)


# ---------------------------------------------------------------------------
# Drop ensembles
# ---------------------------------------------------------------------------


def _run_chunk(
    cfg: SimConfig,
    policy: CachingPolicy,
    pop: PopularityModel,
    seeds: list[np.random.SeedSequence],
    forced_rank: int | None,
    association_only: bool,
) -> np.ndarray:
    out = np.empty((len(seeds), 3))
    for i, seed in enumerate(seeds):
        stream = seed
        while True:
            rng = np.random.default_rng(stream)
            real = drop_network(cfg, policy, rng)
            try:
                if association_only:
                    tier, _ = associate(real, forced_rank)
                    rec = DropRecord(forced_rank, tier == 2, False, float("nan"))
                else:
                    rec = evaluate_drop(real, pop, rng, forced_rank=forced_rank)
                break
            except NoCandidateError:
                stream = stream.spawn(1)[0]  # measure-zero empty window
        out[i] = (rec.success, rec.tier2, rec.active_fraction)
    return out


def _run_drops(
    cfg: SimConfig,
    policy: CachingPolicy,
    pop: PopularityModel,
    forced_rank: int | None = None,
    n_jobs: int = 1,
    association_only: bool = False,
) -> np.ndarray:
    """Independent drops with per-drop substreams; chunk layout (and hence
    every drawn number) is independent of the worker count."""
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_drops)
    n_chunks = min(cfg.n_drops, 256)
    chunks = [list(c) for c in np.array_split(np.asarray(seeds, dtype=object), n_chunks)]
    if n_jobs == 1:
        parts = [_run_chunk(cfg, policy, pop, c, forced_rank, association_only) for c in chunks]
    else:
        parts = Parallel(n_jobs=n_jobs)(
            delayed(_run_chunk)(cfg, policy, pop, c, forced_rank, association_only)
            for c in chunks
        )
    return np.concatenate(parts, axis=0)


def estimate_offloading(
    cfg: SimConfig, policy: CachingPolicy, pop: PopularityModel, n_jobs: int = 1
) -> SimEstimate:
    """Estimate the successful offloading probability over cfg.n_drops drops."""
    if policy.n_files != pop.n_files:
        raise ValueError("policy and popularity catalog sizes differ")
    if float(policy.q.sum()) == 0.0:
        return SimEstimate(0.0, cfg.n_drops, 0.0)
    rows = _run_drops(cfg, policy, pop, n_jobs=n_jobs)
    return SimEstimate.from_events(rows[:, 0])


def estimate_association(
    cfg: SimConfig, policy: CachingPolicy, pop: PopularityModel, f: int, n_jobs: int = 1
) -> SimEstimate:
    """Estimate the helper-association probability for the fixed rank ``f``.

    Only the probed user's association is evaluated (activity and SINR do not
    enter the event), so this path skips the background-user machinery.
    """
    rows = _run_drops(cfg, policy, pop, forced_rank=f, n_jobs=n_jobs, association_only=True)
    return SimEstimate.from_events(rows[:, 1])


def estimate_active_fraction(
    cfg: SimConfig, policy: CachingPolicy, pop: PopularityModel, n_jobs: int = 1
) -> MeanEstimate:
    """Estimate the mean fraction of transmitting helpers."""
    rows = _run_drops(cfg, policy, pop, n_jobs=n_jobs)
    frac = rows[:, 2]
    return MeanEstimate.from_samples(frac[np.isfinite(frac)])
