"""Closed-form offloading performance of the two-tier cache network.

The macro tier is modelled as caching everything (backhaul), helpers cache
file f independently with probability q[f]. A request succeeds in the sense
of "offloaded" when the user associates with a helper and its downlink SINR
clears the threshold. The expressions here are the interference-limited
closed forms (thermal noise neglected); the ``sim`` module provides the
Monte Carlo ground truth they are validated against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CachingPolicy, NetworkConfig
from .popularity import PopularityModel
from .specfun import HypergeometricArgs, hyp2f1, hyp2f1_asymptotic_tail

__all__ = [
    "ClosedFormConstants",
    "association_weight",
    "constants",
    "association_prob",
    "helper_active_prob",
    "offloading_prob",
    "offloading_prob_saturated",
    "offloading_prob_lower_bound",
    "conditional_success_prob",
]

# Cell-load shape parameter of the gamma approximation for PPP cell areas.
_LOAD_SHAPE = 3.5


def association_weight(cfg: NetworkConfig) -> float:
    """Relative association weight of the macro tier.

    Returns ``(lambda1/lambda2) * (P12*B12)^(2/alpha)``: the macro tier's
    effective density in biased-received-power competition against a helper
    tier of unit caching probability. A user requesting file f associates
    with a helper with probability q[f] / (weight + q[f]).
    """
    return cfg.lambda12 * (cfg.p12 * cfg.b12) ** (2.0 / cfg.alpha)


@dataclass(frozen=True)
class ClosedFormConstants:
    """Threshold-dependent constants of the offloading probability.

    ``c1`` aggregates macro-tier interference plus association pressure,
    ``c2`` the interference from helpers not caching the requested file,
    ``c3`` (in [-1, 0]) the correction for caching helpers. The per-file
    success denominator is ``c1 + c2*pa + c3*pa*q[f] + q[f]`` with ``pa``
    the helper active probability.
    """

    c1: float
    c2: float
    c3: float


def constants(cfg: NetworkConfig) -> ClosedFormConstants:
    """Evaluate the closed-form constants for a network configuration."""
    a = -2.0 / cfg.alpha
    c = 1.0 + a
    g0 = cfg.gamma0_lin
    # Macro-tier term: hypergeometric argument carries the antenna split and
    # bias of the cross-tier interference exclusion zone.
    z1 = -g0 / (cfg.m1 * cfg.b12)
    c1 = association_weight(cfg) * hyp2f1(HypergeometricArgs(a, cfg.m1, c, z1))
    # Helper tier is single antenna; c2 is exactly the large-z asymptote of
    # its hypergeometric factor.
    c2 = hyp2f1_asymptotic_tail(cfg.alpha, 1, g0)
    c3 = hyp2f1(HypergeometricArgs(a, 1, c, -g0)) - c2 - 1.0
    return ClosedFormConstants(c1=c1, c2=c2, c3=c3)


def _check_inputs(cfg: NetworkConfig, policy: CachingPolicy, pop: PopularityModel | None = None) -> None:
    if pop is not None and policy.n_files != pop.n_files:
        raise ValueError(
            f"policy has {policy.n_files} files but popularity has {pop.n_files}"
        )
    policy.check_capacity(cfg.n_cache)


def association_prob(cfg: NetworkConfig, policy: CachingPolicy, f: int) -> float:
    """Probability that a user requesting rank ``f`` (1-indexed) associates
    with the helper tier."""
    _check_inputs(cfg, policy)
    q = float(policy.q[f - 1])
    if q == 0.0:
        return 0.0
    return q / (association_weight(cfg) + q)


def helper_active_prob(cfg: NetworkConfig, policy: CachingPolicy, pop: PopularityModel) -> float:
    """Probability that a randomly chosen helper has at least one associated
    user and is therefore transmitting.

    Uses the gamma cell-load approximation: with ``s`` the per-request helper
    association probability averaged over the catalog,

        pa = 1 - (1 + (lambda_u / (3.5 lambda_2)) * s)^-3.5
    """
    _check_inputs(cfg, policy, pop)
    s = _association_mass(cfg, policy, pop)
    load = cfg.lambda_u / (_LOAD_SHAPE * cfg.lambda2) * s
    return 1.0 - (1.0 + load) ** (-_LOAD_SHAPE)


def _association_mass(cfg: NetworkConfig, policy: CachingPolicy, pop: PopularityModel) -> float:
    """Catalog-averaged helper association probability sum(p_f q_f / (A + q_f))."""
    w = association_weight(cfg)
    q = policy.q
    mask = q > 0.0
    return float(np.sum(pop.pmf[mask] * q[mask] / (w + q[mask])))


def _offloading_sum(q: np.ndarray, pmf: np.ndarray, c1: float, c2: float, c3: float, pa: float) -> float:
    """sum over f of p_f q_f / (c1 + c2*pa + c3*pa*q_f + q_f), skipping q_f = 0."""
    mask = q > 0.0
    qm = q[mask]
    denom = c1 + c2 * pa + (c3 * pa + 1.0) * qm
    return float(np.sum(pmf[mask] * qm / denom))


def offloading_prob(cfg: NetworkConfig, policy: CachingPolicy, pop: PopularityModel) -> float:
    """Successful offloading probability: the typical user associates with a
    helper and its SINR exceeds the threshold."""
    _check_inputs(cfg, policy, pop)
    k = constants(cfg)
    pa = helper_active_prob(cfg, policy, pop)
    return _offloading_sum(policy.q, pop.pmf, k.c1, k.c2, k.c3, pa)


def offloading_prob_saturated(cfg: NetworkConfig, policy: CachingPolicy, pop: PopularityModel) -> float:
    """Offloading probability in the fully loaded regime (every helper active)."""
    _check_inputs(cfg, policy, pop)
    k = constants(cfg)
    return _offloading_sum(policy.q, pop.pmf, k.c1, k.c2, k.c3, 1.0)


def offloading_prob_lower_bound(
    cfg: NetworkConfig, policy: CachingPolicy, pop: PopularityModel, pbar: float
) -> float:
    """Policy-independent lower bound on the offloading probability.

    ``pbar`` must upper-bound the true helper active probability of every
    feasible policy; plugging it in place of the policy-dependent value can
    only inflate each denominator, hence the bound.
    """
    if not 0.0 <= pbar <= 1.0:
        raise ValueError(f"pbar = {pbar} must lie in [0, 1]")
    _check_inputs(cfg, policy, pop)
    k = constants(cfg)
    return _offloading_sum(policy.q, pop.pmf, k.c1, k.c2, k.c3, pbar)


def conditional_success_prob(
    cfg: NetworkConfig, policy: CachingPolicy, pop: PopularityModel, f: int
) -> float:
    """SINR-success probability given the user requests rank ``f`` and is
    served by the helper tier.

    Satisfies the total-probability identity: offloading_prob equals
    sum_f p_f * association_prob(f) * conditional_success_prob(f).
    """
    _check_inputs(cfg, policy, pop)
    k = constants(cfg)
    pa = helper_active_prob(cfg, policy, pop)
    q = float(policy.q[f - 1])
    w = association_weight(cfg)
    return (w + q) / (k.c1 + k.c2 * pa + (k.c3 * pa + 1.0) * q)
