"""Probabilistic cache placement and offloading analysis for two-tier networks.

A macro cellular tier (backhauled, caches everything) is overlaid with dense
cache-equipped helpers. The package provides

* closed-form successful-offloading probability and its building blocks
  (``analysis``, ``specfun``),
* optimal caching-probability solvers: water-filling solutions of the
  tractable regimes, the lower-bound policy, a local solver for the exact
  objective, plus popular/uniform baselines (``optimizer``),
* the probabilistic cache realization construction (``placement``),
* a Poisson-point-process Monte Carlo simulator that validates every closed
  form (``sim``),
* an experiment CLI with CSV output (``cli``).
"""

from .analysis import (
    ClosedFormConstants,
    association_prob,
    association_weight,
    conditional_success_prob,
    constants,
    helper_active_prob,
    offloading_prob,
    offloading_prob_lower_bound,
    offloading_prob_saturated,
)
from .model import CachingPolicy, NetworkConfig, default_config
from .optimizer import (
    SolverReport,
    WaterfillingProblem,
    baseline_popular,
    baseline_uniform,
    solve_active_prob_max,
    solve_local,
    solve_lower_bound,
    solve_saturated,
    solve_sparse_users,
    solve_waterfilling,
)
from .placement import CacheRealization, realize, realize_batch
from .popularity import PopularityModel, sample_request, zipf_pmf
from .sim import (
    MeanEstimate,
    NetworkRealization,
    SimConfig,
    SimEstimate,
    associate,
    drop_network,
    estimate_active_fraction,
    estimate_association,
    estimate_offloading,
    evaluate_drop,
)
from .specfun import HypergeometricArgs, gamma, hyp2f1, hyp2f1_asymptotic_tail

__version__ = "0.1.0"

__all__ = [
    "CachingPolicy",
    "NetworkConfig",
    "default_config",
    "PopularityModel",
    "zipf_pmf",
    "sample_request",
    "ClosedFormConstants",
    "constants",
    "association_weight",
    "association_prob",
    "helper_active_prob",
    "offloading_prob",
    "offloading_prob_saturated",
    "offloading_prob_lower_bound",
    "conditional_success_prob",
    "WaterfillingProblem",
    "SolverReport",
    "solve_waterfilling",
    "solve_saturated",
    "solve_sparse_users",
    "solve_active_prob_max",
    "solve_lower_bound",
    "solve_local",
    "baseline_popular",
    "baseline_uniform",
    "CacheRealization",
    "realize",
    "realize_batch",
    "SimConfig",
    "SimEstimate",
    "MeanEstimate",
    "NetworkRealization",
    "drop_network",
    "associate",
    "evaluate_drop",
    "estimate_offloading",
    "estimate_association",
    "estimate_active_fraction",
    "HypergeometricArgs",
    "gamma",
    "hyp2f1",
    "hyp2f1_asymptotic_tail",
]
