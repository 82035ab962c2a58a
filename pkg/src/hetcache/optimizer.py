"""Caching-probability solvers.

Every tractable variant of the placement problem shares one structure:
maximize ``sum_f p_f q_f / (c_num + c_den * q_f)`` over the capped box
``0 <= q <= 1, sum(q) <= n_cache``. Its KKT solution is a water-filling rule

    q_f = clamp_01( sqrt(c_num / nu) * sqrt(p_f) / c_den - c_num / c_den )

with the multiplier ``nu`` found by bisection on the capacity constraint.
The saturated-network, sparse-user, activity-maximizing and lower-bound
solvers differ only in their (c_num, c_den); the general objective with its
policy-dependent helper activity is not concave, so it gets a projected
gradient ascent instead, warm-started from the lower-bound solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import association_weight, constants, helper_active_prob
from .model import CachingPolicy, NetworkConfig
from .popularity import PopularityModel

__all__ = [
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
]

_SUM_TOL = 1e-9
_BISECT_MAX_ITER = 200
_NU_FLOOR = 1e-18
_DEN_FLOOR = 1e-12


@dataclass(frozen=True)
class WaterfillingProblem:
    """One instance of the shared fractional objective.

    ``c_num`` is the additive denominator constant and ``c_den`` the
    coefficient of q in the denominator; both must be positive for the
    square-root form of the solution to be real.
    """

    c_num: float
    c_den: float
    popularity: PopularityModel
    n_cache: int

    def __post_init__(self) -> None:
        if not self.c_num > 0.0:
            raise ValueError(f"c_num = {self.c_num} must be > 0")
        if not self.c_den > 0.0:
            raise ValueError(f"c_den = {self.c_den} must be > 0")
        if self.n_cache < 0:
            raise ValueError(f"n_cache = {self.n_cache} must be >= 0")

    def objective(self, q: np.ndarray) -> float:
        mask = q > 0.0
        return float(
            np.sum(self.popularity.pmf[mask] * q[mask] / (self.c_num + self.c_den * q[mask]))
        )


@dataclass(frozen=True)
class SolverReport:
    """Solution plus solver diagnostics.

    ``multiplier`` is the KKT water-level (0 when the capacity constraint is
    inactive or the solver is not multiplier-based), ``residual`` the final
    |sum(q) - n_cache| of the bisection.
    """

    policy: CachingPolicy
    multiplier: float
    objective: float
    iterations: int
    residual: float


def _waterfill_q(sqrt_p: np.ndarray, c_num: float, c_den: float, nu: float) -> np.ndarray:
    q = math.sqrt(c_num / nu) / c_den * sqrt_p - c_num / c_den
    return np.clip(q, 0.0, 1.0)


def solve_waterfilling(problem: WaterfillingProblem) -> SolverReport:
    """Maximize the shared fractional objective by KKT water-filling.

    Bisects the multiplier from an analytic bracket (the lower end floors at
    1e-18 where every coordinate saturates at 1; the upper end zeroes the
    largest unclamped coordinate) until |sum(q) - n_cache| <= 1e-9 or 200
    iterations. Degenerate capacities skip the search: n_cache = 0 returns
    all zeros, n_cache >= n_files all ones.
    """
    pop = problem.popularity
    n_f, n_c = pop.n_files, problem.n_cache
    pmf = pop.pmf

    if n_c == 0:
        q = np.zeros(n_f)
        return SolverReport(
            policy=CachingPolicy(q), multiplier=float(pmf.max() / problem.c_num),
            objective=0.0, iterations=0, residual=0.0,
        )
    if n_c >= n_f:
        q = np.ones(n_f)
        return SolverReport(
            policy=CachingPolicy(q), multiplier=0.0,
            objective=problem.objective(q), iterations=0, residual=0.0,
        )

    sqrt_p = np.sqrt(pmf)
    lo = _NU_FLOOR
    hi = float(pmf.max() / problem.c_num)  # largest unclamped coordinate hits 0
    if _waterfill_q(sqrt_p, problem.c_num, problem.c_den, lo).sum() < n_c:
        raise RuntimeError("water-filling bracket failure (internal defect)")

    q = _waterfill_q(sqrt_p, problem.c_num, problem.c_den, hi)
    nu, best_nu, best_gap = hi, hi, abs(q.sum() - n_c)
    iterations = 0
    for iterations in range(1, _BISECT_MAX_ITER + 1):
        nu = 0.5 * (lo + hi)
        q = _waterfill_q(sqrt_p, problem.c_num, problem.c_den, nu)
        gap = q.sum() - n_c
        if abs(gap) < best_gap:
            best_nu, best_gap = nu, abs(gap)
        if abs(gap) <= _SUM_TOL:
            break
        if gap > 0.0:
            lo = nu
        else:
            hi = nu

    q = _waterfill_q(sqrt_p, problem.c_num, problem.c_den, best_nu)
    return SolverReport(
        policy=CachingPolicy(q),
        multiplier=float(best_nu),
        objective=problem.objective(q),
        iterations=iterations,
        residual=float(abs(q.sum() - n_c)),
    )


def _popular_fallback(problem_objective, pop: PopularityModel, n_cache: int) -> SolverReport:
    """Most-popular caching, returned when the q coefficient of the
    denominator underflows (extreme-threshold regime where it is optimal)."""
    policy = baseline_popular(pop, n_cache)
    return SolverReport(
        policy=policy, multiplier=0.0, objective=problem_objective(policy.q),
        iterations=0, residual=float(abs(policy.q.sum() - min(n_cache, pop.n_files))),
    )


def _solve_family(cfg: NetworkConfig, pop: PopularityModel, c_num: float, c_den: float) -> SolverReport:
    if c_den <= _DEN_FLOOR:
        problem = WaterfillingProblem(c_num, _DEN_FLOOR, pop, cfg.n_cache)
        return _popular_fallback(problem.objective, pop, cfg.n_cache)
    return solve_waterfilling(WaterfillingProblem(c_num, c_den, pop, cfg.n_cache))


def solve_saturated(cfg: NetworkConfig, pop: PopularityModel) -> SolverReport:
    """Optimal caching probabilities when every helper is active
    (user-to-helper density ratio -> infinity); this case is concave and the
    water-filling solution is globally optimal."""
    k = constants(cfg)
    return _solve_family(cfg, pop, k.c1 + k.c2, k.c3 + 1.0)


def solve_sparse_users(cfg: NetworkConfig, pop: PopularityModel) -> SolverReport:
    """Optimal caching probabilities in the idle-helper limit
    (user-to-helper density ratio -> 0, no helper interference)."""
    k = constants(cfg)
    return _solve_family(cfg, pop, k.c1, 1.0)


def solve_active_prob_max(cfg: NetworkConfig, pop: PopularityModel) -> SolverReport:
    """Policy maximizing the helper active probability.

    The active probability is monotone in the association mass
    ``sum_f p_f q_f / (A + q_f)`` with A the macro association weight, which
    is again the shared fractional objective. The activity this policy
    induces upper-bounds the activity of every feasible policy.
    """
    return _solve_family(cfg, pop, association_weight(cfg), 1.0)


def solve_lower_bound(
    cfg: NetworkConfig, pop: PopularityModel, pbar: float | None = None
) -> SolverReport:
    """Maximize the offloading lower bound obtained by freezing the helper
    active probability at its policy-independent upper bound.

    ``pbar`` overrides the bound when given (0 reproduces the sparse-user
    solver); otherwise it is computed from solve_active_prob_max. Two scalar
    bisections in total, which is the recommended general-purpose policy.
    """
    if pbar is None:
        q_max = solve_active_prob_max(cfg, pop)
        pbar = helper_active_prob(cfg, q_max.policy, pop)
    if not 0.0 <= pbar <= 1.0:
        raise ValueError(f"pbar = {pbar} must lie in [0, 1]")
    k = constants(cfg)
    return _solve_family(cfg, pop, k.c1 + pbar * k.c2, pbar * k.c3 + 1.0)


def baseline_popular(pop: PopularityModel, n_cache: int) -> CachingPolicy:
    """Deterministically cache the n_cache most popular files everywhere."""
    q = np.zeros(pop.n_files)
    q[: min(n_cache, pop.n_files)] = 1.0
    return CachingPolicy(q)


def baseline_uniform(pop: PopularityModel, n_cache: int) -> CachingPolicy:
    """Cache every file with equal probability n_cache / n_files."""
    frac = min(n_cache, pop.n_files) / pop.n_files
    return CachingPolicy(np.full(pop.n_files, frac))


# ---------------------------------------------------------------------------
# General case: projected gradient ascent on the exact objective
# ---------------------------------------------------------------------------

_PGA_MAX_ITER = 100_000
_PGA_GRAD_TOL = 1e-8
_LOAD_SHAPE = 3.5


def _project_capped_box(v: np.ndarray, cap: float) -> np.ndarray:
    """Euclidean projection onto {0 <= q <= 1, sum(q) <= cap}.

    Clipping alone suffices when it lands under the cap; otherwise the
    projection is clip(v - tau, 0, 1) with the shift tau >= 0 bisected so the
    capacity binds (sum is continuous and non-increasing in tau).
    """
    w = np.clip(v, 0.0, 1.0)
    if w.sum() <= cap:
        return w
    lo, hi = 0.0, float(v.max())
    for _ in range(100):
        tau = 0.5 * (lo + hi)
        w = np.clip(v - tau, 0.0, 1.0)
        if w.sum() > cap:
            lo = tau
        else:
            hi = tau
    return np.clip(v - hi, 0.0, 1.0)


class _ExactObjective:
    """Offloading probability and its gradient as plain-array callables."""

    def __init__(self, cfg: NetworkConfig, pop: PopularityModel):
        k = constants(cfg)
        self.c1, self.c2, self.c3 = k.c1, k.c2, k.c3
        self.weight = association_weight(cfg)
        self.load_ratio = cfg.lambda_u / (_LOAD_SHAPE * cfg.lambda2)
        self.pmf = pop.pmf

    def active_prob(self, q: np.ndarray) -> float:
        s = float(np.sum(self.pmf * q / (self.weight + q)))
        return 1.0 - (1.0 + self.load_ratio * s) ** (-_LOAD_SHAPE)

    def value(self, q: np.ndarray) -> float:
        pa = self.active_prob(q)
        denom = self.c1 + self.c2 * pa + (self.c3 * pa + 1.0) * q
        return float(np.sum(self.pmf * q / denom))

    def gradient(self, q: np.ndarray) -> np.ndarray:
        s = float(np.sum(self.pmf * q / (self.weight + q)))
        t = 1.0 + self.load_ratio * s
        pa = 1.0 - t ** (-_LOAD_SHAPE)
        denom = self.c1 + self.c2 * pa + (self.c3 * pa + 1.0) * q
        # Direct channel: each file's own summand grows with its q.
        direct = self.pmf * (self.c1 + self.c2 * pa) / denom**2
        # Activity channel: raising any q raises pa, which inflates every
        # denominator (c2 + c3*q >= 0 for c3 in [-1, 0]).
        dv_dpa = -float(np.sum(self.pmf * q * (self.c2 + self.c3 * q) / denom**2))
        dpa_dq = (
            _LOAD_SHAPE
            * t ** (-_LOAD_SHAPE - 1.0)
            * self.load_ratio
            * self.pmf
            * self.weight
            / (self.weight + q) ** 2
        )
        return direct + dv_dpa * dpa_dq


def solve_local(
    cfg: NetworkConfig, pop: PopularityModel, init: CachingPolicy | None = None
) -> SolverReport:
    """Local maximizer of the exact offloading probability.

    Projected gradient ascent with backtracking line search from ``init``
    (default: the lower-bound solution). The objective never decreases across
    iterations; termination on projected-gradient norm below 1e-8 or 1e5
    iterations, always returning the best iterate.
    """
    if init is None:
        init = solve_lower_bound(cfg, pop).policy
    if init.n_files != pop.n_files:
        raise ValueError("init policy length does not match the catalog")
    init.check_capacity(cfg.n_cache)

    obj = _ExactObjective(cfg, pop)
    cap = float(min(cfg.n_cache, pop.n_files))
    q = _project_capped_box(init.q.copy(), cap)
    value = obj.value(q)
    step = 1.0
    iterations = 0
    for iterations in range(1, _PGA_MAX_ITER + 1):
        grad = obj.gradient(q)
        moved = _project_capped_box(q + grad, cap) - q
        if float(np.linalg.norm(moved)) < _PGA_GRAD_TOL:
            break
        improved = False
        trial_step = step * 2.0
        while trial_step > 1e-18:
            q_new = _project_capped_box(q + trial_step * grad, cap)
            v_new = obj.value(q_new)
            if v_new > value:
                q, value, step, improved = q_new, v_new, trial_step, True
                break
            trial_step *= 0.5
        if not improved:
            break  # no ascent direction at any step size: numerically stationary

    return SolverReport(
        policy=CachingPolicy(q),
        multiplier=0.0,
        objective=value,
        iterations=iterations,
        residual=float(abs(q.sum() - cap)),
    )
