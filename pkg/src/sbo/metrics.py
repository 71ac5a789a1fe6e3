"""Error metrics evaluated against a problem's reference truth, plus
log-log rate fitting for the empirical convergence studies.

Metric functions return None when the required piece of reference truth is
absent; trace assembly renders that as an empty field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, ContractViolation

# Documented defaults of the high-budget inexact projection used when no
# exact projector is available (same machinery as the outer solver's inner
# loop): minimize 0.5*||u - x||^2 over the lower solution set.
PROJECTOR_ETA = 1e-6
PROJECTOR_BUDGET = 100_000


@dataclass
class MetricSample:
    k: int
    value: float


@dataclass
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple
    n_samples: int


def infeasibility(problem, x: np.ndarray) -> Optional[float]:
    """Signed lower-level gap: lower(x) - h_star. Theory keeps it >= 0;
    the sign is retained so a bad reference shows up as a negative dip."""
    ref = problem.reference
    if ref is None or ref.h_star is None:
        return None
    return problem.lower.value(x) - ref.h_star


def suboptimality(problem, x: np.ndarray) -> Optional[float]:
    """Signed upper-level gap: upper(x) - f_star. May legitimately be
    negative at points that are infeasible for the lower level."""
    ref = problem.reference
    if ref is None or ref.f_star is None:
        return None
    return problem.upper.value(x) - ref.f_star


def dist_to_lower_set(problem, x: np.ndarray) -> Optional[float]:
    """||x - P(x)|| for the reference projector P onto the lower solution set."""
    ref = problem.reference
    if ref is None or ref.projector is None:
        return None
    return float(np.linalg.norm(x - ref.projector(x)))


def residual_norm(problem, x: np.ndarray, gamma_hat: float) -> Optional[float]:
    """Norm of the projected-gradient residual map
    (x - P(x - gamma_hat * grad f(x))) / gamma_hat; zero exactly at
    stationary points of the bilevel problem."""
    ref = problem.reference
    if ref is None or ref.projector is None:
        return None
    if gamma_hat <= 0:
        raise ContractViolation("residual map requires gamma_hat > 0")
    step = x - gamma_hat * problem.upper.smooth.gradient(x)
    return float(np.linalg.norm(x - ref.projector(step))) / gamma_hat


def fit_rate(samples: Sequence, window: tuple, min_samples: int = 5) -> RateFit:
    """Least-squares line through (ln k, ln value) over positive samples with
    k inside [window[0], window[1]]; the slope is the empirical rate
    exponent. Samples may be MetricSample objects or (k, value) pairs.
    """
    k_lo, k_hi = window
    pts = []
    for s in samples:
        k, v = (s.k, s.value) if isinstance(s, MetricSample) else (s[0], s[1])
        if v is not None and v > 0 and k_lo <= k <= k_hi and k > 0:
            pts.append((math.log(k), math.log(v)))
    if len(pts) < min_samples:
        raise ConfigurationError(
            f"rate fit needs at least {min_samples} positive samples in "
            f"window [{k_lo}, {k_hi}]; found {len(pts)}"
        )
    lx = np.array([p[0] for p in pts])
    ly = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(
        slope=float(slope), intercept=float(intercept), r_squared=r2,
        window=(k_lo, k_hi), n_samples=len(pts),
    )


def default_fit_window(big_k: int) -> tuple:
    """Asymptotic-rate window: the last nine tenths of the run, log-spaced
    samples assumed."""
    return (max(1, big_k // 10), big_k)


def approximate_projector(problem, eta: float = PROJECTOR_ETA,
                          budget: int = PROJECTOR_BUDGET) -> Callable[[np.ndarray], np.ndarray]:
    """Inexact projection onto the lower solution set: for a query x, run the
    accelerated solver on the pair (lower objective, 0.5*||u - x||^2) with a
    tiny constant weight and a fixed high budget. Labeled "approximate"
    wherever it is attached to a reference."""
    from .bilevel import BilevelProblem, CompositeObjective
    from .functions import ScaledSqNorm
    from .prox import ZeroProx
    from .solvers import FixedEtaSchedule, SolverConfig, solve_r_vfista

    def project(x: np.ndarray) -> np.ndarray:
        anchor = CompositeObjective(ScaledSqNorm(1.0, center=x), ZeroProx())
        sub = BilevelProblem(anchor, problem.lower, reference=None, initial_point=x)
        cfg = SolverConfig(big_k=budget, schedule=FixedEtaSchedule(eta),
                           trace_every=budget)
        return solve_r_vfista(sub, cfg).x_final

    return project


def empirical_growth_alpha(problem, points: Sequence[np.ndarray]) -> float:
    """Smallest observed ratio (lower gap) / dist^2 over the given points;
    an empirical quadratic-growth constant, reported rather than asserted."""
    ref = problem.reference
    if ref is None or ref.h_star is None or ref.projector is None:
        raise ConfigurationError("empirical growth needs h_star and a projector")
    ratios = []
    for x in points:
        gap = problem.lower.value(x) - ref.h_star
        d = dist_to_lower_set(problem, x)
        if d is not None and d > 1e-9:
            ratios.append(gap / (d * d))
    if not ratios:
        raise ConfigurationError("no points with positive distance to the set")
    return min(ratios)
