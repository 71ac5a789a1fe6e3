"""Problem assembly: composite objectives, the bilevel problem container
with optional reference truth, the eta-regularized surrogate, and the
prox-gradient step map that all three solvers iterate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation
from .functions import SmoothFunction
from .prox import CombinedProx


class CompositeObjective:
    """smooth + prox-friendly nonsmooth part."""

    def __init__(self, smooth: SmoothFunction, nonsmooth):
        self.smooth = smooth
        self.nonsmooth = nonsmooth
        self.dimension = smooth.dimension

    def value(self, x: np.ndarray) -> float:
        return self.smooth.value(x) + self.nonsmooth.value(x)


@dataclass
class WeakSharp:
    """Declared weak-sharp-minima constants of the lower solution set:
    lower_gap(x) >= alpha * dist(x, X*)^order."""

    alpha: float
    order: float


@dataclass
class SubgradientAtOpt:
    """An element of the upper subdifferential at the bilevel solution
    (minimum-norm choice where we construct it)."""

    g_star: np.ndarray
    norm: float


@dataclass
class ReferenceTruth:
    """Ground truth attached to constructed instances; solvers never read it,
    only metric evaluation does. Tolerances record how the values were made:
    analytic values default to 1e-10, manufactured (baseline-solve) values
    carry the tolerance implied by their documented oracle.
    """

    h_star: Optional[float] = None
    h_star_tol: float = 1e-10
    f_star: Optional[float] = None
    f_star_tol: float = 1e-10
    x_star: Optional[np.ndarray] = None
    weak_sharp: Optional[WeakSharp] = None
    projector: Optional[Callable[[np.ndarray], np.ndarray]] = None
    projector_kind: str = "exact"  # "exact" | "approximate"
    subgradient: Optional[SubgradientAtOpt] = None
    notes: dict = field(default_factory=dict)


class BilevelProblem:
    """Upper composite objective minimized over the minimizers of the lower
    composite objective. Holds the combined prox of (omega_h, eta*omega_f)
    and optional reference truth for metric evaluation.
    """

    def __init__(self, upper: CompositeObjective, lower: CompositeObjective,
                 reference: Optional[ReferenceTruth] = None,
                 initial_point: Optional[np.ndarray] = None,
                 name: str = ""):
        if upper.dimension != lower.dimension:
            raise ContractViolation(
                f"upper dimension {upper.dimension} != lower dimension {lower.dimension}"
            )
        self.upper = upper
        self.lower = lower
        self.dimension = upper.dimension
        self.combined_prox = CombinedProx(lower.nonsmooth, upper.nonsmooth)
        self.reference = reference
        self.initial_point = (
            np.ones(self.dimension) if initial_point is None
            else np.asarray(initial_point, dtype=float)
        )
        self.name = name
        if self.initial_point.shape != (self.dimension,):
            raise ContractViolation("initial point has the wrong length")

    # ---- regularized surrogate -------------------------------------------

    def regularized_value(self, eta: float, x: np.ndarray) -> float:
        """Full surrogate value: lower(x) + eta * upper(x), nonsmooth included."""
        if eta < 0:
            raise ContractViolation("eta must be >= 0")
        return self.lower.value(x) + eta * self.upper.value(x)

    def regularized_smooth_value(self, eta: float, x: np.ndarray) -> float:
        """Smooth part only: h(x) + eta * f(x)."""
        return self.lower.smooth.value(x) + eta * self.upper.smooth.value(x)

    def regularized_gradient(self, eta: float, x: np.ndarray) -> np.ndarray:
        """Gradient of the smooth part of the surrogate."""
        if eta < 0:
            raise ContractViolation("eta must be >= 0")
        self._check_dim(x)
        return self.lower.smooth.gradient(x) + eta * self.upper.smooth.gradient(x)

    def q_eta_step(self, eta: float, gamma: float, x: np.ndarray) -> np.ndarray:
        """One prox-gradient step on the surrogate:
        prox of gamma*(omega_h + eta*omega_f) at x - gamma*(grad h + eta*grad f)."""
        if gamma <= 0:
            raise ContractViolation("gamma must be positive")
        return self.combined_prox.prox(
            gamma, eta, x - gamma * self.regularized_gradient(eta, x)
        )

    def surrogate_lipschitz(self, eta: float) -> float:
        return self.lower.smooth.lipschitz + eta * self.upper.smooth.lipschitz

    def _check_dim(self, x: np.ndarray) -> None:
        if x.shape != (self.dimension,):
            raise ContractViolation(
                f"expected a vector of length {self.dimension}, got shape {x.shape}"
            )


def min_norm_l1_subgradient(grad_smooth: np.ndarray, lam: float,
                            x_star: np.ndarray, zero_tol: float = 1e-7) -> np.ndarray:
    """Minimum-norm element of grad_smooth + lam * d||.||_1 at x_star.

    On coordinates where x_star is (numerically) zero the subdifferential is
    the interval [-lam, lam]; the norm-minimizing choice per coordinate is a
    soft threshold of the smooth gradient.
    """
    g = np.where(
        np.abs(x_star) > zero_tol,
        grad_smooth + lam * np.sign(x_star),
        np.sign(grad_smooth) * np.maximum(np.abs(grad_smooth) - lam, 0.0),
    )
    return g
