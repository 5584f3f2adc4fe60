"""Contraction-factor formulas and convergence-rate prediction.

The behaviour of ``Psi^{-1} dG`` between any two points is summarized by
a pair ``0 <= sigma_lb <= sigma_ub < inf`` of strong-monotonicity and
Lipschitz constants.  From such a pair follow the contraction factors

* ``eta = sqrt(1 - 4 sigma_lb / (1 + sigma_ub)^2)`` for the reflected
  resolvent,
* ``nu = sqrt(1 - 2 sigma_lb + sigma_ub^2)`` for the forward step,
* ``lambda = nu_1 / (1 + sigma_lb_2)`` for the forward-backward
  composition,

and the per-iteration distance bounds ``(eta1 eta2)^t`` for
Peaceman-Rachford, ``(1 - alpha + alpha eta1 eta2)^t`` for
Douglas-Rachford and ``lambda^t`` for forward-backward.  All factors hit
0, their optimum, exactly at ``sigma_lb = sigma_ub = 1``.

For quadratic oracles with Hessian ``A`` under a quadratic metric
``Psi``, the sigma pair is computed as the extreme eigenvalues of the
pencil ``A v = lam Psi v``.  The pencil extremes are exact L2 constants
for ``Psi^{-1} A`` whenever ``A`` and ``Psi`` commute (for example when
both are polynomials in the same operator, or diagonal); in general they
are the constants in the ``Psi``-weighted norm.  Non-quadratic oracles
carry no estimator here; callers supply their own pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InadmissiblePairError, MissingAlphaError, NoQuadraticModelError
from .linalg import extreme_generalized_eigenvalues
from .metric import QuadraticMetric

__all__ = [
    "SigmaPair",
    "RateModel",
    "estimate_sigma",
    "eta",
    "nu",
    "lambda_fb",
    "is_forward_step_nonexpansive",
    "predict_bounds",
]

#: Radicands may dip this far below zero from floating-point pencils.
RADICAND_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SigmaPair:
    """Bounds ``sigma_lb <= ||Psi^{-1} dG(w) - Psi^{-1} dG(z)|| / ||w - z||
    <= sigma_ub``."""

    sigma_lb: float
    sigma_ub: float

    def __post_init__(self):
        if not 0.0 <= self.sigma_lb <= self.sigma_ub < math.inf:
            raise ValueError(
                f"need 0 <= sigma_lb <= sigma_ub < inf, got "
                f"({self.sigma_lb}, {self.sigma_ub})"
            )

    @property
    def dynamic_range(self):
        """``sigma_ub / sigma_lb`` (inf when ``sigma_lb`` is 0)."""
        if self.sigma_lb == 0.0:
            return math.inf
        return self.sigma_ub / self.sigma_lb


def estimate_sigma(oracle, metric: QuadraticMetric, tol=1e-8, max_iterations=10000):
    """Sigma pair of a quadratic oracle under a quadratic metric.

    Returns the extreme eigenvalues of the pencil ``(A, Psi)`` where
    ``A`` is the oracle's model Hessian; the lower extreme is clamped at
    zero against roundoff on semidefinite models.
    """
    if oracle.quadratic_model is None:
        raise NoQuadraticModelError("oracle carries no quadratic model")
    hessian = oracle.quadratic_model[0]
    lo, hi = extreme_generalized_eigenvalues(
        hessian, metric.psi, tol=tol, max_iterations=max_iterations
    )
    return SigmaPair(max(0.0, lo), hi)


def eta(sigma: SigmaPair) -> float:
    """Reflected-resolvent contraction factor, in ``[0, 1]``."""
    radicand = 1.0 - 4.0 * sigma.sigma_lb / (1.0 + sigma.sigma_ub) ** 2
    if radicand < -RADICAND_TOLERANCE:
        raise InadmissiblePairError(
            f"4 sigma_lb exceeds (1 + sigma_ub)^2 for {sigma}"
        )
    return math.sqrt(max(radicand, 0.0))


def nu(sigma: SigmaPair) -> float:
    """Forward-step Lipschitz factor ``sqrt(1 - 2 sigma_lb + sigma_ub^2)``."""
    radicand = 1.0 - 2.0 * sigma.sigma_lb + sigma.sigma_ub**2
    return math.sqrt(max(radicand, 0.0))


def lambda_fb(sigma1: SigmaPair, sigma2: SigmaPair) -> float:
    """Forward-backward contraction ``nu(sigma1) / (1 + sigma_lb_2)``."""
    return nu(sigma1) / (1.0 + sigma2.sigma_lb)


def is_forward_step_nonexpansive(sigma: SigmaPair) -> bool:
    """Whether the forward step is nonexpansive for this pair.

    The region is ``sigma_ub <= 1`` together with
    ``sigma_lb >= sigma_ub^2 / 2``; the complementary upper boundary
    ``sigma_lb <= (sigma_ub^2 + 1) / 2`` already follows from
    ``sigma_lb <= sigma_ub <= 1``.
    """
    return sigma.sigma_ub <= 1.0 and sigma.sigma_lb >= 0.5 * sigma.sigma_ub**2


@dataclass(frozen=True)
class RateModel:
    """Contraction factors of one ``G1 + G2`` instance under one metric."""

    sigma1: SigmaPair
    sigma2: SigmaPair
    eta1: float
    eta2: float
    nu1: float
    nu2: float
    fb_factor: float
    alpha: float | None = None

    @classmethod
    def from_sigma(cls, sigma1: SigmaPair, sigma2: SigmaPair, alpha=None):
        return cls(
            sigma1=sigma1,
            sigma2=sigma2,
            eta1=eta(sigma1),
            eta2=eta(sigma2),
            nu1=nu(sigma1),
            nu2=nu(sigma2),
            fb_factor=lambda_fb(sigma1, sigma2),
            alpha=alpha,
        )

    def contraction_factor(self, method: str) -> float:
        """Per-iteration factor for ``method`` in {"pr", "dr", "fb"}."""
        if method == "pr":
            return self.eta1 * self.eta2
        if method == "dr":
            if self.alpha is None:
                raise MissingAlphaError("Douglas-Rachford prediction needs alpha")
            return 1.0 - self.alpha + self.alpha * self.eta1 * self.eta2
        if method == "fb":
            return self.fb_factor
        raise ValueError(f"unknown method {method!r}")


def predict_bounds(model: RateModel, method: str, t: int, initial_distance: float) -> float:
    """Distance bound after ``t`` iterations from ``initial_distance``."""
    if t < 0:
        raise ValueError("iteration count must be non-negative")
    return model.contraction_factor(method) ** t * initial_distance
