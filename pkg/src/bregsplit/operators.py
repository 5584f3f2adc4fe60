"""Metric-generalized operator building blocks over convex oracles.

For a convex function ``G`` and a quadratic metric ``D`` these are

* the resolvent ``R = (I + (grad D)^{-1} dG)^{-1}``, realized as the
  proximal map ``argmin_w G(w) + B_D(w || z)``;
* the reflected resolvent (Cayley operator) ``C = 2 R - I``;
* the forward step ``F = I - (grad D)^{-1} dG``;
* the averaged map ``(1 - alpha) I + alpha J`` of any operator ``J``.

Oracles expose the prox directly: every update in the splitting drivers
is an argmin, and the closed forms (quadratic, quadratic + L1) are exact.
Oracles without a closed form for the requested metric must supply their
own prox callable via :class:`CustomOracle`.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    AlphaOutOfRangeError,
    DimensionMismatchError,
    NoSubgradientError,
    ProxUnavailableError,
)
from .linalg import SpdMatrix, spd_factorize
from .metric import QuadraticMetric

__all__ = [
    "ConvexOracle",
    "QuadraticOracle",
    "ElasticNetOracle",
    "CustomOracle",
    "d_resolvent",
    "d_cayley",
    "d_forward",
    "averaged",
]


class ConvexOracle:
    """A convex function seen through its Bregman-proximal map.

    Subclasses implement ``bregman_prox(z, metric)`` returning
    ``argmin_w G(w) + B_D(w || z)``.  ``subgradient`` is either ``None``
    or a callable returning one member of ``dG(w)``; ``quadratic_model``
    is either ``None`` or a ``(hessian, linear, constant)`` triple that
    describes (a quadratic model of) ``G``.
    """

    subgradient = None
    quadratic_model = None

    def __init__(self, dimension: int):
        self.dimension = int(dimension)

    def bregman_prox(self, z, metric):
        raise NotImplementedError

    def _check(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"point has shape {z.shape}, expected ({self.dimension},)"
            )
        return z


class QuadraticOracle(ConvexOracle):
    """``G(w) = 0.5 <A w, w> + <b, w> + c`` with ``A`` symmetric PSD.

    The prox under a quadratic metric is the linear solve
    ``(Psi + A) w = Psi z - b``; the factorization is cached per metric
    (metrics are immutable, so identity comparison is sound).
    """

    def __init__(self, hessian, linear, constant=0.0):
        if not isinstance(hessian, SpdMatrix):
            hessian = SpdMatrix.from_dense(hessian)
        linear = np.asarray(linear, dtype=float)
        if linear.shape != (hessian.order,):
            raise DimensionMismatchError("linear term does not match Hessian order")
        super().__init__(hessian.order)
        self.hessian = hessian
        self.linear = linear
        self.constant = float(constant)
        self._prox_cache = None

    @property
    def quadratic_model(self):
        return (self.hessian, self.linear, self.constant)

    def value(self, w):
        w = self._check(w)
        return 0.5 * float(self.hessian.matvec(w) @ w) + float(self.linear @ w) + self.constant

    def subgradient(self, w):
        w = self._check(w)
        return self.hessian.matvec(w) + self.linear

    def bregman_prox(self, z, metric: QuadraticMetric):
        z = self._check(z)
        if self._prox_cache is None or self._prox_cache[0] is not metric:
            shifted = metric.psi.add(self.hessian)
            self._prox_cache = (metric, spd_factorize(shifted))
        return self._prox_cache[1].solve(metric.grad_d(z) - self.linear)


class ElasticNetOracle(ConvexOracle):
    """``G(w) = (l2 / 2) ||w||_2^2 + l1 ||w||_1``.

    The prox has a closed form only when the metric is diagonal
    (per-coordinate soft threshold); other metrics raise
    :class:`ProxUnavailableError`.  At kinks the subgradient returns the
    member with ``sign(0) = 0``.  The quadratic model covers the smooth
    part only (Hessian ``l2 I``).
    """

    def __init__(self, dimension, l2_weight, l1_weight):
        super().__init__(dimension)
        if l2_weight < 0 or l1_weight < 0:
            raise ValueError("weights must be non-negative")
        self.l2_weight = float(l2_weight)
        self.l1_weight = float(l1_weight)

    @property
    def quadratic_model(self):
        hessian = SpdMatrix.scaled_identity(self.dimension, self.l2_weight)
        return (hessian, np.zeros(self.dimension), 0.0)

    def value(self, w):
        w = self._check(w)
        return 0.5 * self.l2_weight * float(w @ w) + self.l1_weight * float(np.abs(w).sum())

    def subgradient(self, w):
        w = self._check(w)
        return self.l2_weight * w + self.l1_weight * np.sign(w)

    def bregman_prox(self, z, metric: QuadraticMetric):
        z = self._check(z)
        if not metric.psi.is_diagonal:
            raise ProxUnavailableError(
                "elastic-net prox needs a diagonal metric; supply a custom prox otherwise"
            )
        psi = metric.psi.diagonal()
        scaled = psi * z
        shrunk = np.sign(scaled) * np.maximum(np.abs(scaled) - self.l1_weight, 0.0)
        return shrunk / (self.l2_weight + psi)


class CustomOracle(ConvexOracle):
    """Wrap user-supplied callables into the oracle interface."""

    def __init__(self, dimension, bregman_prox, subgradient=None, quadratic_model=None):
        super().__init__(dimension)
        self._prox = bregman_prox
        self.subgradient = subgradient
        self.quadratic_model = quadratic_model

    def bregman_prox(self, z, metric):
        return self._prox(self._check(z), metric)


def _check_pair(oracle, metric, z):
    if oracle.dimension != metric.dimension:
        raise DimensionMismatchError("oracle and metric dimensions differ")
    z = np.asarray(z, dtype=float)
    if z.shape != (metric.dimension,):
        raise DimensionMismatchError(
            f"point has shape {z.shape}, expected ({metric.dimension},)"
        )
    return z


def d_resolvent(oracle, metric, z):
    """Backward step ``argmin_w G(w) + B_D(w || z)``."""
    z = _check_pair(oracle, metric, z)
    return oracle.bregman_prox(z, metric)


def d_cayley(oracle, metric, z):
    """Reflected resolvent ``2 R(z) - z``."""
    z = _check_pair(oracle, metric, z)
    return 2.0 * oracle.bregman_prox(z, metric) - z


def d_forward(oracle, metric, w):
    """Explicit step ``w - Psi^{-1} dG(w)``; needs a subgradient."""
    w = _check_pair(oracle, metric, w)
    if oracle.subgradient is None:
        raise NoSubgradientError("oracle exposes no subgradient")
    return w - metric.grad_d_inv(oracle.subgradient(w))


def averaged(op, alpha, z):
    """Averaged map ``(1 - alpha) z + alpha op(z)`` with ``alpha`` in (0, 1)."""
    if not 0.0 < alpha < 1.0:
        raise AlphaOutOfRangeError(f"alpha must lie in (0, 1), got {alpha}")
    z = np.asarray(z, dtype=float)
    return (1.0 - alpha) * z + alpha * np.asarray(op(z), dtype=float)
