"""Quadratic Bregman metrics and the Newton / AGD / GD designs.

A metric here is a strictly convex quadratic ``D(w) = 0.5 <Psi w, w>``
with ``Psi`` symmetric positive definite, which makes the associated
divergence

    ``B_D(w || z) = D(w) - D(z) - <grad D(z), w - z>
                  = 0.5 <Psi (w - z), w - z>``.

``grad D(0) = 0`` holds by construction (no linear term), so resolvent
fixed points are preserved when the metric replaces the Euclidean one.
Three designs are provided, all derived from a quadratic model of the
cost being solved:

* ``newton`` -- ``Psi`` is the model Hessian itself;
* ``agd``    -- ``Psi`` is the diagonal of that Hessian, giving an
  independent per-coordinate step;
* ``gd``     -- ``Psi = (1/kappa) I``, which recovers the ordinary
  Euclidean proximal machinery with step size ``kappa``.

A metric is assembled once and then held fixed for a whole solver run.
The GD design routes its gradient maps through plain scalar division and
multiplication so that trajectories agree bit for bit with a
conventionally coded Euclidean solver.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NonPositiveDiagonalError
from .linalg import SpdMatrix, spd_factorize

__all__ = ["QuadraticMetric", "design_newton", "design_agd", "design_gd"]


class QuadraticMetric:
    """Quadratic Bregman generator ``D(w) = 0.5 <Psi w, w>``.

    Construct through :func:`design_newton`, :func:`design_agd` or
    :func:`design_gd`.  Immutable; shareable across solver runs.

    Attributes
    ----------
    psi : SpdMatrix
        The metric matrix.
    psi_factorization : SpdFactorization
        Cholesky factorization of ``psi`` (used by ``grad_d_inv``).
    design : str
        One of ``"newton"``, ``"agd"``, ``"gd"``.
    kappa : float or None
        Step size; set only for the GD design.
    """

    def __init__(self, psi: SpdMatrix, design: str, kappa: float | None = None):
        self.psi = psi
        self.psi_factorization = spd_factorize(psi)
        self.design = design
        self.kappa = kappa
        if design == "agd":
            self._diag = psi.diagonal()

    @property
    def dimension(self) -> int:
        return self.psi.order

    def _check(self, w, what="vector"):
        w = np.asarray(w, dtype=float)
        if w.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"{what} has shape {w.shape}, expected ({self.dimension},)"
            )
        return w

    def grad_d(self, w):
        """Return ``grad D(w) = Psi w``; maps 0 to 0 exactly."""
        w = self._check(w)
        if self.design == "gd":
            return w / self.kappa
        if self.design == "agd":
            return self._diag * w
        return self.psi.matvec(w)

    def grad_d_inv(self, w):
        """Return ``(grad D)^{-1}(w) = Psi^{-1} w``."""
        w = self._check(w)
        if self.design == "gd":
            return self.kappa * w
        if self.design == "agd":
            return w / self._diag
        return self.psi_factorization.solve(w)

    def bregman(self, w, z):
        """Divergence ``B_D(w || z) = 0.5 <Psi (w - z), w - z> >= 0``."""
        w = self._check(w, "first point")
        z = self._check(z, "second point")
        d = w - z
        if self.design == "gd":
            return 0.5 / self.kappa * float(d @ d)
        return 0.5 * float(self.grad_d(d) @ d)


def design_newton(hessian, majorize: bool = False) -> QuadraticMetric:
    """Metric whose ``Psi`` is the given model Hessian.

    Parameters
    ----------
    hessian : SpdMatrix or array_like
        Symmetric positive definite quadratic-model Hessian.
    majorize : bool
        If true, add ``1e-8 * max(diag(hessian))`` times the identity
        before factorizing, for Hessians that are only semidefinite.

    Raises
    ------
    NotPositiveDefiniteError
        If the (possibly majorized) Hessian fails to factorize.
    """
    if not isinstance(hessian, SpdMatrix):
        hessian = SpdMatrix.from_dense(hessian)
    if majorize:
        hessian = hessian.add_scaled_identity(1e-8 * float(np.max(hessian.diagonal())))
    return QuadraticMetric(hessian, "newton")


def design_agd(hessian) -> QuadraticMetric:
    """Metric whose ``Psi`` is ``Diag`` of the given model Hessian.

    Raises
    ------
    NonPositiveDiagonalError
        If any diagonal entry of the Hessian is not strictly positive.
    """
    if not isinstance(hessian, SpdMatrix):
        hessian = SpdMatrix.from_dense(hessian)
    diag = hessian.diagonal()
    if np.any(diag <= 0.0):
        raise NonPositiveDiagonalError("Hessian diagonal has a non-positive entry")
    return QuadraticMetric(SpdMatrix.from_diagonal(diag), "agd")


def design_gd(kappa: float, dimension: int) -> QuadraticMetric:
    """Euclidean metric ``Psi = (1/kappa) I`` with step size ``kappa > 0``."""
    kappa = float(kappa)
    if kappa <= 0.0:
        raise NonPositiveDiagonalError("kappa must be positive")
    psi = SpdMatrix.scaled_identity(int(dimension), 1.0 / kappa)
    return QuadraticMetric(psi, "gd", kappa=kappa)
