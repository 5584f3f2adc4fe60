"""Dense and banded symmetric positive-definite linear algebra.

This module supplies the three primitives everything else is built on:

* :class:`SpdMatrix` -- a symmetric matrix stored either dense or as a
  small set of bands, with Cholesky factorization via
  :func:`spd_factorize` and :func:`solve`.
* :class:`BandedOperator` -- a (generally non-symmetric) Toeplitz-stencil
  operator with zero-padded boundaries, used for discrete differences.
* :func:`extreme_generalized_eigenvalues` -- the smallest and largest
  eigenvalues of the pencil ``A v = lam B v`` with ``B`` positive
  definite, computed by a Lanczos iteration in the ``B`` inner product.

All objects are immutable after construction and all functions are pure,
so everything here is safe to share across threads.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotPositiveDefiniteError,
)

__all__ = [
    "BandedOperator",
    "SpdMatrix",
    "SpdFactorization",
    "spd_factorize",
    "solve",
    "extreme_generalized_eigenvalues",
]


def _as_vector(x, order, what="vector"):
    x = np.asarray(x, dtype=float)
    if x.shape != (order,):
        raise DimensionMismatchError(
            f"{what} has shape {x.shape}, expected ({order},)"
        )
    return x


class BandedOperator:
    """Linear operator ``(Phi u)_i = sum_o c_o u_{i+o}`` with zero padding.

    The stencil is a list of ``(offset, coefficient)`` pairs applied at
    every row; entries that would read past either end of the vector are
    treated as zero.  The operator is square of the given order.

    Parameters
    ----------
    order : int
        Number of rows and columns.
    stencil : iterable of (int, float)
        Offsets and coefficients.  Offsets must be distinct.
    """

    def __init__(self, order, stencil):
        order = int(order)
        if order < 1:
            raise DimensionMismatchError("operator order must be positive")
        pairs = [(int(o), float(c)) for o, c in stencil]
        offsets = [o for o, _ in pairs]
        if len(set(offsets)) != len(offsets):
            raise ValueError("stencil offsets must be distinct")
        self.order = order
        self.stencil = tuple(sorted(pairs))

    def apply(self, u):
        """Return ``Phi u``."""
        u = _as_vector(u, self.order, "operand")
        out = np.zeros(self.order)
        m = self.order
        for o, c in self.stencil:
            if o >= 0:
                # row i reads u[i + o] for i in [0, m-1-o]
                out[: m - o] += c * u[o:]
            else:
                out[-o:] += c * u[: m + o]
        return out

    def apply_transpose(self, v):
        """Return ``Phi^T v``; the adjoint of :meth:`apply`."""
        v = _as_vector(v, self.order, "operand")
        out = np.zeros(self.order)
        m = self.order
        for o, c in self.stencil:
            # transpose of offset o is offset -o
            if o >= 0:
                out[o:] += c * v[: m - o]
            else:
                out[: m + o] += c * v[-o:]
        return out

    def to_dense(self):
        m = self.order
        a = np.zeros((m, m))
        for o, c in self.stencil:
            idx = np.arange(max(0, -o), min(m, m - o))
            a[idx, idx + o] = c
        return a

    def gram(self):
        """Return ``Phi Phi^T`` as a banded :class:`SpdMatrix`.

        Boundary rows differ from interior rows because of the zero
        padding, so each band is accumulated row by row from the stencil
        pair products.
        """
        m = self.order
        width = max(abs(o) for o, _ in self.stencil) if self.stencil else 0
        diagonals = {d: np.zeros(m - d) for d in range(0, 2 * width + 1) if d < m}
        for o1, c1 in self.stencil:
            for o2, c2 in self.stencil:
                d = o1 - o2
                if d < 0 or d not in diagonals:
                    continue
                # entry (i, i+d) gets c1*c2 whenever the shared column
                # k = i + o1 lies inside [0, m-1]
                lo = max(0, -o1)
                hi = min(m - 1 - d, m - 1 - o1)
                if lo <= hi:
                    diagonals[d][lo : hi + 1] += c1 * c2
        diagonals = {d: v for d, v in diagonals.items() if d == 0 or np.any(v)}
        return SpdMatrix.from_banded(m, diagonals)


class SpdMatrix:
    """Symmetric matrix, stored dense or as bands.

    Symmetry is structural: banded storage keeps only offsets ``d >= 0``
    (the diagonal ``a[i, i+d]``), and dense construction symmetrizes any
    skew part away by checking it is absent.  Positive definiteness is
    not checked at construction; it is established (or refuted) by
    :func:`spd_factorize`, which allows positive *semi*-definite
    instances to exist as pencil numerators.
    """

    def __init__(self, order, dense=None, diagonals=None):
        self.order = int(order)
        self._dense = dense
        self._diagonals = diagonals

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got {a.shape}")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix is not symmetric as stored")
        return cls(a.shape[0], dense=a.copy())

    @classmethod
    def from_banded(cls, order, diagonals):
        """Build from ``{offset d >= 0: array of a[i, i+d], length order-d}``."""
        order = int(order)
        bands = {}
        for d, vals in diagonals.items():
            d = int(d)
            if d < 0 or d >= order:
                raise DimensionMismatchError(f"band offset {d} out of range")
            vals = np.asarray(vals, dtype=float)
            if vals.shape != (order - d,):
                raise DimensionMismatchError(
                    f"band {d} has length {vals.shape}, expected {order - d}"
                )
            bands[d] = vals.copy()
        if 0 not in bands:
            bands[0] = np.zeros(order)
        return cls(order, diagonals=bands)

    @classmethod
    def from_diagonal(cls, d):
        d = np.asarray(d, dtype=float)
        return cls.from_banded(d.shape[0], {0: d})

    @classmethod
    def scaled_identity(cls, order, value):
        return cls.from_banded(order, {0: np.full(order, float(value))})

    @property
    def is_banded(self):
        return self._diagonals is not None

    @property
    def is_diagonal(self):
        return self.is_banded and set(self._diagonals) == {0}

    @property
    def bandwidth(self):
        if self.is_banded:
            return max(self._diagonals)
        return self.order - 1

    def diagonal(self):
        if self.is_banded:
            return self._diagonals[0].copy()
        return np.diag(self._dense).copy()

    def band(self, d):
        """Return the stored band at offset ``d >= 0`` (zeros if absent)."""
        if not self.is_banded:
            raise ValueError("band access requires banded storage")
        if d in self._diagonals:
            return self._diagonals[d].copy()
        return np.zeros(self.order - d)

    def to_dense(self):
        if not self.is_banded:
            return self._dense.copy()
        m = self.order
        a = np.zeros((m, m))
        for d, vals in self._diagonals.items():
            idx = np.arange(m - d)
            a[idx, idx + d] = vals
            if d > 0:
                a[idx + d, idx] = vals
        return a

    def matvec(self, x):
        x = _as_vector(x, self.order, "operand")
        if not self.is_banded:
            return self._dense @ x
        out = self._diagonals[0] * x
        for d, vals in self._diagonals.items():
            if d == 0:
                continue
            out[: self.order - d] += vals * x[d:]
            out[d:] += vals * x[: self.order - d]
        return out

    def add(self, other):
        """Return ``self + other`` as a new :class:`SpdMatrix`."""
        if self.order != other.order:
            raise DimensionMismatchError("matrix orders differ")
        if self.is_banded and other.is_banded:
            bands = {d: v.copy() for d, v in self._diagonals.items()}
            for d, v in other._diagonals.items():
                if d in bands:
                    bands[d] = bands[d] + v
                else:
                    bands[d] = v.copy()
            return SpdMatrix(self.order, diagonals=bands)
        return SpdMatrix(self.order, dense=self.to_dense() + other.to_dense())

    def add_scaled_identity(self, value):
        return self.add(SpdMatrix.scaled_identity(self.order, value))

    def scaled(self, value):
        """Return ``value * self`` as a new :class:`SpdMatrix`."""
        value = float(value)
        if self.is_banded:
            return SpdMatrix(
                self.order,
                diagonals={d: value * v for d, v in self._diagonals.items()},
            )
        return SpdMatrix(self.order, dense=value * self._dense)


class SpdFactorization:
    """Cholesky factorization of an :class:`SpdMatrix`; use :meth:`solve`."""

    def __init__(self, order, kind, data):
        self.order = order
        self._kind = kind
        self._data = data

    def solve(self, b):
        """Return ``x`` with ``A x = b`` for the factorized ``A``."""
        b = _as_vector(b, self.order, "right-hand side")
        if self._kind == "dense":
            return scipy.linalg.cho_solve(self._data, b)
        return scipy.linalg.cho_solve_banded(self._data, b)


def spd_factorize(a):
    """Cholesky-factorize a symmetric positive definite matrix.

    Parameters
    ----------
    a : SpdMatrix or array_like
        Matrix to factorize.  Arrays are treated as dense symmetric.

    Returns
    -------
    SpdFactorization

    Raises
    ------
    NotPositiveDefiniteError
        If any Cholesky pivot is not strictly positive.
    """
    if not isinstance(a, SpdMatrix):
        a = SpdMatrix.from_dense(a)
    try:
        if a.is_banded:
            bw = a.bandwidth
            m = a.order
            ab = np.zeros((bw + 1, m))
            for d in range(bw + 1):
                ab[d, : m - d] = a.band(d)
            cb = scipy.linalg.cholesky_banded(ab, lower=True)
            return SpdFactorization(m, "banded", (cb, True))
        c, low = scipy.linalg.cho_factor(a.to_dense(), lower=True)
        return SpdFactorization(a.order, "dense", (c, low))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc


def solve(factorization, b):
    """Solve ``A x = b`` given a factorization of ``A``."""
    return factorization.solve(b)


def _tridiag_extremes(alphas, betas, want_vectors=False):
    """Extreme eigenvalues (and last eigenvector components) of a Lanczos T."""
    k = len(alphas)
    d = np.asarray(alphas)
    if k == 1:
        if want_vectors:
            return d[0], d[0], 1.0, 1.0
        return d[0], d[0]
    e = np.asarray(betas[: k - 1])
    if not want_vectors:
        w = scipy.linalg.eigvalsh_tridiagonal(d, e)
        return w[0], w[-1]
    w_lo, v_lo = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    w_hi, v_hi = scipy.linalg.eigh_tridiagonal(d, e, select="i", select_range=(k - 1, k - 1))
    return w_lo[0], w_hi[0], v_lo[-1, 0], v_hi[-1, 0]


def extreme_generalized_eigenvalues(a, b, tol=1e-8, max_iterations=10000):
    """Smallest and largest eigenvalues of the pencil ``A v = lam B v``.

    ``A`` must be symmetric positive semidefinite and ``B`` symmetric
    positive definite.  The pencil is self-adjoint in the ``B`` inner
    product, so a Lanczos recurrence on ``B^{-1} A`` with ``B``-metric
    orthogonalization delivers both spectral extremes from one run; only
    the extremes are requested, never a full decomposition.

    Convergence is declared when the Ritz residuals of both extreme pairs
    fall below ``tol`` relative to the spectral scale, or when both
    extreme Ritz values have stagnated to well below ``tol`` across
    consecutive checkpoints (which is how tightly clustered extremes
    terminate).  A ``B``-norm breakdown means the Krylov space became
    invariant and the extremes are exact.

    Returns
    -------
    (float, float)
        ``(lambda_min, lambda_max)``.

    Raises
    ------
    NotPositiveDefiniteError
        If ``B`` is not positive definite.
    NoConvergenceError
        If the iteration cap is reached first.
    """
    if not isinstance(a, SpdMatrix):
        a = SpdMatrix.from_dense(a)
    if not isinstance(b, SpdMatrix):
        b = SpdMatrix.from_dense(b)
    if a.order != b.order:
        raise DimensionMismatchError("pencil matrices have different orders")

    b_fact = spd_factorize(b)
    m = a.order
    rng = np.random.default_rng(0x1B9)  # fixed start vector: deterministic output
    q = rng.standard_normal(m)
    q /= np.sqrt(q @ b.matvec(q))

    alphas: list[float] = []
    betas: list[float] = []
    q_prev = np.zeros(m)
    beta_prev = 0.0
    check_every = 10 if m <= 256 else 50
    stagnation_tol = 0.05 * tol
    prev_extremes = None
    stagnant_checks = 0

    for step in range(1, int(max_iterations) + 1):
        aq = a.matvec(q)
        alpha = float(q @ aq)
        w = b_fact.solve(aq)
        w -= alpha * q + beta_prev * q_prev
        alphas.append(alpha)

        bw = b.matvec(w)
        beta_sq = float(w @ bw)
        scale = max(abs(v) for v in alphas) + (max(betas) if betas else 0.0)
        if beta_sq <= (1e-14 * max(scale, 1.0)) ** 2:
            # invariant subspace: T already carries the exact extremes
            lo, hi = _tridiag_extremes(alphas, betas)
            return lo, hi
        beta = np.sqrt(beta_sq)
        betas.append(beta)

        if step % check_every == 0 or step == max_iterations:
            lo, hi, s_lo, s_hi = _tridiag_extremes(alphas, betas, want_vectors=True)
            spread = max(abs(lo), abs(hi), 1e-300)
            res = beta * max(abs(s_lo), abs(s_hi))
            if res <= tol * spread:
                return lo, hi
            if prev_extremes is not None:
                moved = max(abs(lo - prev_extremes[0]), abs(hi - prev_extremes[1]))
                stagnant_checks = stagnant_checks + 1 if moved <= stagnation_tol * spread else 0
                if stagnant_checks >= 2:
                    return lo, hi
            prev_extremes = (lo, hi)

        q_prev, q = q, w / beta
        beta_prev = beta

    raise NoConvergenceError(
        f"pencil extremes not converged within {max_iterations} iterations"
    )
