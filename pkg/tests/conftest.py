"""Shared instance generators and brute-force oracles for the test suite.

The random-instance helpers produce quadratic pairs whose Hessians
commute with every metric built from them (diagonal, or sharing one
orthogonal eigenbasis).  On that family the pencil-derived sigma pairs
are exact Euclidean constants, so the contraction theorems under test
hold in the plain L2 norm; outside it they hold only in the
Psi-weighted norm and the bound assertions would be vacuous or false.
"""

import numpy as np
import pytest

from bregsplit import QuadraticOracle, SpdMatrix


def make_rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture
def rng():
    return make_rng(20240814)


def diagonal_quadratic_pair(rng, m, lo=0.5, hi=2.5):
    """Random quadratic pair with diagonal Hessians and random linear terms."""
    d1 = rng.uniform(lo, hi, m)
    d2 = rng.uniform(lo, hi, m)
    b1 = rng.normal(0.0, 1.0, m)
    b2 = rng.normal(0.0, 1.0, m)
    g1 = QuadraticOracle(SpdMatrix.from_diagonal(d1), b1)
    g2 = QuadraticOracle(SpdMatrix.from_diagonal(d2), b2)
    return g1, g2


def random_orthogonal(rng, m):
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    return q * np.sign(np.diag(r))


def commuting_spd_pair(rng, m, a_range=(0.0, 3.0), psi_range=(0.5, 4.0)):
    """Dense (A, Psi) sharing an eigenbasis; A may touch zero (PSD)."""
    q = random_orthogonal(rng, m)
    a_eigs = rng.uniform(*a_range, m)
    psi_eigs = rng.uniform(*psi_range, m)
    a = q @ np.diag(a_eigs) @ q.T
    psi = q @ np.diag(psi_eigs) @ q.T
    # symmetrize exactly; from_dense requires it as stored
    a = (a + a.T) / 2.0
    psi = (psi + psi.T) / 2.0
    return a, psi, a_eigs / psi_eigs


def analytic_minimizer(g1, g2):
    """Independent solve of grad(G1 + G2) = 0 for quadratic oracles."""
    a = g1.hessian.to_dense() + g2.hessian.to_dense()
    return np.linalg.solve(a, -(g1.linear + g2.linear))


def golden_minimize(f, lo, hi, tol=1e-13, max_iter=300):
    """Golden-section minimizer of a strictly unimodal scalar function."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * (1.0 + abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def coordinate_minimize(f, dim, bracket=50.0, sweeps=400, tol=1e-12):
    """Cyclic per-coordinate golden-section descent on a convex function.

    Suited to objectives that are smooth plus separable nonsmooth (the L1
    term is separable, so coordinate descent converges to the minimum).
    """
    x = np.zeros(dim)

    def line(i, t):
        y = x.copy()
        y[i] = t
        return f(y)

    for _ in range(sweeps):
        moved = 0.0
        for i in range(dim):
            best = golden_minimize(lambda t: line(i, t), x[i] - bracket, x[i] + bracket)
            moved = max(moved, abs(best - x[i]))
            x[i] = best
        if moved <= tol:
            break
    return x
