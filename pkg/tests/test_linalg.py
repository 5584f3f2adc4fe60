import numpy as np
import pytest

from bregsplit import (
    BandedOperator,
    SpdMatrix,
    extreme_generalized_eigenvalues,
    solve,
    spd_factorize,
)
from bregsplit.errors import (
    DimensionMismatchError,
    NoConvergenceError,
    NotPositiveDefiniteError,
)
from conftest import make_rng


CENTRAL = ((-1, 1.0), (1, -1.0))
FORWARD = ((0, 1.0), (1, -1.0))


def tv_psi_banded(m, mu=2.0, theta=1.0, stencil=CENTRAL):
    phi = BandedOperator(m, stencil)
    return phi.gram().add_scaled_identity(1.0 / (mu * theta)), phi


def gaussian_elimination(a, b):
    """Plain dense elimination with partial pivoting; the solve oracle."""
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    n = len(b)
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, n):
            f = a[i, k] / a[k, k]
            a[i, k:] -= f * a[k, k:]
            b[i] -= f * b[k]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1 :] @ x[k + 1 :]) / a[k, k]
    return x


class TestBandedOperator:
    def test_central_stencil_values(self):
        phi = BandedOperator(3, CENTRAL)
        np.testing.assert_allclose(phi.apply(np.array([1.0, 2.0, 3.0])), [-2.0, -2.0, 2.0])

    def test_forward_stencil_values(self):
        phi = BandedOperator(3, FORWARD)
        np.testing.assert_allclose(phi.apply(np.array([1.0, 2.0, 3.0])), [-1.0, -1.0, 3.0])

    def test_zero_maps_to_zero(self):
        for stencil in (CENTRAL, FORWARD):
            phi = BandedOperator(6, stencil)
            assert np.all(phi.apply(np.zeros(6)) == 0.0)
            assert np.all(phi.apply_transpose(np.zeros(6)) == 0.0)

    def test_adjoint_identity_on_random_pairs(self):
        rng = make_rng(11)
        for stencil in (CENTRAL, FORWARD, ((-2, 0.3), (0, -1.1), (3, 2.0))):
            phi = BandedOperator(23, stencil)
            for _ in range(100):
                u = rng.standard_normal(23)
                v = rng.standard_normal(23)
                lhs = phi.apply(u) @ v
                rhs = u @ phi.apply_transpose(v)
                assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1.0)

    def test_apply_matches_dense(self):
        rng = make_rng(12)
        phi = BandedOperator(9, CENTRAL)
        dense = phi.to_dense()
        for _ in range(10):
            u = rng.standard_normal(9)
            np.testing.assert_allclose(phi.apply(u), dense @ u, atol=1e-14)
            np.testing.assert_allclose(phi.apply_transpose(u), dense.T @ u, atol=1e-14)

    def test_gram_matches_dense_product(self):
        for m in (2, 3, 5, 8, 13):
            for stencil in (CENTRAL, FORWARD, ((-2, 0.5), (1, -1.0))):
                phi = BandedOperator(m, stencil)
                dense = phi.to_dense()
                np.testing.assert_allclose(phi.gram().to_dense(), dense @ dense.T, atol=1e-14)


class TestFactorizeSolve:
    def test_identity_solve(self):
        f = spd_factorize(np.eye(3))
        np.testing.assert_allclose(f.solve(np.array([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])

    def test_diagonal_solve(self):
        f = spd_factorize(np.array([[2.0, 0.0], [0.0, 4.0]]))
        np.testing.assert_allclose(f.solve(np.array([2.0, 4.0])), [1.0, 1.0])

    def test_one_by_one(self):
        f = spd_factorize(np.array([[4.0]]))
        np.testing.assert_allclose(solve(f, np.array([8.0])), [2.0])

    def test_random_spd_residual(self):
        rng = make_rng(8)
        g = rng.standard_normal((8, 8))
        a = g @ g.T + 8.0 * np.eye(8)
        b = rng.standard_normal(8)
        x = spd_factorize(a).solve(b)
        assert np.linalg.norm(a @ x - b) <= 1e-10 * np.linalg.norm(b)

    def test_banded_tv_psi_vs_gaussian_elimination(self):
        psi, _ = tv_psi_banded(4, mu=2.0, theta=1.0)
        b = np.ones(4)
        x = spd_factorize(psi).solve(b)
        np.testing.assert_allclose(x, gaussian_elimination(psi.to_dense(), b), rtol=1e-12)

    def test_factorize_solve_roundtrip(self):
        rng = make_rng(9)
        for m in (1, 2, 5, 11):
            g = rng.standard_normal((m, m))
            a = g @ g.T + m * np.eye(m)
            a = (a + a.T) / 2.0
            f = spd_factorize(a)
            for _ in range(5):
                v = rng.standard_normal(m)
                np.testing.assert_allclose(f.solve(a @ v), v, rtol=1e-9, atol=1e-12)

    def test_banded_matches_dense_path(self):
        psi, _ = tv_psi_banded(12)
        rng = make_rng(10)
        b = rng.standard_normal(12)
        banded = spd_factorize(psi).solve(b)
        dense = spd_factorize(SpdMatrix.from_dense(psi.to_dense())).solve(b)
        np.testing.assert_allclose(banded, dense, rtol=1e-12)

    def test_not_positive_definite_dense(self):
        with pytest.raises(NotPositiveDefiniteError):
            spd_factorize(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_not_positive_definite_banded(self):
        a = SpdMatrix.from_banded(3, {0: np.array([1.0, -1.0, 1.0])})
        with pytest.raises(NotPositiveDefiniteError):
            spd_factorize(a)

    def test_dimension_mismatch(self):
        f = spd_factorize(np.eye(3))
        with pytest.raises(DimensionMismatchError):
            f.solve(np.ones(4))

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            SpdMatrix.from_dense(np.array([[1.0, 2.0], [2.0 + 1e-15, 1.0]]))


class TestSpdMatrixAlgebra:
    def test_banded_matvec_matches_dense(self):
        rng = make_rng(13)
        a = SpdMatrix.from_banded(
            7, {0: np.full(7, 3.0), 1: rng.standard_normal(6), 2: rng.standard_normal(5)}
        )
        dense = a.to_dense()
        for _ in range(5):
            v = rng.standard_normal(7)
            np.testing.assert_allclose(a.matvec(v), dense @ v, atol=1e-13)

    def test_add_banded_and_dense(self):
        psi, _ = tv_psi_banded(5)
        dense = SpdMatrix.from_dense(np.eye(5) * 0.25)
        both = psi.add(dense)
        np.testing.assert_allclose(both.to_dense(), psi.to_dense() + 0.25 * np.eye(5))
        banded_sum = psi.add(SpdMatrix.scaled_identity(5, 0.25))
        assert banded_sum.is_banded
        np.testing.assert_allclose(banded_sum.to_dense(), both.to_dense())

    def test_scaled(self):
        psi, _ = tv_psi_banded(5)
        np.testing.assert_allclose(psi.scaled(2.5).to_dense(), 2.5 * psi.to_dense())


class TestPencilExtremes:
    def test_identity_pencil(self):
        lo, hi = extreme_generalized_eigenvalues(np.eye(4), np.eye(4))
        assert lo == pytest.approx(1.0, abs=1e-12)
        assert hi == pytest.approx(1.0, abs=1e-12)

    def test_diagonal_pencil(self):
        a = np.diag([2.0, 8.0])
        b = 2.0 * np.eye(2)
        lo, hi = extreme_generalized_eigenvalues(a, b)
        assert lo == pytest.approx(1.0, rel=1e-10)
        assert hi == pytest.approx(4.0, rel=1e-10)

    def test_tv_pencil_matches_dense_eigensolver(self):
        psi, phi = tv_psi_banded(6)
        gram = phi.gram()
        lo, hi = extreme_generalized_eigenvalues(gram, psi)
        # oracle: eigenvalues of Psi^{-1} (Phi Phi^T), formed densely
        w = np.sort(np.linalg.eigvals(np.linalg.solve(psi.to_dense(), gram.to_dense())).real)
        assert lo == pytest.approx(w[0], rel=1e-8, abs=1e-10)
        assert hi == pytest.approx(w[-1], rel=1e-8)

    def test_random_dense_pencils_match_scipy(self):
        import scipy.linalg

        rng = make_rng(14)
        for m in (2, 5, 9):
            g = rng.standard_normal((m, m))
            a = g @ g.T
            a = (a + a.T) / 2.0
            h = rng.standard_normal((m, m))
            b = h @ h.T + m * np.eye(m)
            b = (b + b.T) / 2.0
            w = scipy.linalg.eigh(a, b, eigvals_only=True)
            lo, hi = extreme_generalized_eigenvalues(a, b)
            assert lo == pytest.approx(w[0], rel=1e-8, abs=1e-10)
            assert hi == pytest.approx(w[-1], rel=1e-8)

    def test_brackets_rayleigh_quotients(self):
        rng = make_rng(15)
        psi, phi = tv_psi_banded(17)
        gram = phi.gram()
        lo, hi = extreme_generalized_eigenvalues(gram, psi)
        for _ in range(100):
            v = rng.standard_normal(17)
            quotient = (gram.matvec(v) @ v) / (psi.matvec(v) @ v)
            assert lo - 1e-9 <= quotient <= hi + 1e-9

    def test_psd_numerator_allowed(self):
        # the central stencil annihilates (1, 0, 1, ...) at odd order
        psi, phi = tv_psi_banded(7)
        lo, hi = extreme_generalized_eigenvalues(phi.gram(), psi)
        assert lo >= -1e-12
        assert lo == pytest.approx(0.0, abs=1e-10)
        assert hi > 0.5

    def test_zero_numerator(self):
        zero = SpdMatrix.from_banded(5, {0: np.zeros(5)})
        lo, hi = extreme_generalized_eigenvalues(zero, np.eye(5))
        assert lo == 0.0 and hi == 0.0

    def test_not_positive_definite_denominator(self):
        with pytest.raises(NotPositiveDefiniteError):
            extreme_generalized_eigenvalues(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_iteration_cap(self):
        rng = make_rng(16)
        g = rng.standard_normal((6, 6))
        a = g @ g.T
        a = (a + a.T) / 2.0
        with pytest.raises(NoConvergenceError):
            extreme_generalized_eigenvalues(a, np.eye(6), max_iterations=1)

    def test_order_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            extreme_generalized_eigenvalues(np.eye(3), np.eye(4))
