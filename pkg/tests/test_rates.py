import math

import numpy as np
import pytest

from bregsplit import (
    CustomOracle,
    QuadraticOracle,
    RateModel,
    SigmaPair,
    SolverConfig,
    attach_reference,
    design_agd,
    design_gd,
    design_newton,
    estimate_sigma,
    eta,
    is_forward_step_nonexpansive,
    lambda_fb,
    nu,
    predict_bounds,
    solve_peaceman_rachford,
)
from bregsplit.errors import (
    InadmissiblePairError,
    MissingAlphaError,
    NoQuadraticModelError,
)
from bregsplit.tvdenoise import TvProblem, build_psi, make_difference_operator
from conftest import analytic_minimizer, diagonal_quadratic_pair, make_rng


def forged_pair(lb, ub):
    """Bypass validation to exercise defensive branches."""
    pair = object.__new__(SigmaPair)
    object.__setattr__(pair, "sigma_lb", lb)
    object.__setattr__(pair, "sigma_ub", ub)
    return pair


class TestSigmaPair:
    def test_validation(self):
        with pytest.raises(ValueError):
            SigmaPair(-0.1, 1.0)
        with pytest.raises(ValueError):
            SigmaPair(2.0, 1.0)
        with pytest.raises(ValueError):
            SigmaPair(0.0, math.inf)

    def test_dynamic_range(self):
        assert SigmaPair(0.5, 2.0).dynamic_range == 4.0
        assert SigmaPair(0.0, 2.0).dynamic_range == math.inf


class TestEstimateSigma:
    def test_matched_metric_gives_optimal_pair(self):
        rng = make_rng(71)
        g = rng.standard_normal((4, 4))
        a = g @ g.T + 4.0 * np.eye(4)
        a = (a + a.T) / 2.0
        oracle = QuadraticOracle(a, np.zeros(4))
        sigma = estimate_sigma(oracle, design_newton(a))
        assert sigma.sigma_lb == pytest.approx(1.0, abs=1e-10)
        assert sigma.sigma_ub == pytest.approx(1.0, abs=1e-10)

    def test_zero_operator(self):
        oracle = QuadraticOracle(np.zeros((3, 3)), np.zeros(3))
        sigma = estimate_sigma(oracle, design_gd(1.0, 3))
        assert sigma.sigma_lb == 0.0 and sigma.sigma_ub == 0.0

    def test_diagonal_pencil(self):
        oracle = QuadraticOracle(np.diag([2.0, 8.0]), np.zeros(2))
        metric = design_newton(2.0 * np.eye(2))
        sigma = estimate_sigma(oracle, metric)
        assert sigma.sigma_lb == pytest.approx(1.0, rel=1e-10)
        assert sigma.sigma_ub == pytest.approx(4.0, rel=1e-10)

    def test_no_quadratic_model(self):
        oracle = CustomOracle(2, bregman_prox=lambda z, metric: z)
        with pytest.raises(NoQuadraticModelError):
            estimate_sigma(oracle, design_gd(1.0, 2))


class TestFactorFormulas:
    def test_eta_optimal_pair_exactly_zero(self):
        assert eta(SigmaPair(1.0, 1.0)) == 0.0

    def test_eta_no_strong_monotonicity(self):
        for ub in (0.0, 0.5, 1.0, 7.0):
            assert eta(SigmaPair(0.0, ub)) == 1.0

    def test_eta_half_half_is_one_third(self):
        assert abs(eta(SigmaPair(0.5, 0.5)) - 1.0 / 3.0) <= 1e-15

    def test_eta_equal_pair_closed_form(self):
        for s in (0.1, 0.9, 1.0, 2.5, 10.0):
            assert eta(SigmaPair(s, s)) == pytest.approx(abs(1 - s) / (1 + s), abs=1e-14)

    def test_eta_inadmissible_guard(self):
        with pytest.raises(InadmissiblePairError):
            eta(forged_pair(4.0, 0.5))

    def test_eta_in_unit_interval_on_valid_grid(self):
        for ub in np.linspace(0.0, 5.0, 21):
            for lb in np.linspace(0.0, ub, 11):
                assert 0.0 <= eta(SigmaPair(lb, ub)) <= 1.0

    def test_nu_values(self):
        assert nu(SigmaPair(1.0, 1.0)) == 0.0
        assert nu(SigmaPair(0.0, 1.0)) == pytest.approx(math.sqrt(2.0))
        assert nu(SigmaPair(0.0, 0.0)) == 1.0

    def test_lambda_values(self):
        assert lambda_fb(SigmaPair(1.0, 1.0), SigmaPair(0.3, 2.0)) == 0.0
        assert lambda_fb(SigmaPair(0.0, 0.0), SigmaPair(0.0, 0.0)) == 1.0
        assert lambda_fb(SigmaPair(0.5, 0.5), SigmaPair(0.0, 0.0)) == pytest.approx(0.5)

    def test_eta_monotone_in_both_arguments(self):
        ubs = np.linspace(0.2, 3.0, 15)
        for ub in ubs:
            lbs = np.linspace(0.0, ub, 12)
            values = [eta(SigmaPair(lb, ub)) for lb in lbs]
            assert all(a >= b - 1e-14 for a, b in zip(values, values[1:]))
        for lb in (0.0, 0.1, 0.5):
            values = [eta(SigmaPair(lb, ub)) for ub in np.linspace(max(lb, 0.5), 4.0, 15)]
            assert all(a <= b + 1e-14 for a, b in zip(values, values[1:]))

    def test_eta_minimized_as_pair_approaches_one(self):
        # fixed dynamic range r: the best eta sits at sigma_ub = 1, and the
        # overall optimum over r is the unit pair
        best_by_ratio = []
        for ratio in (1.0, 1.5, 3.0):
            grid = np.linspace(0.05, 4.0, 4000)
            values = [eta(SigmaPair(t, ratio * t)) for t in grid]
            best_t = grid[int(np.argmin(values))]
            assert ratio * best_t == pytest.approx(1.0, abs=0.02)
            best_by_ratio.append(min(values))
        assert best_by_ratio == sorted(best_by_ratio)
        # the grid brackets but does not hit the exact optimum
        assert best_by_ratio[0] == pytest.approx(0.0, abs=1e-3)
        assert eta(SigmaPair(1.0, 1.0)) == 0.0


class TestNonexpansiveRegion:
    def test_boundary_and_interior_points(self):
        assert is_forward_step_nonexpansive(SigmaPair(1.0, 1.0))
        assert not is_forward_step_nonexpansive(SigmaPair(0.0, 0.5))
        assert is_forward_step_nonexpansive(SigmaPair(0.5, 1.0))

    def test_region_matches_nu_condition(self):
        # skip points within roundoff of the parabolic boundary, where the
        # two formulations of the same condition may disagree by one ulp
        for ub in np.linspace(0.0, 2.0, 41):
            for lb in np.linspace(0.0, ub, 21):
                if abs(lb - 0.5 * ub * ub) <= 1e-12:
                    continue
                pair = SigmaPair(lb, ub)
                expected = ub <= 1.0 and nu(pair) <= 1.0
                assert is_forward_step_nonexpansive(pair) == expected


class TestPredictions:
    def test_zeroth_iteration_returns_initial_distance(self):
        model = RateModel.from_sigma(SigmaPair(0.5, 0.5), SigmaPair(0.5, 0.5), alpha=0.5)
        for method in ("pr", "dr", "fb"):
            assert predict_bounds(model, method, 0, 7.5) == 7.5

    def test_pr_power(self):
        model = RateModel.from_sigma(SigmaPair(0.5, 0.5), SigmaPair(0.5, 0.5))
        assert predict_bounds(model, "pr", 2, 1.0) == pytest.approx(1.0 / 81.0, rel=1e-12)

    def test_dr_with_perfect_reflection(self):
        model = RateModel.from_sigma(SigmaPair(1.0, 1.0), SigmaPair(1.0, 1.0), alpha=0.5)
        for t in range(5):
            assert predict_bounds(model, "dr", t, 3.0) == pytest.approx(0.5**t * 3.0)

    def test_missing_alpha(self):
        model = RateModel.from_sigma(SigmaPair(0.5, 0.5), SigmaPair(0.5, 0.5))
        with pytest.raises(MissingAlphaError):
            predict_bounds(model, "dr", 3, 1.0)

    def test_unknown_method(self):
        model = RateModel.from_sigma(SigmaPair(0.5, 0.5), SigmaPair(0.5, 0.5))
        with pytest.raises(ValueError):
            model.contraction_factor("admm")

    def test_bound_validity_on_live_runs(self):
        rng = make_rng(72)
        for _ in range(50):
            m = int(rng.integers(2, 7))
            g1, g2 = diagonal_quadratic_pair(rng, m)
            metric = design_newton(g1.hessian.add(g2.hessian))
            model = RateModel.from_sigma(
                estimate_sigma(g1, metric), estimate_sigma(g2, metric)
            )
            w_star = analytic_minimizer(g1, g2)
            z_star = w_star + metric.grad_d_inv(g1.subgradient(w_star))
            _, trace = solve_peaceman_rachford(
                g1,
                g2,
                metric,
                rng.standard_normal(m),
                SolverConfig(max_iterations=20, record_trace=True),
            )
            d = attach_reference(trace, z_star).reference_distances
            factor = model.contraction_factor("pr")
            for t in range(len(d) - 1):
                assert d[t + 1] <= factor * d[t] + 1e-9


class TestDynamicRangeOrdering:
    def test_tv_dual_hessian_small_instance(self):
        m = 50
        phi = make_difference_operator(m, "central")
        rng = make_rng(73)
        problem = TvProblem(s=rng.standard_normal(m), phi=phi, mu=2.0, theta=1.0)
        hessian = phi.gram().add_scaled_identity(1.0 / 2.0)
        oracle = QuadraticOracle(hessian, np.zeros(m))
        ranges = {}
        for design in ("newton", "agd", "gd"):
            metric = build_psi(problem, design, kappa=0.01)
            ranges[design] = estimate_sigma(oracle, metric).dynamic_range
        assert 1.0 <= ranges["newton"] + 1e-12
        assert ranges["newton"] <= ranges["agd"] + 1e-9
        assert ranges["agd"] <= ranges["gd"] + 1e-9
