"""Predict convergence rates before running, then verify against a run.

For quadratic costs the behaviour of each splitting driver is governed
by the extreme eigenvalues of the pencil (Hessian, metric): the sigma
pair.  From it come the contraction factors

    eta    (reflected resolvent)      -> Peaceman-Rachford rate eta1*eta2
    nu     (forward step)             -> stability of explicit steps
    lambda (forward-backward product) -> forward-backward rate

This script estimates the pairs, prints the predicted per-iteration
factors, and checks a live run never beats the prediction the wrong way.
"""

import numpy as np

import bregsplit as bs

rng = np.random.default_rng(21)
m = 6

d1 = rng.uniform(0.5, 2.5, m)
d2 = rng.uniform(0.5, 2.5, m)
g1 = bs.QuadraticOracle(bs.SpdMatrix.from_diagonal(d1), rng.standard_normal(m))
g2 = bs.QuadraticOracle(bs.SpdMatrix.from_diagonal(d2), rng.standard_normal(m))
w_star = np.linalg.solve(np.diag(d1 + d2), -(g1.linear + g2.linear))

for name, metric in [
    ("newton", bs.design_newton(g1.hessian.add(g2.hessian))),
    ("gd(kappa=1/3)", bs.design_gd(1.0 / 3.0, m)),
]:
    sigma1 = bs.estimate_sigma(g1, metric)
    sigma2 = bs.estimate_sigma(g2, metric)
    model = bs.RateModel.from_sigma(sigma1, sigma2, alpha=0.5)
    print(f"== metric {name}")
    print(f"   sigma_1 = ({sigma1.sigma_lb:.4f}, {sigma1.sigma_ub:.4f})"
          f"   sigma_2 = ({sigma2.sigma_lb:.4f}, {sigma2.sigma_ub:.4f})")
    print(f"   eta_1 = {model.eta1:.4f}  eta_2 = {model.eta2:.4f}"
          f"  -> P-R factor {model.contraction_factor('pr'):.4f},"
          f" D-R factor {model.contraction_factor('dr'):.4f},"
          f" F-B factor {model.contraction_factor('fb'):.4f}")
    print(f"   forward step nonexpansive for G1: "
          f"{bs.is_forward_step_nonexpansive(sigma1)}")

    z0 = rng.standard_normal(m)
    z_star = w_star + metric.grad_d_inv(g1.subgradient(w_star))
    _, trace = bs.solve_peaceman_rachford(
        g1, g2, metric, z0, bs.SolverConfig(max_iterations=25, record_trace=True)
    )
    distances = bs.attach_reference(trace, z_star).reference_distances
    predicted = [
        bs.predict_bounds(model, "pr", t, distances[0]) for t in range(len(distances))
    ]
    print("   t   measured ||z - z*||   predicted bound")
    for t in (0, 1, 2, 5, 10, 25):
        print(f"  {t:>2}   {distances[t]:.6e}       {predicted[t]:.6e}")
    violation = max(d - p for d, p in zip(distances, predicted))
    print(f"   worst bound violation: {violation:.2e} (never above 0 means "
          f"the prediction is a certificate)\n")
