"""Solve a toy two-term quadratic problem with every driver and metric.

The problem is min G1(w) + G2(w) with two random convex quadratics.  The
same fixed-point iterations run under three metric designs:

* newton -- the metric is the Hessian of G1 + G2,
* agd    -- its diagonal,
* gd     -- a scaled identity (the conventional Euclidean solver).

Watch the iteration counts: the closer the metric is to the model
Hessian, the fewer steps to reach the analytic minimizer.
"""

import numpy as np

import bregsplit as bs

rng = np.random.default_rng(7)
m = 8

# two quadratics G_i(w) = 0.5 <A_i w, w> + <b_i, w>
basis, _ = np.linalg.qr(rng.standard_normal((m, m)))
a1 = basis @ np.diag(rng.uniform(0.5, 2.5, m)) @ basis.T
a2 = basis @ np.diag(rng.uniform(0.5, 2.5, m)) @ basis.T
a1, a2 = (a1 + a1.T) / 2.0, (a2 + a2.T) / 2.0
g1 = bs.QuadraticOracle(a1, rng.standard_normal(m))
g2 = bs.QuadraticOracle(a2, rng.standard_normal(m))

w_star = np.linalg.solve(a1 + a2, -(g1.linear + g2.linear))
print(f"analytic minimizer norm: {np.linalg.norm(w_star):.6f}\n")

total = g1.hessian.add(g2.hessian)
metrics = {
    "newton": bs.design_newton(total),
    "agd": bs.design_agd(total),
    "gd(kappa=1/3)": bs.design_gd(1.0 / 3.0, m),
}

z0 = rng.standard_normal(m)
config = bs.SolverConfig(max_iterations=500, stop_tolerance=1e-12)
config_dr = bs.SolverConfig(max_iterations=500, alpha=0.5, stop_tolerance=1e-12)

print(f"{'metric':>14} | {'method':>18} | iterations | error vs w*")
print("-" * 64)
for name, metric in metrics.items():
    for method, run in [
        ("peaceman-rachford", lambda met: bs.solve_peaceman_rachford(g1, g2, met, z0, config)),
        ("douglas-rachford", lambda met: bs.solve_douglas_rachford(g1, g2, met, z0, config_dr)),
        ("forward-backward", lambda met: bs.solve_forward_backward(g1, g2, met, z0, config)),
    ]:
        w, trace = run(metric)
        gap = np.linalg.norm(w - w_star)
        print(f"{name:>14} | {method:>18} | {len(trace):>10d} | {gap:.2e}")
print("\nThe matched (newton) metric needs the fewest steps; on badly")
print("conditioned problems (see demos/tv_denoising.py) the gap between it")
print("and the Euclidean baseline grows to an order of magnitude.")
