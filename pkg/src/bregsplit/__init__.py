"""Operator splitting under quadratic Bregman metrics.

The package solves ``min G1 + G2`` for convex ``G1``, ``G2`` with
Peaceman-Rachford, Douglas-Rachford and forward-backward iterations in
which every proximal step is measured by a designable quadratic metric
``D(w) = 0.5 <Psi w, w>`` instead of the Euclidean one.  Matching the
metric to a quadratic model of the cost (``newton``/``agd`` designs)
contracts the iteration much faster than a step-size-tuned Euclidean
run, and the achievable speed is predictable in advance from two
spectral constants per function.

Modules
-------
``linalg``     banded/dense SPD factorizations, difference operators,
               pencil eigenvalue extremes
``metric``     quadratic Bregman metrics and the newton/agd/gd designs
``operators``  resolvent, reflected-resolvent, forward, averaged maps
``splitting``  the three iteration drivers with tracing
``rates``      contraction factors and convergence-rate bounds
``tvdenoise``  1-D total-variation denoising on the dual, plus data
               generation
``cli``        file-based experiment harness (``python -m bregsplit``)
"""

from .errors import BregsplitError
from .linalg import (
    BandedOperator,
    SpdFactorization,
    SpdMatrix,
    extreme_generalized_eigenvalues,
    solve,
    spd_factorize,
)
from .metric import QuadraticMetric, design_agd, design_gd, design_newton
from .operators import (
    ConvexOracle,
    CustomOracle,
    ElasticNetOracle,
    QuadraticOracle,
    averaged,
    d_cayley,
    d_forward,
    d_resolvent,
)
from .rates import (
    RateModel,
    SigmaPair,
    estimate_sigma,
    eta,
    is_forward_step_nonexpansive,
    lambda_fb,
    nu,
    predict_bounds,
)
from .splitting import (
    SolverConfig,
    Trace,
    attach_reference,
    solve_douglas_rachford,
    solve_forward_backward,
    solve_peaceman_rachford,
)
from .tvdenoise import (
    GroundTruth,
    TvProblem,
    TvSolverState,
    TvTrace,
    add_noise,
    build_psi,
    dual_oracles,
    generate_piecewise_signal,
    make_difference_operator,
    primal_estimate,
    solve_tv,
    update_u,
    update_v,
)

__version__ = "0.1.0"

__all__ = [
    "BregsplitError",
    "BandedOperator",
    "SpdFactorization",
    "SpdMatrix",
    "extreme_generalized_eigenvalues",
    "solve",
    "spd_factorize",
    "QuadraticMetric",
    "design_agd",
    "design_gd",
    "design_newton",
    "ConvexOracle",
    "CustomOracle",
    "ElasticNetOracle",
    "QuadraticOracle",
    "averaged",
    "d_cayley",
    "d_forward",
    "d_resolvent",
    "RateModel",
    "SigmaPair",
    "estimate_sigma",
    "eta",
    "is_forward_step_nonexpansive",
    "lambda_fb",
    "nu",
    "predict_bounds",
    "SolverConfig",
    "Trace",
    "attach_reference",
    "solve_douglas_rachford",
    "solve_forward_backward",
    "solve_peaceman_rachford",
    "GroundTruth",
    "TvProblem",
    "TvSolverState",
    "TvTrace",
    "add_noise",
    "build_psi",
    "dual_oracles",
    "generate_piecewise_signal",
    "make_difference_operator",
    "primal_estimate",
    "solve_tv",
    "update_u",
    "update_v",
]
