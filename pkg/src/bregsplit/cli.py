"""Batch experiment harness: generate data, denoise, compare, predict rates.

Subcommands
-----------
``generate``   write a piecewise-constant source and its noisy observation
``denoise``    run one solver/metric combination on generated files
``compare``    run all six reflected/averaged x newton/agd/gd variants
``rates``      write per-variant sigma pairs, contraction factors and a
               measured short-run contraction

Every subcommand accepts ``--config PATH`` (defaults apply when omitted),
``--seed INT`` (overrides ``problem.seed``) and ``--out PATH`` (overrides
the subcommand's primary output file).  Exit codes: 0 success, 2
configuration error, 3 file parse error, 4 runtime/solver error (this
last bucket includes unreadable or missing data files).

Configuration format
--------------------
A flat text file of ``key = value`` lines; blank lines and ``#``
comments are ignored.  Keys and defaults:

==========================  =========  =====================================
key                         default    meaning
==========================  =========  =====================================
problem.m                   2000       signal length
problem.segments            10         constant runs in the source
problem.level_lo            -3.0       lowest source level
problem.level_hi            3.0        highest source level
problem.noise_sigma         0.5        observation noise std deviation
problem.seed                42         generator seed (noise uses seed + 1)
problem.stencil             central    difference stencil: central | forward
problem.mu                  2.0        regularization weight
problem.theta               1.0        squared-L2 share of the regularizer
solver.method               bpr        bpr | bdr | bfb
solver.metric               newton     newton | agd | gd
solver.kappa                0.01       step size (required iff metric = gd)
solver.alpha                0.5        averaging (required iff method = bdr)
solver.iterations           300        iteration count T
solver.stop_tolerance       0.0        early stop on dual change (0 = off)
output.trace                trace.csv  per-iteration trace (denoise/compare)
output.estimate             u_hat.txt  final estimate (denoise)
output.report               rates.csv  rate report (rates)
output.ground_truth         u_gt.txt   source file (generate/denoise)
output.observed             s.txt      observation file (generate/denoise)
output.format               csv        trace format (csv only)
==========================  =========  =====================================

Signal files hold one decimal value per line.  Trace files are CSV with
header ``t,error,z_change,seconds`` (plus a leading ``variant`` column
for ``compare``) and floats at 17 significant digits; row ``t = 0``
describes the initialization shared by all variants, rows ``1..T`` one
iteration each.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import (
    BregsplitError,
    ConfigError,
    DimensionMismatchError,
    ParseError,
)
from .rates import RateModel, estimate_sigma
from .linalg import extreme_generalized_eigenvalues
from .splitting import SolverConfig, solve_forward_backward
from .tvdenoise import (
    GroundTruth,
    TvProblem,
    TvTrace,
    add_noise,
    build_psi,
    dual_oracles,
    generate_piecewise_signal,
    make_difference_operator,
    primal_estimate,
    solve_tv,
)

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "serialize_config",
    "load_config",
    "read_signal",
    "write_signal",
    "read_trace",
    "cmd_generate",
    "cmd_denoise",
    "cmd_compare",
    "cmd_rates",
    "main",
]

VARIANTS = [
    ("bpr", "newton"),
    ("bpr", "agd"),
    ("bpr", "gd"),
    ("bdr", "newton"),
    ("bdr", "agd"),
    ("bdr", "gd"),
]


@dataclass
class ExperimentConfig:
    problem_m: int = 2000
    problem_segments: int = 10
    problem_level_lo: float = -3.0
    problem_level_hi: float = 3.0
    problem_noise_sigma: float = 0.5
    problem_seed: int = 42
    problem_stencil: str = "central"
    problem_mu: float = 2.0
    problem_theta: float = 1.0
    solver_method: str = "bpr"
    solver_metric: str = "newton"
    solver_kappa: float | None = 0.01
    solver_alpha: float | None = 0.5
    solver_iterations: int = 300
    solver_stop_tolerance: float = 0.0
    output_trace: str = "trace.csv"
    output_estimate: str = "u_hat.txt"
    output_report: str = "rates.csv"
    output_ground_truth: str = "u_gt.txt"
    output_observed: str = "s.txt"
    output_format: str = "csv"


def _optional_float(text):
    return None if text == "none" else float(text)


_CONVERTERS = {int: int, float: float, str: str}
_OPTIONAL_FLOATS = ("solver_kappa", "solver_alpha")
_ENUMS = {
    "problem_stencil": ("central", "forward"),
    "solver_method": ("bpr", "bdr", "bfb"),
    "solver_metric": ("newton", "agd", "gd"),
    "output_format": ("csv",),
}


def _key_of(field_name: str) -> str:
    section, _, rest = field_name.partition("_")
    return f"{section}.{rest}"


_FIELD_BY_KEY = {_key_of(f.name): f for f in fields(ExperimentConfig)}


def parse_config(text: str) -> ExperimentConfig:
    """Parse ``key = value`` lines into a config; unknown keys are errors."""
    config = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_BY_KEY:
            raise ConfigError(f"unknown configuration key {key!r}", key=key)
        f = _FIELD_BY_KEY[key]
        try:
            if f.name in _OPTIONAL_FLOATS:
                parsed = _optional_float(value)
            else:
                parsed = _CONVERTERS[type(f.default)](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}", key=key) from exc
        setattr(config, f.name, parsed)
    _validate(config)
    return config


def _validate(config: ExperimentConfig):
    for name, allowed in _ENUMS.items():
        if getattr(config, name) not in allowed:
            raise ConfigError(
                f"{_key_of(name)} must be one of {allowed}, got {getattr(config, name)!r}",
                key=_key_of(name),
            )
    if config.solver_metric == "gd" and config.solver_kappa is None:
        raise ConfigError("solver.kappa is required when solver.metric = gd", key="solver.kappa")
    if config.solver_method == "bdr" and config.solver_alpha is None:
        raise ConfigError("solver.alpha is required when solver.method = bdr", key="solver.alpha")


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config as the canonical ``key = value`` text."""
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if value is None:
            value = "none"
        elif isinstance(value, float):
            value = format(value, ".17g")
        lines.append(f"{_key_of(f.name)} = {value}")
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def write_signal(path, values):
    with open(path, "w", encoding="utf-8") as handle:
        for value in np.asarray(values, dtype=float):
            handle.write(format(value, ".17g") + "\n")


def read_signal(path):
    values = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: not a number: {line!r}", line=lineno) from exc
    return np.array(values)


def _write_trace(path, trace: TvTrace, variant=None):
    header = "t,error,z_change,seconds"
    prefix = "" if variant is None else variant + ","
    if variant is not None:
        header = "variant," + header
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(header + "\n")
        handle.write(_trace_rows(trace, prefix))


def _trace_rows(trace: TvTrace, prefix=""):
    rows = []
    for t, err, change, sec in zip(trace.steps, trace.errors, trace.z_changes, trace.seconds):
        rows.append(
            f"{prefix}{t},{format(err, '.17g')},{format(change, '.17g')},{format(sec, '.17g')}"
        )
    return "\n".join(rows) + "\n"


def read_trace(path):
    """Parse a trace written by ``denoise`` back into column arrays."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if not lines or lines[0] != "t,error,z_change,seconds":
        raise ParseError(f"{path}:1: missing trace header", line=1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(f"{path}:{lineno}: expected 4 columns", line=lineno)
        try:
            rows.append((int(parts[0]), float(parts[1]), float(parts[2]), float(parts[3])))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: bad number", line=lineno) from exc
    t = np.array([r[0] for r in rows], dtype=int)
    columns = np.array([r[1:] for r in rows])
    return t, columns[:, 0], columns[:, 1], columns[:, 2]


def _make_data(config: ExperimentConfig):
    u_gt = generate_piecewise_signal(
        config.problem_m,
        config.problem_segments,
        (config.problem_level_lo, config.problem_level_hi),
        seed=config.problem_seed,
    )
    s = add_noise(u_gt, config.problem_noise_sigma, seed=config.problem_seed + 1)
    return u_gt, s


def _make_problem(config: ExperimentConfig, s):
    phi = make_difference_operator(config.problem_m, config.problem_stencil)
    return TvProblem(s=s, phi=phi, mu=config.problem_mu, theta=config.problem_theta)


def _run_variant(config, problem, ground_truth, method, metric_name):
    metric = build_psi(problem, metric_name, kappa=config.solver_kappa)
    if method in ("bpr", "bdr"):
        return solve_tv(
            problem,
            metric,
            method,
            config.solver_iterations,
            alpha=config.solver_alpha if method == "bdr" else None,
            ground_truth=ground_truth,
            stop_tolerance=config.solver_stop_tolerance,
        )
    # forward-backward runs through the generic driver on the dual pair
    g1, g2 = dual_oracles(problem)
    run_config = SolverConfig(
        max_iterations=config.solver_iterations,
        stop_tolerance=config.solver_stop_tolerance,
        record_trace=True,
    )
    w, generic = solve_forward_backward(g1, g2, metric, np.zeros(problem.size), run_config)
    u_gt = None if ground_truth is None else ground_truth.u_gt

    def error_of(u):
        if u_gt is None:
            return np.nan
        return 0.5 * float((u_gt - u) @ (u_gt - u))

    trace = TvTrace()
    trace.append(0, error_of(primal_estimate(problem, generic.initial_point)), 0.0, 0.0)
    for t, change, sec, w_t in zip(
        generic.steps, generic.changes, generic.seconds, generic.iterates
    ):
        trace.append(t, error_of(primal_estimate(problem, w_t)), change, sec)
    return primal_estimate(problem, w), trace


def cmd_generate(config: ExperimentConfig, out=None):
    """Write the source and observation files; returns their paths."""
    u_gt, s = _make_data(config)
    observed_path = out or config.output_observed
    write_signal(config.output_ground_truth, u_gt)
    write_signal(observed_path, s)
    return config.output_ground_truth, observed_path


def cmd_denoise(config: ExperimentConfig, out=None):
    """Denoise the observation file; write trace and final estimate."""
    s = read_signal(config.output_observed)
    if s.shape[0] != config.problem_m:
        raise DimensionMismatchError(
            f"observed signal has {s.shape[0]} samples, config says {config.problem_m}"
        )
    ground_truth = None
    try:
        u_gt = read_signal(config.output_ground_truth)
    except OSError:
        u_gt = None
    if u_gt is not None:
        if u_gt.shape[0] != config.problem_m:
            raise DimensionMismatchError("ground-truth length does not match config")
        ground_truth = GroundTruth(u_gt, config.problem_noise_sigma, config.problem_seed)
    problem = _make_problem(config, s)
    u, trace = _run_variant(
        config, problem, ground_truth, config.solver_method, config.solver_metric
    )
    trace_path = out or config.output_trace
    _write_trace(trace_path, trace)
    write_signal(config.output_estimate, u)
    return trace_path, config.output_estimate


def cmd_compare(config: ExperimentConfig, out=None):
    """Run the six method/metric variants on identical data; one file."""
    u_gt, s = _make_data(config)
    ground_truth = GroundTruth(u_gt, config.problem_noise_sigma, config.problem_seed)
    problem = _make_problem(config, s)
    path = out or config.output_trace
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("variant,t,error,z_change,seconds\n")
        for method, metric_name in VARIANTS:
            _, trace = _run_variant(config, problem, ground_truth, method, metric_name)
            handle.write(_trace_rows(trace, prefix=f"{method}-{metric_name},"))
    return path


def cmd_rates(config: ExperimentConfig, out=None):
    """Write sigma pairs, contraction factors and measured short-run ratios."""
    _, s = _make_data(config)
    problem = _make_problem(config, s)
    g1, g2 = dual_oracles(problem)
    hessian = problem.phi.gram().add_scaled_identity(1.0 / (problem.mu * problem.theta))
    path = out or config.output_report
    short = min(config.solver_iterations, 40)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            "variant,sigma_lb_1,sigma_ub_1,sigma_lb_2,sigma_ub_2,"
            "eta_1,eta_2,predicted_factor,measured_contraction,hessian_ratio\n"
        )
        for method, metric_name in VARIANTS:
            metric = build_psi(problem, metric_name, kappa=config.solver_kappa)
            sigma1 = estimate_sigma(g1, metric)
            sigma2 = estimate_sigma(g2, metric)
            model = RateModel.from_sigma(sigma1, sigma2, alpha=config.solver_alpha)
            predicted = model.contraction_factor("pr" if method == "bpr" else "dr")
            lo, hi = extreme_generalized_eigenvalues(hessian, metric.psi)
            _, trace = _run_variant(_with_iterations(config, short), problem, None, method, metric_name)
            measured = _max_contraction(trace.z_changes)
            row = (
                f"{method}-{metric_name},"
                f"{sigma1.sigma_lb:.17g},{sigma1.sigma_ub:.17g},"
                f"{sigma2.sigma_lb:.17g},{sigma2.sigma_ub:.17g},"
                f"{model.eta1:.17g},{model.eta2:.17g},"
                f"{predicted:.17g},{measured:.17g},{hi / lo:.17g}"
            )
            handle.write(row + "\n")
    return path


def _with_iterations(config: ExperimentConfig, iterations: int) -> ExperimentConfig:
    return replace(config, solver_iterations=iterations)


def _max_contraction(z_changes):
    ratios = []
    for prev, cur in zip(z_changes[1:-1], z_changes[2:]):
        if prev > 1e-300:
            ratios.append(cur / prev)
    return max(ratios) if ratios else 0.0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bregsplit",
        description="splitting-based 1-D total-variation denoising experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("generate", "write source and observation files"),
        ("denoise", "run one solver/metric combination"),
        ("compare", "run all six variants on identical data"),
        ("rates", "write rate predictions and measured contractions"),
    ]:
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", help="configuration file (defaults when omitted)")
        p.add_argument("--out", help="override the primary output path")
        p.add_argument("--seed", type=int, help="override problem.seed")
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            config = replace(config, problem_seed=args.seed)
        _validate(config)
        command = {
            "generate": cmd_generate,
            "denoise": cmd_denoise,
            "compare": cmd_compare,
            "rates": cmd_rates,
        }[args.command]
        written = command(config, out=args.out)
        if isinstance(written, tuple):
            print(" ".join(str(p) for p in written))
        else:
            print(written)
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 3
    except (BregsplitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
