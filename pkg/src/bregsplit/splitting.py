"""Splitting drivers: Peaceman-Rachford, Douglas-Rachford, forward-backward.

All three minimize ``G1 + G2`` through fixed-point iterations built from
the operators in :mod:`bregsplit.operators` under a shared quadratic
metric:

* Peaceman-Rachford iterates the composed reflection ``z <- C2 C1 z``,
  unrolled into the four steps ``w = R1 z``, ``x = 2w - z``,
  ``y = R2 x``, ``z <- 2y - x``.
* Douglas-Rachford averages it: ``z <- z + 2 alpha (y - w)``.
* Forward-backward iterates ``w <- R2 F1 w`` and needs a subgradient
  for ``G1``.

Solvers run a fixed number of iterations unless a positive stop
tolerance on the iterate change is configured.  The returned solution is
the last backward-step output ``w``, whose limit is the minimizer of the
sum.  A :class:`Trace` carries per-iteration diagnostics; iterate
snapshots are stored only on request to keep long large runs cheap.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaOutOfRangeError,
    DimensionMismatchError,
    EmptyRunError,
    MissingIteratesError,
    NoSubgradientError,
)
from .operators import d_forward, d_resolvent

__all__ = [
    "SolverConfig",
    "Trace",
    "attach_reference",
    "solve_peaceman_rachford",
    "solve_douglas_rachford",
    "solve_forward_backward",
]


@dataclass(frozen=True)
class SolverConfig:
    """Run controls shared by the three drivers.

    ``alpha`` is required by (and only read by) Douglas-Rachford.
    ``stop_tolerance`` of 0 disables early stopping, so traces match
    fixed-iteration runs exactly.
    """

    max_iterations: int
    alpha: float | None = None
    stop_tolerance: float = 0.0
    record_trace: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise EmptyRunError("max_iterations must be a positive integer")
        if self.stop_tolerance < 0.0:
            raise ValueError("stop_tolerance must be non-negative")


class Trace:
    """Per-iteration record of a solver run.

    ``steps`` holds the 1-based iteration indices actually executed (at
    most ``max_iterations``), ``changes[i]`` the norm of the iterate
    update at ``steps[i]``.  ``iterates`` holds snapshots when requested,
    and ``initial_point`` is always kept.  ``reference_distances`` is
    populated by :func:`attach_reference` and spans iterations
    ``0..len(steps)``.
    """

    def __init__(self, initial_point, record_iterates):
        self.initial_point = np.array(initial_point, dtype=float)
        self.steps: list[int] = []
        self.changes: list[float] = []
        self.seconds: list[float] = []
        self.iterates: list[np.ndarray] | None = [] if record_iterates else None
        self.reference_distances = None
        self._start = time.perf_counter()

    def __len__(self):
        return len(self.steps)

    def _append(self, step, change, point):
        self.steps.append(step)
        self.changes.append(change)
        self.seconds.append(time.perf_counter() - self._start)
        if self.iterates is not None:
            self.iterates.append(point.copy())


def attach_reference(trace: Trace, z_star) -> Trace:
    """Return a copy of ``trace`` with distances to ``z_star`` attached.

    The distances cover the initial point and every recorded iterate, so
    ``reference_distances[t]`` is the distance after ``t`` iterations.
    Requires the trace to have been recorded with iterate snapshots.
    """
    z_star = np.asarray(z_star, dtype=float)
    if z_star.shape != trace.initial_point.shape:
        raise DimensionMismatchError("reference point has the wrong dimension")
    if trace.iterates is None:
        raise MissingIteratesError("trace was recorded without iterate snapshots")
    out = Trace(trace.initial_point, record_iterates=True)
    out.steps = list(trace.steps)
    out.changes = list(trace.changes)
    out.seconds = list(trace.seconds)
    out.iterates = [z.copy() for z in trace.iterates]
    dists = [float(np.linalg.norm(trace.initial_point - z_star))]
    dists += [float(np.linalg.norm(z - z_star)) for z in trace.iterates]
    out.reference_distances = np.array(dists)
    return out


def _start_point(z0, metric):
    if z0 is None:
        return np.zeros(metric.dimension)
    z0 = np.asarray(z0, dtype=float)
    if z0.shape != (metric.dimension,):
        raise DimensionMismatchError(
            f"start point has shape {z0.shape}, expected ({metric.dimension},)"
        )
    return z0.copy()


def solve_peaceman_rachford(g1, g2, metric, z0, config: SolverConfig):
    """Run ``z <- C2 C1 z``; return the final ``w = R1 z`` and the trace."""
    z = _start_point(z0, metric)
    trace = Trace(z, config.record_trace)
    w = None
    for t in range(1, config.max_iterations + 1):
        w = d_resolvent(g1, metric, z)
        x = 2.0 * w - z
        y = d_resolvent(g2, metric, x)
        z_new = 2.0 * y - x
        change = float(np.linalg.norm(z_new - z))
        trace._append(t, change, z_new)
        z = z_new
        if config.stop_tolerance > 0.0 and change <= config.stop_tolerance:
            break
    return w, trace


def solve_douglas_rachford(g1, g2, metric, z0, config: SolverConfig):
    """Run the averaged reflection ``z <- z + 2 alpha (y - w)``."""
    if config.alpha is None or not 0.0 < config.alpha < 1.0:
        raise AlphaOutOfRangeError(f"alpha must lie in (0, 1), got {config.alpha}")
    alpha = config.alpha
    z = _start_point(z0, metric)
    trace = Trace(z, config.record_trace)
    w = None
    for t in range(1, config.max_iterations + 1):
        w = d_resolvent(g1, metric, z)
        x = 2.0 * w - z
        y = d_resolvent(g2, metric, x)
        z_new = z + 2.0 * alpha * (y - w)
        change = float(np.linalg.norm(z_new - z))
        trace._append(t, change, z_new)
        z = z_new
        if config.stop_tolerance > 0.0 and change <= config.stop_tolerance:
            break
    return w, trace


def solve_forward_backward(g1, g2, metric, w0, config: SolverConfig):
    """Run ``w <- R2 F1 w``; ``g1`` must expose a subgradient."""
    if g1.subgradient is None:
        raise NoSubgradientError("forward-backward needs a subgradient for g1")
    w = _start_point(w0, metric)
    trace = Trace(w, config.record_trace)
    for t in range(1, config.max_iterations + 1):
        x = d_forward(g1, metric, w)
        w_new = d_resolvent(g2, metric, x)
        change = float(np.linalg.norm(w_new - w))
        trace._append(t, change, w_new)
        w = w_new
        if config.stop_tolerance > 0.0 and change <= config.stop_tolerance:
            break
    return w, trace
