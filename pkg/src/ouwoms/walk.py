"""The walk-on-moving-spheres engine.

Starting from (0, x0), each step inscribes the largest admissible moving
spheroid at the current state, draws its exact exit pair, converts it to
OU time, and accumulates.  The walk stops as soon as the state enters an
eps-band next to either interval endpoint; the accumulated time is the
approximated exit time.

Determinism contract: a walk is a pure function of (problem, stream), and
replicate i of a batch uses the stream keyed by derive_key(master_seed, i).
Batches therefore produce identical output at any parallelism level, and
run_batch(problem, 1, seed) reproduces run_walk with the derived stream
bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import _kernels
from .ou import ExitProblem, _require_centered
from .rng import Stream, derive_keys

DEFAULT_MAX_STEPS = 10_000_000


class Boundary(Enum):
    """Which end of the interval the walk (or a path) left through."""

    LOWER = "lower"
    UPPER = "upper"


class StepLimitExceeded(RuntimeError):
    """A walk was still strictly inside the interval after max_steps.

    The expected step count grows only like |log eps|, so hitting the
    limit signals a configuration pathology rather than bad luck.
    """

    def __init__(self, message: str, replicate: int = 0):
        super().__init__(message)
        self.replicate = replicate


class WalkStep(NamedTuple):
    """One node of the walk skeleton: step index, cumulative OU time,
    position."""

    n: int
    t: float
    x: float


class ExitOutcome(NamedTuple):
    """Result of one run: approximated exit time, stopped position, the
    boundary side it stopped at, the number of spheroid steps, and the
    full skeleton when tracing was requested."""

    t_eps: float
    x_final: float
    side: Boundary
    n_steps: int
    trace: tuple[WalkStep, ...] | None = None


class BatchResult(NamedTuple):
    """Columnar batch output, ordered by replicate index.

    ``side`` holds 0 for lower and 1 for upper exits.  ``outcomes()``
    materializes the per-replicate record view.
    """

    t_eps: np.ndarray
    x_final: np.ndarray
    side: np.ndarray
    n_steps: np.ndarray

    def outcomes(self) -> list[ExitOutcome]:
        return list(map(ExitOutcome,
                        self.t_eps.tolist(), self.x_final.tolist(),
                        map(_SIDES.__getitem__, self.side.tolist()),
                        self.n_steps.tolist()))

    def lower_fraction(self) -> float:
        return float(np.mean(self.side == _kernels.SIDE_LOWER))


_SIDES = (Boundary.LOWER, Boundary.UPPER)


def _raise_status(status: int, replicate: int, max_steps: int):
    if status == _kernels.HIT_STEP_LIMIT:
        raise StepLimitExceeded(
            f"replicate {replicate}: still inside the interval after "
            f"max_steps={max_steps}", replicate=replicate)
    if status == _kernels.BAD_GEOMETRY:
        from .ou import GeometryError
        raise GeometryError(
            f"replicate {replicate}: walk state left the admissible region")


def run_walk(problem: ExitProblem, rng: Stream, *,
             max_steps: int = DEFAULT_MAX_STEPS,
             keep_trace: bool = False) -> ExitOutcome:
    """Run one walk to its eps-stopping time.

    The problem must be mu-centered (see reduce_mu).  Consumes three
    stream values per step and advances ``rng`` accordingly.  With
    keep_trace the outcome carries every (n, T_n, X_n) node, including
    the start.
    """
    _require_centered(problem)
    p = problem.params
    empty = np.empty(0, dtype=np.float64)
    key = np.uint64(rng.key)
    counter0 = np.uint64(rng.counter)
    args = (p.theta, p.sigma, problem.a, problem.b, problem.x0,
            problem.eps, problem.gamma_shrink, key, counter0, max_steps)
    t, x, side, steps, status = _kernels.walk_one(*args, empty, empty, False)
    _raise_status(status, 0, max_steps)
    trace = None
    if keep_trace:
        trace_t = np.empty(steps + 1, dtype=np.float64)
        trace_x = np.empty(steps + 1, dtype=np.float64)
        _kernels.walk_one(*args, trace_t, trace_x, True)
        trace = tuple(WalkStep(n, float(trace_t[n]), float(trace_x[n]))
                      for n in range(steps + 1))
    rng.skip(3 * steps)
    return ExitOutcome(t_eps=float(t), x_final=float(x), side=_SIDES[side],
                       n_steps=int(steps), trace=trace)


def _shards(n: int, parallelism: int) -> list[tuple[int, int]]:
    width = -(-n // parallelism)
    return [(lo, min(lo + width, n)) for lo in range(0, n, width)]


def _batch_arrays(kernel, args, keys, parallelism: int):
    n = keys.shape[0]
    t = np.empty(n, dtype=np.float64)
    x = np.empty(n, dtype=np.float64)
    side = np.empty(n, dtype=np.int64)
    steps = np.empty(n, dtype=np.int64)
    status = np.empty(n, dtype=np.int64)

    def run(lo, hi):
        kernel(*args, keys[lo:hi],
               t[lo:hi], x[lo:hi], side[lo:hi], steps[lo:hi], status[lo:hi])

    parallelism = max(1, min(parallelism, n))
    if parallelism == 1:
        run(0, n)
    else:
        # kernels release the GIL, so threads give real parallelism while
        # replicate outputs stay independent of the sharding
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            list(pool.map(lambda span: run(*span), _shards(n, parallelism)))
    return t, x, side, steps, status


def run_batch_arrays(problem: ExitProblem, n_samples: int, master_seed: int, *,
                     parallelism: int = 1,
                     max_steps: int = DEFAULT_MAX_STEPS) -> BatchResult:
    """Run ``n_samples`` independent walks, columnar output.

    Replicate i draws from the stream keyed by derive_key(master_seed, i);
    the output is identical for every parallelism level.
    """
    _require_centered(problem)
    if n_samples < 1:
        raise ValueError("n_samples: n_samples >= 1")
    p = problem.params
    keys = derive_keys(master_seed, n_samples)
    args = (p.theta, p.sigma, problem.a, problem.b, problem.x0,
            problem.eps, problem.gamma_shrink)
    t, x, side, steps, status = _batch_arrays(
        _kernels.walk_many, args + (max_steps,), keys, parallelism)
    bad = np.nonzero(status)[0]
    if bad.size:
        _raise_status(int(status[bad[0]]), int(bad[0]), max_steps)
    return BatchResult(t_eps=t, x_final=x, side=side, n_steps=steps)


def run_batch(problem: ExitProblem, n_samples: int, master_seed: int, *,
              parallelism: int = 1,
              max_steps: int = DEFAULT_MAX_STEPS) -> list[ExitOutcome]:
    """Record view of run_batch_arrays, ordered by replicate index."""
    return run_batch_arrays(problem, n_samples, master_seed,
                            parallelism=parallelism,
                            max_steps=max_steps).outcomes()


def walk_stream(master_seed: int, replicate: int = 0) -> Stream:
    """The stream replicate ``replicate`` of a batch would use."""
    return Stream.from_seed(master_seed, replicate)
