"""Exit times of Ornstein-Uhlenbeck processes by walk on moving spheres.

The package simulates the first exit time of
dX = -theta (X - mu) dt + sigma dW from an interval [a, b] with an exact
walk on moving spheroids, provides an Euler-Maruyama baseline with a
Brownian-bridge crossing correction, and ships the statistical machinery
(ECDFs, KS distances, the exit-CDF sandwich bound, step-count scaling,
scale-function hitting probabilities) used to validate both.
"""

from .analysis import (
    ECDF,
    SandwichReport,
    StepScalingRow,
    ecdf,
    hit_prob_a_before_b,
    ks_critical,
    ks_distance,
    lower_exit_fraction,
    sandwich_check,
    step_scaling_summary,
    xi_bound,
)
from .euler import bridge_exit_prob, euler_batch, euler_batch_arrays, euler_exit
from .ou import (
    ExitProblem,
    GeometryError,
    OUParams,
    SpheroidGeometry,
    compute_d,
    next_state,
    psi_ou,
    reduce_mu,
    shrunk_interval,
    time_map,
)
from .rng import Stream, derive_key
from .spheroid import (
    Side,
    SpheroidExit,
    mean_exit_time,
    psi,
    sample_spheroid_exit,
    spheroid_cdf,
    spheroid_density,
)
from .walk import (
    BatchResult,
    Boundary,
    ExitOutcome,
    StepLimitExceeded,
    WalkStep,
    run_batch,
    run_batch_arrays,
    run_walk,
    walk_stream,
)

__version__ = "0.1.0"

__all__ = [
    "BatchResult", "Boundary", "ECDF", "ExitOutcome", "ExitProblem",
    "GeometryError", "OUParams", "SandwichReport", "Side", "SpheroidExit",
    "SpheroidGeometry", "StepLimitExceeded", "StepScalingRow", "Stream",
    "WalkStep", "bridge_exit_prob", "compute_d", "derive_key", "ecdf",
    "euler_batch", "euler_batch_arrays", "euler_exit", "hit_prob_a_before_b",
    "ks_critical", "ks_distance", "lower_exit_fraction", "mean_exit_time",
    "next_state", "psi", "psi_ou", "reduce_mu", "run_batch",
    "run_batch_arrays", "run_walk", "sample_spheroid_exit", "sandwich_check",
    "shrunk_interval", "spheroid_cdf", "spheroid_density",
    "step_scaling_summary", "time_map", "walk_stream", "xi_bound",
]
