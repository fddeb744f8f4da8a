"""Ornstein-Uhlenbeck parameterization and the spheroid mapping.

The process dX = -theta (X - mu) dt + sigma dW started inside [a, b] can
be written, after centering by mu, as a deterministic transform of a
Brownian motion run on the internal clock s = exp(2 theta t) - 1.  Under
that transform a Brownian spheroid of size d becomes a "moving" domain
with boundaries

    psi_ou_pm(t, x) = exp(-theta t) * (sigma / sqrt(2 theta) * psi_pm(e^{2 theta t} - 1) + x)

whose exit time is log(1 + tau) / (2 theta) when tau is the Brownian
spheroid exit time.  This module owns the parameter containers, the
centering reduction, the maximal admissible spheroid size at a point
(so the moving domain stays inside the interval), and the time map and
state update used by the walk engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .spheroid import Side, SpheroidExit, psi


class GeometryError(ValueError):
    """The spheroid construction was attempted outside its domain.

    Raised instead of clamping: the walk's stopping rule keeps states
    strictly inside the shrunk interval, so reaching this indicates a
    logic error in the caller.
    """


@dataclass(frozen=True)
class OUParams:
    """Mean-reversion rate theta (1/time), noise amplitude sigma
    (position/sqrt(time)) and mean level mu (position).

    Both theta and sigma must be strictly positive; theta = 0 (plain
    Brownian motion) is rejected.
    """

    theta: float
    sigma: float
    mu: float = 0.0

    def __post_init__(self):
        if not self.theta > 0.0:
            raise ValueError("theta: theta > 0")
        if not self.sigma > 0.0:
            raise ValueError("sigma: sigma > 0")


@dataclass(frozen=True)
class ExitProblem:
    """An exit-time run: process parameters, interval [a, b], start x0,
    stopping tolerance eps and shrink factor gamma_shrink.

    The walk stops once the state enters [a, a+eps] or [b-eps, b]; a
    start outside the open band yields an immediate exit.  gamma_shrink
    pulls the working interval slightly toward the current state so the
    inscribed moving spheroid provably fits.
    """

    params: OUParams
    a: float
    b: float
    x0: float
    eps: float
    gamma_shrink: float = 1e-6

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("a: a < b")
        if not self.eps > 0.0:
            raise ValueError("eps: eps > 0")
        if not self.eps < 0.5 * (self.b - self.a):
            raise ValueError("eps: eps < (b - a) / 2")
        if not 0.0 <= self.gamma_shrink < 1.0:
            raise ValueError("gamma_shrink: 0 <= gamma_shrink < 1")


@dataclass(frozen=True)
class SpheroidGeometry:
    """Spheroid size d at a point, the shrunk interval it is inscribed
    in, and the OU-time horizon t_max_ou = log(1 + d^2) / (2 theta) of
    the moving boundaries."""

    d: float
    a_gx: float
    b_gx: float
    t_max_ou: float


def reduce_mu(problem: ExitProblem) -> ExitProblem:
    """Centered equivalent of ``problem``: shift state and interval by -mu.

    The shifted process Y = X - mu is a centered OU process with the same
    theta and sigma, so the exit-time law from the shifted interval is
    identical to the original.  A problem with mu = 0 is returned as is.
    """
    mu = problem.params.mu
    if mu == 0.0:
        return problem
    return replace(
        problem,
        params=OUParams(problem.params.theta, problem.params.sigma, 0.0),
        a=problem.a - mu,
        b=problem.b - mu,
        x0=problem.x0 - mu,
    )


def shrunk_interval(x: float, problem: ExitProblem) -> tuple[float, float]:
    """(a_gx, b_gx) = (a + gamma (x - a), b - gamma (b - x)) for x in [a, b]."""
    if not problem.a <= x <= problem.b:
        raise ValueError("x: a <= x <= b")
    g = problem.gamma_shrink
    return problem.a + g * (x - problem.a), problem.b - g * (problem.b - x)


def _require_centered(problem: ExitProblem) -> None:
    if problem.params.mu != 0.0:
        raise ValueError("mu: problem must be mu-centered (apply reduce_mu first)")


def compute_d(x: float, problem: ExitProblem) -> SpheroidGeometry:
    """Maximal admissible spheroid size at x for a mu-centered problem.

    For x > 0 the size is sqrt(2 theta e) times the smaller of
    (b_gx - x)/sigma and 2 (x - a_gx) / (sqrt(sigma^2 + 4 theta e x (x - a_gx)) + sigma);
    the x < 0 case is the mirror image, and near zero (relative to the
    interval scale) the common limit applies.  The moving spheroid of
    this size stays inside [a_gx, b_gx] for all times up to t_max_ou.
    """
    _require_centered(problem)
    theta, sigma = problem.params.theta, problem.params.sigma
    a_gx, b_gx = shrunk_interval(x, problem)
    if not a_gx < x < b_gx:
        raise GeometryError(
            f"x: x must lie strictly inside the shrunk interval "
            f"({a_gx!r}, {b_gx!r}), got {x!r}")
    zero_tol = 1e-12 * max(abs(problem.a), abs(problem.b), 1.0)
    rt2te = math.sqrt(2.0 * theta * math.e)
    d = float(_kernels._spheroid_size(x, a_gx, b_gx, sigma, zero_tol, rt2te))
    if not d > 0.0:
        raise GeometryError(f"d: spheroid size must be positive, got {d!r}")
    return SpheroidGeometry(d=d, a_gx=a_gx, b_gx=b_gx,
                            t_max_ou=math.log1p(d * d) / (2.0 * theta))


def time_map(tau, theta: float):
    """OU exit time log(1 + tau) / (2 theta) of a Brownian internal time tau.

    Strictly increasing, zero at zero; log1p keeps small tau accurate.
    """
    if not theta > 0.0:
        raise ValueError("theta: theta > 0")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0.0):
        raise ValueError("tau: tau >= 0")
    out = np.log1p(tau_arr) / (2.0 * theta)
    return out if out.ndim else float(out)


def psi_ou(t, x: float, geom: SpheroidGeometry, side: Side, params: OUParams):
    """Moving-spheroid boundary at OU time t in [0, t_max_ou].

    Equals x at t = 0 and x / sqrt(1 + d^2) for both sides at t_max_ou.
    """
    theta, sigma = params.theta, params.sigma
    t_arr = np.asarray(t, dtype=float)
    hi = geom.t_max_ou * (1.0 + 1e-12)
    if np.any(t_arr < 0.0) or np.any(t_arr > hi):
        raise ValueError("t: 0 <= t <= t_max_ou")
    s = np.expm1(2.0 * theta * t_arr)
    out = np.exp(-theta * t_arr) * (
        sigma / math.sqrt(2.0 * theta) * psi(geom.d, s, side) + x)
    return out if out.ndim else float(out)


def next_state(x: float, exit: SpheroidExit, geom: SpheroidGeometry,
               params: OUParams) -> tuple[float, float]:
    """Map one spheroid exit to (tau_ou, x_next).

    x_next is evaluated directly from the Brownian exit time:
    exp(-theta tau_ou) = 1 / sqrt(1 + tau), so
    x_next = (sigma / sqrt(2 theta) * psi_side(tau) + x) / sqrt(1 + tau),
    which lands inside [a_gx, b_gx].
    """
    theta, sigma = params.theta, params.sigma
    tau = exit.tau
    tau_ou = time_map(tau, theta)
    boundary = psi(geom.d, tau, exit.side)
    x_next = (sigma / math.sqrt(2.0 * theta) * boundary + x) / math.sqrt(1.0 + tau)
    return tau_ou, x_next
