"""Statistical validation: ECDFs, Kolmogorov-Smirnov distances, the
exit-time CDF sandwich with its error bound, step-count scaling tables,
and the scale-function hitting probability used as an exit-side oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import logsumexp

from .ou import OUParams
from .walk import Boundary, ExitOutcome


class ECDF:
    """Empirical CDF of a sample: right-continuous step function
    F(t) = #(samples <= t) / n."""

    __slots__ = ("values",)

    def __init__(self, samples):
        values = np.sort(np.asarray(samples, dtype=float).ravel())
        if values.size == 0:
            raise ValueError("samples: nonempty sample required")
        self.values = values

    @property
    def n(self) -> int:
        return self.values.size

    def __call__(self, t):
        out = np.searchsorted(self.values, t, side="right") / self.n
        return out if np.ndim(out) else float(out)

    def left_limit(self, t):
        """F(t-) = #(samples < t) / n."""
        out = np.searchsorted(self.values, t, side="left") / self.n
        return out if np.ndim(out) else float(out)


def ecdf(samples) -> ECDF:
    """ECDF of a nonempty sample."""
    return ECDF(samples)


def ks_distance(f: ECDF | Callable, g: ECDF) -> float:
    """sup |f - g| over the jump points of g (both one-sided limits).

    Two ECDFs give the exact two-sample statistic (evaluated on the
    merged jump set); an analytic CDF against an ECDF gives the exact
    one-sample statistic.
    """
    if isinstance(f, ECDF):
        xs = np.concatenate([f.values, g.values])
        return float(np.max(np.abs(f(xs) - g(xs))))
    xs = g.values
    fx = np.asarray(f(xs), dtype=float)
    n = g.n
    steps_hi = np.arange(1, n + 1) / n
    steps_lo = np.arange(0, n) / n
    return float(max(np.max(fx - steps_lo), np.max(steps_hi - fx)))


def ks_critical(n: int, alpha: float = 0.001, m: int | None = None) -> float:
    """Asymptotic KS critical value c(alpha)/sqrt(n), or the two-sample
    version c(alpha) sqrt((n+m)/(nm)) when m is given.

    c(alpha) = sqrt(-log(alpha/2) / 2); c ~ 1.36 at alpha=0.05 and
    ~1.95 at alpha=0.001.
    """
    c = math.sqrt(-math.log(0.5 * alpha) / 2.0)
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def xi_bound(eps: float, gamma_exp: float, params: OUParams,
             interval: tuple[float, float]) -> float:
    """Error-bound factor of the exit-time CDF sandwich.

    Xi = sqrt(theta) (eps + max(|a|,|b|) (e^{theta delta} - 1))
         / (sigma sqrt((e^{2 theta delta} - 1) pi)),  delta = eps^gamma_exp.

    Vanishes as eps -> 0; for gamma_exp = 1 it behaves like
    (sqrt(eps) + max(|a|,|b|) theta sqrt(eps)) / (sigma sqrt(2 pi)).
    """
    if not eps > 0.0:
        raise ValueError("eps: eps > 0")
    if not 0.0 < gamma_exp < 2.0:
        raise ValueError("gamma_exp: 0 < gamma_exp < 2")
    a, b = interval
    if not a < b:
        raise ValueError("a: a < b")
    theta, sigma = params.theta, params.sigma
    delta = eps ** gamma_exp
    m = max(abs(a), abs(b))
    num = math.sqrt(theta) * (eps + m * math.expm1(theta * delta))
    den = sigma * math.sqrt(math.expm1(2.0 * theta * delta) * math.pi)
    return num / den


@dataclass(frozen=True, eq=False)
class SandwichReport:
    """Audit of (1 - rho Xi) F_eps(t - delta) <= F_ref(t) <= F_eps(t)
    on a grid, up to a statistical slack."""

    grid: np.ndarray
    lower_violations: int
    upper_violations: int
    max_violation_magnitude: float
    xi: float
    rho: float
    delta: float

    @property
    def ok(self) -> bool:
        return self.lower_violations == 0 and self.upper_violations == 0


def sandwich_check(f_ref: ECDF, f_eps: ECDF, *, eps: float, gamma_exp: float,
                   params: OUParams, interval: tuple[float, float],
                   rho: float = 1.1, grid=None,
                   tol: float | None = None) -> SandwichReport:
    """Audit the two-sided exit-time CDF bound at each grid point.

    f_ref estimates the true exit-time CDF (e.g. from the Euler
    reference), f_eps the walk outcome's CDF.  ``tol`` is the
    statistical slack allowed on each inequality; it defaults to the
    two-sample KS critical value at the 1% level.  Reporting only:
    violations are counted, never raised.
    """
    if not rho > 1.0:
        raise ValueError("rho: rho > 1")
    xi = xi_bound(eps, gamma_exp, params, interval)
    delta = eps ** gamma_exp
    if grid is None:
        grid = np.union1d(f_ref.values, f_eps.values)
    grid = np.asarray(grid, dtype=float)
    if tol is None:
        tol = ks_critical(f_ref.n, alpha=0.01, m=f_eps.n)

    ref = f_ref(grid)
    upper_excess = ref - f_eps(grid) - tol
    lower_excess = (1.0 - rho * xi) * f_eps(grid - delta) - ref - tol
    worst = max(float(np.max(upper_excess)), float(np.max(lower_excess)), 0.0)
    return SandwichReport(
        grid=grid,
        lower_violations=int(np.count_nonzero(lower_excess > 0.0)),
        upper_violations=int(np.count_nonzero(upper_excess > 0.0)),
        max_violation_magnitude=worst,
        xi=xi, rho=rho, delta=delta)


def _log_scale_integral(lo: float, hi: float, c: float) -> float:
    """log of int_lo^hi exp(c u^2) du for c > 0, lo < hi.

    The integrand can span thousands of e-folds, so the interval is cut
    where the exponent falls in fixed steps below its maximum; each piece
    is integrated adaptively under its own scale and the pieces are
    recombined with logsumexp.
    """
    drop = 60.0
    keep = 800.0  # pieces deeper than this below the peak cannot register
    umax2 = max(lo * lo, hi * hi)
    knots = {lo, hi}
    if lo < 0.0 < hi:
        knots.add(0.0)
    k = 1
    while k * drop <= keep + drop:
        level = umax2 - k * drop / c
        if level <= 0.0:
            break
        r = math.sqrt(level)
        if lo < r < hi:
            knots.add(r)
        if lo < -r < hi:
            knots.add(-r)
        k += 1
    xs = sorted(knots)
    top = c * umax2
    logs = []
    for u0, u1 in zip(xs, xs[1:]):
        s = c * max(u0 * u0, u1 * u1)
        if s < top - keep:
            continue
        val, _ = quad(lambda u: math.exp(c * u * u - s), u0, u1,
                      epsabs=0.0, epsrel=1e-11, limit=200)
        if val > 0.0:
            logs.append(s + math.log(val))
    if not logs:
        return -math.inf
    return float(logsumexp(logs))


def hit_prob_a_before_b(y: float, params: OUParams,
                        interval: tuple[float, float]) -> float:
    """Probability that a centered OU path from y reaches a before b.

    Scale-function identity: the probability equals
    int_y^b exp(theta u^2 / sigma^2) du / int_a^b exp(theta u^2 / sigma^2) du,
    evaluated by piecewise adaptive quadrature in log space so extreme
    theta / sigma^2 neither overflows nor loses the ratio.  Equals 1 at
    y = a, 0 at y = b, and decreases in y.
    """
    a, b = interval
    if not a < b:
        raise ValueError("a: a < b")
    if not a <= y <= b:
        raise ValueError("y: a <= y <= b")
    if y == b:
        return 0.0
    c = params.theta / (params.sigma * params.sigma)
    log_num = _log_scale_integral(y, b, c)
    log_den = _log_scale_integral(a, b, c)
    return min(math.exp(log_num - log_den), 1.0)


def lower_exit_fraction(outcomes: Sequence[ExitOutcome]) -> float:
    """Fraction of runs that stopped at the lower boundary."""
    if not outcomes:
        raise ValueError("outcomes: nonempty sequence required")
    return sum(o.side is Boundary.LOWER for o in outcomes) / len(outcomes)


@dataclass(frozen=True)
class StepScalingRow:
    """Mean step count of a sweep point, with its standard error and the
    ratio against |log eps| used for the linearity check."""

    eps: float
    n_runs: int
    mean_steps: float
    stderr_steps: float
    steps_per_abs_log_eps: float


def step_scaling_summary(
        runs: Mapping[float, Sequence[ExitOutcome]]) -> list[StepScalingRow]:
    """Per-eps summary of step counts, ordered by decreasing eps."""
    if not runs:
        raise ValueError("runs: nonempty mapping required")
    rows = []
    for eps in sorted(runs, reverse=True):
        outcomes = runs[eps]
        if not outcomes:
            raise ValueError(f"runs: empty outcome list at eps={eps!r}")
        steps = np.array([o.n_steps for o in outcomes], dtype=float)
        mean = float(steps.mean())
        stderr = float(steps.std(ddof=1) / math.sqrt(steps.size)) if steps.size > 1 else 0.0
        log_eps = abs(math.log(eps))
        ratio = mean / log_eps if log_eps > 0.0 else math.nan
        rows.append(StepScalingRow(eps=float(eps), n_runs=steps.size,
                                   mean_steps=mean, stderr_steps=stderr,
                                   steps_per_abs_log_eps=ratio))
    return rows
