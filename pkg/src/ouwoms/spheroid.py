"""Brownian exit from a spheroid (heat ball).

A spheroid of size ``d > 0`` is the time-dependent domain bounded by

    psi_pm(t) = +- sqrt(t * log(d^2 / t)),   t in [0, d^2],

and the first time tau at which a Brownian path leaves it has an exact
sampler: tau is distributed as d^2 * U^2 * exp(-N^2) with U uniform on
(0, 1) and N standard gaussian, independent.  Conditionally on tau the
exit location sits on the upper or lower boundary with probability 1/2
each.  This module provides the boundary, the exit-time density and CDF,
and the exact sampler; everything else in the package is built on top of
these four operations.
"""

from __future__ import annotations

import math
from enum import IntEnum
from typing import NamedTuple

import numpy as np
from scipy.special import erf

from .rng import Stream

#: relative slack accepted past t = d^2 so that round-tripped samples
#: evaluate cleanly at the right endpoint
RIGHT_ENDPOINT_SLACK = 1e-12

#: radicands above this (tiny, negative) threshold are rounding noise
#: near t = d^2 and clamp to zero
_RADICAND_FLOOR = -1e-14

#: E[tau] / d^2 = E[U^2] * E[exp(-N^2)] = (1/3) * (1/sqrt(3))
MEAN_EXIT_FRACTION = 1.0 / (3.0 * math.sqrt(3.0))


class Side(IntEnum):
    """Which boundary of the spheroid the path exits through."""

    PLUS = 1
    MINUS = -1


class SpheroidExit(NamedTuple):
    """Exit pair of one spheroid: internal Brownian time and boundary side.

    ``tau`` lies in (0, d^2] for the generating size d.
    """

    tau: float
    side: Side


def _check_d(d: float) -> float:
    d = float(d)
    if not d > 0.0:
        raise ValueError("d: d > 0")
    return d


def _log_ratio(d: float, t):
    # log(d^2 / t) evaluated as 2 log d - log t; robust for extreme d.
    return 2.0 * np.log(d) - np.log(t)


def psi(d: float, t, side: Side = Side.PLUS):
    """Spheroid boundary psi_side(t) = side * sqrt(t * log(d^2 / t)).

    Accepts scalar or array ``t`` in [0, d^2] (right endpoint up to
    rounding slack).  The boundary vanishes at both endpoints and is
    bounded by d / sqrt(e) in absolute value.
    """
    d = _check_d(d)
    t_arr = np.asarray(t, dtype=float)
    d2 = d * d
    hi = d2 * (1.0 + RIGHT_ENDPOINT_SLACK)
    if np.any(t_arr < 0.0) or np.any(t_arr > hi):
        raise ValueError("t: 0 <= t <= d^2")
    interior = (t_arr > 0.0) & (t_arr < d2)
    rad = np.where(interior,
                   t_arr * _log_ratio(d, np.where(interior, t_arr, 1.0)), 0.0)
    if np.any(rad < _RADICAND_FLOOR):
        raise ValueError("t: 0 <= t <= d^2")
    out = float(side) * np.sqrt(np.maximum(rad, 0.0))
    return out if out.ndim else float(out)


def spheroid_density(d: float, t):
    """Exit-time density p(t) = sqrt(log(d^2/t) / t) / (d sqrt(2 pi)).

    Defined on (0, d^2]; vanishes at the right endpoint and integrates
    to one.  Scales as p_d(t) = p_1(t / d^2) / d^2.
    """
    d = _check_d(d)
    t_arr = np.asarray(t, dtype=float)
    d2 = d * d
    hi = d2 * (1.0 + RIGHT_ENDPOINT_SLACK)
    if np.any(t_arr <= 0.0) or np.any(t_arr > hi):
        raise ValueError("t: 0 < t <= d^2")
    ratio = np.maximum(_log_ratio(d, t_arr), 0.0)
    out = np.sqrt(ratio / t_arr) / (d * math.sqrt(2.0 * math.pi))
    return out if out.ndim else float(out)


def _chi2_3_cdf(x):
    # Closed-form chi-square(3) CDF: F(x) = erf(sqrt(x/2)) - sqrt(2x/pi) e^{-x/2}.
    x = np.maximum(x, 0.0)
    return erf(np.sqrt(0.5 * x)) - np.sqrt(2.0 * x / math.pi) * np.exp(-0.5 * x)


def spheroid_cdf(d: float, t):
    """P(tau <= t), total on the reals.

    Since -log(tau / d^2) = -2 log U + N^2 is chi-square with three
    degrees of freedom, P(tau <= t) = P(chi2_3 >= log(d^2 / t)) for
    t in (0, d^2]; 0 below the support and 1 above it.
    """
    d = _check_d(d)
    t_arr = np.asarray(t, dtype=float)
    d2 = d * d
    interior = (t_arr > 0.0) & (t_arr < d2)
    safe = np.where(interior, t_arr, d2)
    out = np.where(interior, 1.0 - _chi2_3_cdf(_log_ratio(d, safe)), 0.0)
    out = np.where(t_arr >= d2, 1.0, out)
    return out if out.ndim else float(out)


def sample_spheroid_exit(d: float, rng: Stream) -> SpheroidExit:
    """Draw one exit pair (tau, side) exactly.

    Consumes exactly three stream values, in fixed order: one uniform U,
    one gaussian N, one coin.  tau = d^2 U^2 exp(-N^2); a coin bit of 1
    selects the lower boundary (Side.MINUS).
    """
    d = _check_d(d)
    u = rng.uniform()
    g = rng.normal()
    side = Side.MINUS if rng.bit() else Side.PLUS
    tau = d * d * u * u * math.exp(-g * g)
    return SpheroidExit(tau=tau, side=side)


def mean_exit_time(d: float) -> float:
    """E[tau] = d^2 / (3 sqrt 3)."""
    d = _check_d(d)
    return d * d * MEAN_EXIT_FRACTION
