"""Compiled inner loops for the walk and Euler engines.

Scalar per-replicate kernels: replicate i's output depends only on its own
stream key, never on how replicates are grouped into batches or threads.
The public wrappers in walk.py / euler.py are thin views over these; the
uint64 stream arithmetic here mirrors ouwoms.rng exactly (cross-checked in
the test suite).
"""

import math

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U1 = np.uint64(1)
_TWO_NEG52 = 2.0 ** -52

SIDE_LOWER = 0
SIDE_UPPER = 1

OK = 0
HIT_STEP_LIMIT = 1
BAD_GEOMETRY = 2


@njit(**_JIT)
def _raw(key, j):
    z = key + (j + _U1) * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(**_JIT)
def _uniform(r):
    return (float(r >> np.uint64(12)) + 0.5) * _TWO_NEG52


@njit(**_JIT)
def _ndtri(p):
    # Wichura AS 241 (PPND16); same coefficients as ouwoms.rng.ndtri.
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    return -val if q < 0.0 else val


@njit(**_JIT)
def _d_core(x, a_gx, b_gx, sigma, rt2te):
    # Largest admissible spheroid size for a walker at x > 0 inside the
    # shrunk interval; rt2te = sqrt(2 theta e).  The second candidate is
    # the rationalized positive root of
    # x d^2/2 + sigma d / sqrt(2 theta e) + (a_gx - x) = 0, regular at x=0.
    te4 = 2.0 * rt2te * rt2te
    du = (b_gx - x) / sigma
    dl = 2.0 * (x - a_gx) / (math.sqrt(sigma * sigma + te4 * x * (x - a_gx)) + sigma)
    return rt2te * min(du, dl)


@njit(**_JIT)
def _spheroid_size(x, a_gx, b_gx, sigma, zero_tol, rt2te):
    # Sign branches are exact mirrors, so d(x, [a,b]) == d(-x, [-b,-a]).
    if x > zero_tol:
        return _d_core(x, a_gx, b_gx, sigma, rt2te)
    if x < -zero_tol:
        return _d_core(-x, -b_gx, -a_gx, sigma, rt2te)
    return rt2te / sigma * min(b_gx - x, x - a_gx)


@njit(**_JIT)
def walk_one(theta, sigma, a, b, x0, eps, gamma, key, counter0,
             max_steps, trace_t, trace_x, record):
    """One walk: repeated spheroid exits until x enters an eps-band.

    Stream layout: step n consumes values 3n (uniform), 3n+1 (gaussian)
    and 3n+2 (coin; top bit 1 picks the lower boundary).
    Returns (t_eps, x_final, side, n_steps, status).
    """
    lo = a + eps
    hi = b - eps
    zero_tol = 1e-12 * max(max(abs(a), abs(b)), 1.0)
    sig_scale = sigma / math.sqrt(2.0 * theta)
    two_theta = 2.0 * theta
    rt2te = math.sqrt(2.0 * theta * math.e)

    x = x0
    t = 0.0
    steps = 0
    c = counter0
    if record:
        trace_t[0] = 0.0
        trace_x[0] = x0
    while lo < x < hi:
        if steps >= max_steps:
            return t, x, SIDE_LOWER, steps, HIT_STEP_LIMIT
        a_gx = a + gamma * (x - a)
        b_gx = b - gamma * (b - x)
        d = _spheroid_size(x, a_gx, b_gx, sigma, zero_tol, rt2te)
        if not (d > 0.0) or not (a_gx < x < b_gx):
            return t, x, SIDE_LOWER, steps, BAD_GEOMETRY

        u = _uniform(_raw(key, c))
        g = _ndtri(_uniform(_raw(key, c + _U1)))
        coin = _raw(key, c + np.uint64(2)) >> np.uint64(63)
        c += np.uint64(3)

        # tau = d^2 u^2 e^{-g^2}, so log(d^2/tau) = g^2 - 2 log u > 0
        tau = d * d * u * u * math.exp(-g * g)
        psi = math.sqrt(tau * (g * g - 2.0 * math.log(u)))
        if coin == _U1:
            psi = -psi
        x = (sig_scale * psi + x) / math.sqrt(1.0 + tau)
        t += math.log1p(tau) / two_theta
        steps += 1
        if record:
            trace_t[steps] = t
            trace_x[steps] = x

    side = SIDE_UPPER if x >= hi else SIDE_LOWER
    return t, x, side, steps, OK


@njit(**_JIT)
def walk_many(theta, sigma, a, b, x0, eps, gamma, max_steps, keys,
              t_out, x_out, side_out, steps_out, status_out):
    empty = np.empty(0, np.float64)
    for i in range(keys.shape[0]):
        t, x, side, steps, status = walk_one(
            theta, sigma, a, b, x0, eps, gamma, keys[i], np.uint64(0),
            max_steps, empty, empty, False)
        t_out[i] = t
        x_out[i] = x
        side_out[i] = side
        steps_out[i] = steps
        status_out[i] = status


@njit(**_JIT)
def euler_one(theta, sigma, mu, a, b, x0, h, key, counter0, bridge, max_steps):
    """Euler-Maruyama path until it leaves (a, b), with optional per-step
    Brownian-bridge crossing draws.

    Stream layout: step k reserves values 2k (gaussian) and 2k+1 (bridge
    uniform); the bridge slot is skipped, not shifted, when unused, so
    bridge on/off share the same gaussian increments.
    Returns (t_exit, x_final, side, n_steps, status).
    """
    if x0 <= a:
        return 0.0, x0, SIDE_LOWER, 0, OK
    if x0 >= b:
        return 0.0, x0, SIDE_UPPER, 0, OK
    sqh = sigma * math.sqrt(h)
    inv = 1.0 / (sigma * sigma * h)
    x = x0
    c = counter0
    two = np.uint64(2)
    for k in range(max_steps):
        g = _ndtri(_uniform(_raw(key, c)))
        x1 = x - theta * (x - mu) * h + sqh * g
        t = (k + 1) * h
        if x1 <= a:
            return t, x1, SIDE_LOWER, k + 1, OK
        if x1 >= b:
            return t, x1, SIDE_UPPER, k + 1, OK
        if bridge:
            pu = math.exp(-2.0 * (b - x) * (b - x1) * inv)
            pl = math.exp(-2.0 * (x - a) * (x1 - a) * inv)
            u = _uniform(_raw(key, c + _U1))
            if u < pu:
                return t, b, SIDE_UPPER, k + 1, OK
            if u < pu + pl:
                return t, a, SIDE_LOWER, k + 1, OK
        c += two
        x = x1
    return max_steps * h, x, SIDE_LOWER, max_steps, HIT_STEP_LIMIT


@njit(**_JIT)
def euler_many(theta, sigma, mu, a, b, x0, h, bridge, max_steps, keys,
               t_out, x_out, side_out, steps_out, status_out):
    for i in range(keys.shape[0]):
        t, x, side, steps, status = euler_one(
            theta, sigma, mu, a, b, x0, h, keys[i], np.uint64(0),
            bridge, max_steps)
        t_out[i] = t
        x_out[i] = x
        side_out[i] = side
        steps_out[i] = steps
        status_out[i] = status
