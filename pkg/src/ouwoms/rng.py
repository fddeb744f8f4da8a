"""Deterministic, counter-addressable random streams.

Every replicate of a Monte Carlo batch owns an independent stream keyed by a
64-bit value derived from ``(master_seed, replicate_index)``.  A stream is a
pure function of ``(key, counter)``: value ``j`` is the splitmix64 finalizer
applied to ``key + (j+1)*GOLDEN`` (mod 2**64).  Because draws are addressed by
position rather than produced by mutable state, the same replicate consumes
the same randomness no matter how a batch is sharded across workers, which is
what makes batch output byte-reproducible at any parallelism level.

Draw layout conventions used elsewhere in the package:

* spheroid sampling consumes three consecutive values per exit
  (uniform, gaussian, coin), see :mod:`ouwoms.spheroid`;
* the Euler scheme reserves two value slots per time step
  (gaussian, bridge uniform), see :mod:`ouwoms.euler`.

The gaussian draw maps a uniform through the inverse normal CDF (Wichura's
PPND16 rational approximation, absolute error below 1e-15), so one gaussian
costs exactly one stream value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1

#: golden-ratio increment of the splitmix64 sequence
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer (Stafford mix13) on a 64-bit integer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def stream_value(key: int, index: int) -> int:
    """Raw 64-bit value at position ``index`` of the stream ``key``."""
    return mix64((key + (index + 1) * GOLDEN) & _MASK)


def derive_key(master_seed: int, index: int) -> int:
    """Per-replicate stream key.

    Double application of the finalizer decorrelates the key schedule from
    the in-stream value schedule, so replicate keys never collide with the
    values any stream emits for small counters.
    """
    if index < 0:
        raise ValueError("index: index >= 0")
    k = mix64((master_seed + (index + 1) * GOLDEN) & _MASK)
    return mix64((k + GOLDEN) & _MASK)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def derive_keys(master_seed: int, n: int) -> np.ndarray:
    """Keys of replicates 0..n-1, identical to derive_key element-wise."""
    if n < 0:
        raise ValueError("n: n >= 0")
    idx = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(master_seed & _MASK) + idx * np.uint64(GOLDEN)
        return _mix64_array(_mix64_array(z) + np.uint64(GOLDEN))


def uniform_from_bits(r: int) -> float:
    """Map a 64-bit value to the open interval (0, 1).

    Places the top 52 bits at cell midpoints, (k + 0.5) * 2**-52; every
    step is exact in double precision, so 0.0 and 1.0 are never produced.
    """
    return ((r >> 12) + 0.5) * 2.220446049250313e-16  # 2**-52


def ndtri(p: float) -> float:
    """Inverse standard normal CDF for p in (0, 1).

    Wichura's algorithm AS 241 (PPND16 variant), three rational
    approximations covering the central region and both tails.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("ndtri: p must lie strictly inside (0, 1)")
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


@dataclass
class Stream:
    """A positioned view into one deterministic stream.

    ``counter`` is the index of the next value to be consumed; drawing
    advances it.  Two Streams with the same ``(key, counter)`` produce
    identical draw sequences.
    """

    key: int
    counter: int = 0

    @classmethod
    def from_seed(cls, master_seed: int, index: int = 0) -> "Stream":
        """Stream for replicate ``index`` of a batch under ``master_seed``."""
        return cls(derive_key(master_seed, index))

    def raw(self) -> int:
        v = stream_value(self.key, self.counter)
        self.counter += 1
        return v

    def uniform(self) -> float:
        """One uniform draw on the open interval (0, 1)."""
        return uniform_from_bits(self.raw())

    def normal(self) -> float:
        """One standard gaussian draw (inverse-CDF of one uniform)."""
        return ndtri(uniform_from_bits(self.raw()))

    def bit(self) -> int:
        """One fair coin flip (top bit of one raw value)."""
        return self.raw() >> 63

    def skip(self, n: int) -> None:
        """Advance the counter without consuming values."""
        self.counter += n
