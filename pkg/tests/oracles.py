"""Independent reference computations shared by the tests.

The time-domain oracles below rebuild the asynchronous functionals from the
slotted ones.  An interferer that covers a fraction ``w`` of the reception
window acts like a slotted interferer with threshold ``theta * w``; averaging
over the interferer's start offset gives the unslotted functional.
"""

import math

import numpy as np

from fdaloha.analytic import _base
from fdaloha.slotted import omega_fd_slotted

GL_T, GL_W = np.polynomial.legendre.leggauss(40)


def ramp_average(f) -> float:
    """``int_0^1 f(v) dv`` for f behaving like a power of v near 0 (v = t^2 substitution)."""
    t = 0.5 * (GL_T + 1.0)
    return float(sum(0.5 * w * f(tt * tt) * 2.0 * tt for tt, w in zip(t, GL_W)))


def brute_overlap(t, own_len, other_len):
    """Fraction of ``[0, own_len]`` covered by ``[t, t + other_len]`` (plain interval algebra)."""
    t = np.asarray(t, dtype=float)
    return np.clip(np.minimum(own_len, t + other_len) - np.maximum(0.0, t), 0.0, None) / own_len


def omega_fd_time_domain(r, theta, alpha):
    # equal durations: triangular coverage profile
    return 2.0 * ramp_average(lambda v: omega_fd_slotted(r, theta * v, alpha).value)


def omega_fd_prime_time_domain(r, theta, alpha, gamma):
    """Full-duplex interferers of length gamma seen by a unit-length half-duplex reception."""
    f = lambda th: omega_fd_slotted(r, th, alpha).value if th > 0 else 0.0
    peak = min(gamma, 1.0)
    ramp = min(gamma, 1.0)
    plateau = abs(gamma - 1.0)
    return 2.0 * ramp * ramp_average(lambda v: f(theta * peak * v)) + plateau * f(theta * peak)


def omega_hd_prime_brute(r, theta, alpha, gamma, n=2_000_001):
    """Half-duplex interferers of unit length seen by a full-duplex reception of length gamma."""
    t = np.linspace(-1.0, gamma, n)
    w = brute_overlap(t, gamma, 1.0)
    integral = np.trapezoid(w ** (2.0 / alpha), t) if hasattr(np, "trapezoid") else np.trapz(w ** (2.0 / alpha), t)
    return _base(r, theta, alpha) * integral / gamma
