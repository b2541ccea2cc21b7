"""Success probabilities, throughput and optimal operating points for a network
where every packet, half- or full-duplex, lasts the same time ``D``.

Half-duplex interference enters the success exponent through the closed-form
functional ``omega_hd``; full-duplex interference through ``omega_fd``, a
double integral over the interferer's centre distance ``u`` and companion
angle ``phi``.  ``omega_fd / omega_hd`` depends only on ``(theta, alpha)`` and is
cached per pair.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .model import SystemParams, beta_coeff
from .quadrature import (
    QuadConfig,
    QuadResult,
    decay_power,
    integrate_finite,
    integrate_semi_infinite,
    log_ratio_kernel_complement,
    polar_gap_power,
)

DEFAULT_QUAD = QuadConfig()

Region = Literal["full", "intermediate", "half"]


@dataclass(frozen=True)
class OmegaSet:
    omega_hd: float
    omega_fd: float
    delta: float
    fd_error_estimate: float


@dataclass(frozen=True)
class OptimalQ:
    q_star: float
    d1: float
    d2: float
    region: Region


def gamma_product(alpha: float) -> float:
    """``Gamma(1 + 2/alpha) Gamma(1 - 2/alpha)``, equal to ``x pi / sin(x pi)`` at ``x = 2/alpha``."""
    return math.gamma(1.0 + 2.0 / alpha) * math.gamma(1.0 - 2.0 / alpha)


def _base(r: float, theta: float, alpha: float) -> float:
    # pi r^2 theta^(2/alpha) Gamma(1+2/a) Gamma(1-2/a): the slotted half-duplex functional.
    return math.pi * r * r * theta ** (2.0 / alpha) * gamma_product(alpha)


def omega_hd(r: float, theta: float, alpha: float) -> float:
    return _base(r, theta, alpha) * 2.0 * alpha / (alpha + 2.0)


def interference_functional(
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    r: float,
    alpha: float,
    cfg: QuadConfig = DEFAULT_QUAD,
    weight: float = 4.0,
) -> QuadResult:
    """Evaluate ``int_0^inf weight * u * int_0^pi integrand(u, phi) dphi du``.

    ``integrand`` is called with broadcastable arrays ``u[:, None]`` and
    ``phi[None, :]`` and must be nonnegative.  The radial range is split at
    ``u = r`` where the companion of an interferer can sit on the receiver and
    the inner integrand loses smoothness.  The returned error estimate adds the
    outer Kronrod estimates and the worst relative inner error times the value.
    """
    inner_cfg = cfg.tightened(10.0)
    worst_inner = [0.0]
    evals = [0]

    def radial(u):
        def angular(phi):
            return integrand(u[:, None], phi[None, :])

        res = integrate_finite(angular, 0.0, math.pi, inner_cfg)
        val = np.atleast_1d(res.value)
        err = np.atleast_1d(res.abs_error_estimate)
        rel = np.max(err / np.maximum(np.abs(val), inner_cfg.abs_tol))
        worst_inner[0] = max(worst_inner[0], float(rel))
        evals[0] += res.evaluations
        return weight * u * val

    with np.errstate(over="ignore", divide="ignore"):
        near = integrate_finite(radial, 0.0, r, cfg)
        far = integrate_semi_infinite(radial, cfg, lower=r, scale=r, power=decay_power(alpha))
    value = near.value + far.value
    err = near.abs_error_estimate + far.abs_error_estimate + worst_inner[0] * abs(value)
    return QuadResult(value, err, near.evaluations + far.evaluations + evals[0])


def _rx_gains(u, phi, r, alpha):
    """Path gains from an interferer's centre and companion to the receiver."""
    with np.errstate(divide="ignore", over="ignore"):
        x = u ** (-alpha)
    return x, polar_gap_power(u, phi, r, alpha)


def omega_fd(r: float, theta: float, alpha: float, cfg: QuadConfig = DEFAULT_QUAD) -> QuadResult:
    s = theta * r ** alpha

    def h(u, phi):
        x, y = _rx_gains(u, phi, r, alpha)
        return log_ratio_kernel_complement(x, y, s)

    return interference_functional(h, r, alpha, cfg)


def omega_fd_bounds(r: float, theta: float, alpha: float) -> tuple[float, float]:
    """Closed-form lower and upper bounds on ``omega_fd``.

    The lower bound is ``omega_hd``; the upper bound replaces the companion's
    contribution by its worst case and integrates in closed form.
    """
    return omega_hd(r, theta, alpha), 4.0 * _base(r, theta, alpha) * alpha


@functools.lru_cache(maxsize=512)
def _delta_cached(theta: float, alpha: float, cfg: QuadConfig) -> tuple[float, float]:
    res = omega_fd(1.0, theta, alpha, cfg)
    hd = omega_hd(1.0, theta, alpha)
    return res.value / hd, res.abs_error_estimate / hd


def delta(theta: float, alpha: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """``omega_fd / omega_hd``; independent of the link distance."""
    return _delta_cached(float(theta), float(alpha), cfg)[0]


def omega_set(params: SystemParams, cfg: QuadConfig = DEFAULT_QUAD) -> OmegaSet:
    d, d_err = _delta_cached(float(params.theta), float(params.alpha), cfg)
    hd = omega_hd(params.r, params.theta, params.alpha)
    return OmegaSet(omega_hd=hd, omega_fd=d * hd, delta=d, fd_error_estimate=d_err * hd)


def _mixed_omega(om: OmegaSet, q: float) -> float:
    return (1.0 - q) * om.omega_hd + q * om.omega_fd


def success_prob_hd(params: SystemParams, q: float, d: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    om = omega_set(params, cfg)
    return math.exp(-params.lambda_ * d * _mixed_omega(om, q))


def success_prob_fd(params: SystemParams, q: float, d: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    return beta_coeff(params) * success_prob_hd(params, q, d, cfg)


def throughput(params: SystemParams, q: float, d: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Throughput density ``W lambda D (1 + q(2 beta - 1)) p_hd``."""
    beta = beta_coeff(params)
    g = params.lambda_ * d
    return params.w * g * (1.0 + q * (2.0 * beta - 1.0)) * success_prob_hd(params, q, d, cfg)


def optimal_q(params: SystemParams, d: float, cfg: QuadConfig = DEFAULT_QUAD) -> OptimalQ:
    """Fraction of full-duplex clusters maximising throughput at duration ``d``.

    Stationary point of the throughput in ``q``:
    ``q* = 1/(lambda D dOmega) - 1/(2 beta - 1)``, clamped to ``[0, 1]``.
    It equals 1 at ``D1 = (2beta-1) / (2 beta lambda dOmega)`` and 0 at
    ``D2 = (2beta-1) / (lambda dOmega)``.  With ``beta <= 1/2`` full duplex never
    pays and ``q* = 0`` for every duration.
    """
    if not d > 0:
        raise ValueError(f"d must be positive, got {d}")
    beta = beta_coeff(params)
    a = 2.0 * beta - 1.0
    if a <= 0.0:
        return OptimalQ(0.0, 0.0, 0.0, "half")
    om = omega_set(params, cfg)
    gap = params.lambda_ * (om.omega_fd - om.omega_hd)
    d1 = a / (2.0 * beta * gap)
    d2 = a / gap
    if d <= d1:
        q = 1.0
    elif d >= d2:
        q = 0.0
    else:
        q = min(1.0, max(0.0, 1.0 / (d * gap) - 1.0 / a))
    region: Region = "full" if q >= 1.0 else ("half" if q <= 0.0 else "intermediate")
    return OptimalQ(q, d1, d2, region)


def optimal_duration(params: SystemParams, q: float, cfg: QuadConfig = DEFAULT_QUAD) -> tuple[float, float]:
    """Return ``(D*, T*)``, the throughput-maximising duration and its throughput."""
    om = omega_set(params, cfg)
    c = _mixed_omega(om, q)
    beta = beta_coeff(params)
    d_star = 1.0 / (params.lambda_ * c)
    t_star = params.w * (1.0 + q * (2.0 * beta - 1.0)) / (math.e * c)
    return d_star, t_star


def chi_gain(params: SystemParams, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Peak full-duplex over peak half-duplex throughput, ``2 beta / delta``."""
    return 2.0 * beta_coeff(params) / delta(params.theta, params.alpha, cfg)


def eta_min(r: float, theta: float, alpha: float) -> float:
    """Cancellation efficiency at which ``beta = 1/2``, floored at 0."""
    return max(0.0, 1.0 - math.log(2.0) * r ** (-alpha) / theta)
