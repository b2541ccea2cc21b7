"""Heterogeneous durations: half-duplex packets last ``D``, full-duplex ``gamma D``.

Cross-class interference no longer overlaps with the triangular profile of the
homogeneous case.  ``overlap_hd_on_fd`` and ``overlap_fd_on_hd`` give the
fraction of a reception window covered by an interferer of the other class as
a function of its start offset; integrating them into the Laplace functional
yields ``omega_hd_prime`` (closed form) and ``omega_fd_prime`` (double
integral).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .analytic import DEFAULT_QUAD, _base, _rx_gains, interference_functional, omega_hd, omega_set, throughput
from .model import DurationConfig, SystemParams, beta_coeff
from .quadrature import QuadConfig, QuadResult, log_ratio_kernel_complement, one_minus_inverse_product
from .search import log_grid_max

GAMMA_RANGE = (1e-3, 1e2)


@dataclass(frozen=True)
class HeteroOmegaSet:
    omega_hd_prime: float
    omega_fd_prime: float
    gamma: float
    fd_error_estimate: float


@dataclass(frozen=True)
class HeteroOptimum:
    d_hd: float
    gamma: float
    throughput: float
    load: float
    at_boundary: bool = False


def overlap_hd_on_fd(t, gamma: float, d: float):
    """Fraction of a ``gamma*d`` full-duplex reception covered by a half-duplex
    packet of length ``d`` starting at offset ``t``."""
    t = np.asarray(t, dtype=float)
    g = gamma * d
    if gamma <= 1.0:
        out = np.select(
            [t < -d, t < -d * (1.0 - gamma), t < 0.0, t <= g],
            [0.0, (d + t) / g, 1.0, (g - t) / g],
            0.0,
        )
    else:
        out = np.select(
            [t < -d, t < 0.0, t < d * (gamma - 1.0), t <= g],
            [0.0, (d + t) / g, 1.0 / gamma, (g - t) / g],
            0.0,
        )
    return out if out.ndim else float(out)


def overlap_fd_on_hd(t, gamma: float, d: float):
    """Fraction of a ``d`` half-duplex reception covered by a full-duplex
    exchange of length ``gamma*d`` starting at offset ``t``."""
    t = np.asarray(t, dtype=float)
    g = gamma * d
    if gamma <= 1.0:
        out = np.select(
            [t < -g, t < 0.0, t < d * (1.0 - gamma), t <= d],
            [0.0, (g + t) / d, gamma, (d - t) / d],
            0.0,
        )
    else:
        out = np.select(
            [t < -g, t < -d * (gamma - 1.0), t < 0.0, t <= d],
            [0.0, (g + t) / d, 1.0, (d - t) / d],
            0.0,
        )
    return out if out.ndim else float(out)


def omega_hd_prime(r: float, theta: float, alpha: float, gamma: float) -> float:
    """Half-duplex interference functional seen by a full-duplex receiver.

    For ``gamma <= 1`` the plateau of full overlap adds
    ``(1-gamma)/gamma`` times the slotted functional; for ``gamma > 1`` the
    interferer covers at most ``1/gamma`` of the window, which rescales the
    threshold to ``theta/gamma`` and yields the ``gamma^-(1+2/alpha)`` factor.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    base = _base(r, theta, alpha)
    hd = base * 2.0 * alpha / (alpha + 2.0)
    if gamma <= 1.0:
        return hd + base * (1.0 - gamma) / gamma
    return (hd + base * (gamma - 1.0)) * gamma ** (-(1.0 + 2.0 / alpha))


def omega_fd_prime(
    r: float, theta: float, alpha: float, gamma: float, cfg: QuadConfig = DEFAULT_QUAD
) -> QuadResult:
    """Full-duplex interference functional seen by a half-duplex receiver."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    s = theta * r ** alpha
    if gamma <= 1.0:
        gs = gamma * s

        def h(u, phi):
            x, y = _rx_gains(u, phi, r, alpha)
            return gamma * log_ratio_kernel_complement(x, y, gs) + 0.5 * (1.0 - gamma) * (
                one_minus_inverse_product(gs * x, gs * y)
            )
    else:

        def h(u, phi):
            x, y = _rx_gains(u, phi, r, alpha)
            return log_ratio_kernel_complement(x, y, s) + 0.5 * (gamma - 1.0) * (
                one_minus_inverse_product(s * x, s * y)
            )

    return interference_functional(h, r, alpha, cfg)


@functools.lru_cache(maxsize=4096)
def _fd_prime_unit(theta: float, alpha: float, gamma: float, cfg: QuadConfig) -> tuple[float, float]:
    res = omega_fd_prime(1.0, theta, alpha, gamma, cfg)
    return res.value, res.abs_error_estimate


def hetero_omega_set(params: SystemParams, gamma: float, cfg: QuadConfig = DEFAULT_QUAD) -> HeteroOmegaSet:
    """Both cross-class functionals at ``params.r``; the quadrature runs at
    ``r = 1`` and is rescaled by ``r^2`` (same change of variables as for
    ``omega_fd``)."""
    r2 = params.r ** 2
    if gamma == 1.0:
        om = omega_set(params, cfg)
        return HeteroOmegaSet(om.omega_hd, om.omega_fd, 1.0, om.fd_error_estimate)
    v, e = _fd_prime_unit(float(params.theta), float(params.alpha), float(gamma), cfg)
    return HeteroOmegaSet(
        omega_hd_prime(params.r, params.theta, params.alpha, gamma), v * r2, float(gamma), e * r2
    )


def success_probs_hetero(
    params: SystemParams, q: float, dur: DurationConfig, cfg: QuadConfig = DEFAULT_QUAD
) -> tuple[float, float]:
    """``(p_hd, p_fd)`` with half-duplex packets of ``dur.d`` and full-duplex of ``dur.gamma * dur.d``."""
    om = omega_set(params, cfg)
    hom = hetero_omega_set(params, dur.gamma, cfg)
    lam, d, g = params.lambda_, dur.d, dur.gamma
    p_hd = math.exp(-lam * d * ((1.0 - q) * om.omega_hd + q * hom.omega_fd_prime))
    p_fd = beta_coeff(params) * math.exp(-lam * g * d * ((1.0 - q) * hom.omega_hd_prime + q * om.omega_fd))
    return p_hd, p_fd


def throughput_hetero(
    params: SystemParams, q: float, dur: DurationConfig, cfg: QuadConfig = DEFAULT_QUAD
) -> float:
    p_hd, p_fd = success_probs_hetero(params, q, dur, cfg)
    return params.lambda_ * params.w * dur.d * ((1.0 - q) * p_hd + 2.0 * dur.gamma * q * p_fd)


def load_of(params: SystemParams, q: float, dur: DurationConfig) -> float:
    """Average channel occupancy ``lambda D (1 + q(gamma - 1))``."""
    return params.lambda_ * dur.d * (1.0 + q * (dur.gamma - 1.0))


def optimize_duration_pair(
    params: SystemParams,
    q: float,
    g: float,
    cfg: QuadConfig = DEFAULT_QUAD,
    gamma_range: tuple[float, float] = GAMMA_RANGE,
    grid_points: int = 41,
) -> HeteroOptimum:
    """Best ``(D_hd, gamma)`` at fixed load ``g = lambda D_hd (1 + q(gamma-1))``.

    The load constraint leaves a one-dimensional search over ``gamma``.  When
    the best ratio sits on an end of ``gamma_range`` the result is returned
    with ``at_boundary=True``: at light load the throughput keeps growing as
    the half-duplex share of airtime vanishes.
    """
    if not g > 0:
        raise ValueError(f"load must be positive, got {g}")
    lam = params.lambda_
    if q == 0.0 or q == 1.0:
        # gamma is irrelevant (q=0) or absorbed by the load constraint (q=1).
        d = g / lam
        return HeteroOptimum(d, 1.0, throughput(params, q, d, cfg), g)

    def objective(gamma):
        d_hd = g / (lam * (1.0 + q * (gamma - 1.0)))
        return throughput_hetero(params, q, DurationConfig(d_hd, gamma), cfg)

    best = log_grid_max(objective, *gamma_range, points=grid_points)
    d_hd = g / (lam * (1.0 + q * (best.x - 1.0)))
    return HeteroOptimum(d_hd, best.x, best.value, g, best.at_boundary)


def _gamma_star_limit_objective(params: SystemParams, d_hd: float, cfg: QuadConfig):
    # d/dq of the throughput at q = 0, up to the positive factor lambda W D.
    om = omega_set(params, cfg)
    beta = beta_coeff(params)
    lam = params.lambda_
    p_hd0 = math.exp(-lam * d_hd * om.omega_hd)

    def f(gamma):
        hom = hetero_omega_set(params, gamma, cfg)
        own = 2.0 * beta * gamma * math.exp(-lam * gamma * d_hd * hom.omega_hd_prime)
        return own - p_hd0 * (1.0 + lam * d_hd * (hom.omega_fd_prime - om.omega_hd))

    return f


def gamma_star(
    params: SystemParams,
    q: float,
    d_hd: float,
    cfg: QuadConfig = DEFAULT_QUAD,
    gamma_range: tuple[float, float] = GAMMA_RANGE,
    grid_points: int = 41,
) -> float:
    """Duration ratio maximising throughput with half-duplex packets fixed at ``d_hd``.

    At ``q = 0`` the throughput does not depend on ``gamma``; the limit
    ``q -> 0+`` is returned instead, i.e. the maximiser of the marginal gain of
    the first full-duplex clusters.
    """
    if not d_hd > 0:
        raise ValueError(f"d_hd must be positive, got {d_hd}")
    if q == 0.0:
        f = _gamma_star_limit_objective(params, d_hd, cfg)
    else:

        def f(gamma):
            return throughput_hetero(params, q, DurationConfig(d_hd, gamma), cfg)

    return log_grid_max(f, *gamma_range, points=grid_points).x
