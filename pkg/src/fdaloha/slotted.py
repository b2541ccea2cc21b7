"""Slotted-Aloha reference and the unslotted/slotted throughput ratio."""

from __future__ import annotations

import functools
import math
from typing import Literal

from dataclasses import dataclass

from .analytic import DEFAULT_QUAD, _base, _rx_gains, interference_functional, throughput
from .hetero import optimize_duration_pair
from .model import SystemParams, beta_coeff
from .quadrature import QuadConfig, QuadResult, one_minus_inverse_product

XiMode = Literal["homogeneous", "optimized_hetero"]


@dataclass(frozen=True)
class SlottedOmegaSet:
    omega_hd_s: float
    omega_fd_s: float


def omega_hd_slotted(r: float, theta: float, alpha: float) -> float:
    return _base(r, theta, alpha)


def omega_fd_slotted(r: float, theta: float, alpha: float, cfg: QuadConfig = DEFAULT_QUAD) -> QuadResult:
    s = theta * r ** alpha

    def h(u, phi):
        x, y = _rx_gains(u, phi, r, alpha)
        return one_minus_inverse_product(s * x, s * y)

    return interference_functional(h, r, alpha, cfg, weight=2.0)


@functools.lru_cache(maxsize=512)
def _fd_slotted_unit(theta: float, alpha: float, cfg: QuadConfig) -> float:
    return omega_fd_slotted(1.0, theta, alpha, cfg).value


def slotted_omega_set(params: SystemParams, cfg: QuadConfig = DEFAULT_QUAD) -> SlottedOmegaSet:
    r2 = params.r ** 2
    return SlottedOmegaSet(
        omega_hd_slotted(params.r, params.theta, params.alpha),
        _fd_slotted_unit(float(params.theta), float(params.alpha), cfg) * r2,
    )


def throughput_slotted(params: SystemParams, q: float, g: float, cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """Slotted throughput density at load ``g`` (per-slot access probability times density)."""
    om = slotted_omega_set(params, cfg)
    beta = beta_coeff(params)
    c = (1.0 - q) * om.omega_hd_s + q * om.omega_fd_s
    return params.w * g * (1.0 + q * (2.0 * beta - 1.0)) * math.exp(-g * c)


def xi_ratio(
    params: SystemParams,
    q: float,
    g: float,
    mode: XiMode = "homogeneous",
    cfg: QuadConfig = DEFAULT_QUAD,
) -> float:
    """Unslotted over slotted throughput at equal load ``g``.

    ``homogeneous`` runs the unslotted network with a common duration
    ``g / lambda``; ``optimized_hetero`` uses the best ``(D_hd, gamma)`` pair
    at the same load.
    """
    if not g > 0:
        raise ValueError(f"load must be positive, got {g}")
    if mode == "homogeneous":
        num = throughput(params, q, g / params.lambda_, cfg)
    elif mode == "optimized_hetero":
        num = optimize_duration_pair(params, q, g, cfg).throughput
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return num / throughput_slotted(params, q, g, cfg)
