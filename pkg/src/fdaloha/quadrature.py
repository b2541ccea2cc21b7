"""Adaptive Gauss-Kronrod quadrature and the log-ratio kernel.

The integrators are globally adaptive and vectorised: the integrand receives a
1-D array of abscissae and may return either an array of the same length or an
array of shape ``(m, n)`` holding ``m`` independent integrands evaluated at the
``n`` abscissae.  All components share the interval partition, which lets the
interference functionals integrate the angular variable for a whole batch of
radii at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadConfig",
    "QuadResult",
    "QuadratureError",
    "integrate_finite",
    "integrate_semi_infinite",
    "log_ratio_kernel",
    "log_ratio_kernel_complement",
    "one_minus_inverse_product",
]

# Kronrod 15-point extension of the 7-point Gauss-Legendre rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[13, 11, 9]] = _WG[:3]

_EPS = np.finfo(float).eps


class QuadratureError(ArithmeticError):
    """Adaptive subdivision hit ``max_depth`` before meeting the tolerance."""

    def __init__(self, message: str, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_depth: int = 50

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")

    def tightened(self, factor: float) -> "QuadConfig":
        return QuadConfig(self.rel_tol / factor, self.abs_tol / factor, self.max_depth)


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __float__(self) -> float:
        return float(self.value)


def _gk15(f, a: np.ndarray, b: np.ndarray):
    """Apply the G7/K15 pair on each interval ``[a_i, b_i]``.

    Returns ``(kronrod, error, nevals)`` with shape ``(m, n_intervals)``.
    """
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = (centre[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x), dtype=float)
    scalar = fx.ndim == 1
    if scalar:
        fx = fx[None, :]
    fx = fx.reshape(fx.shape[0], a.size, 15)
    kronrod = fx @ KRONROD_WEIGHTS
    gauss = fx @ GAUSS_WEIGHTS
    mean = 0.5 * kronrod
    resasc = np.abs(fx - mean[..., None]) @ KRONROD_WEIGHTS
    resabs = np.abs(fx) @ KRONROD_WEIGHTS
    kronrod *= half
    resasc *= np.abs(half)
    resabs *= np.abs(half)
    err = np.abs(kronrod - gauss * half)
    # QUADPACK error scaling: pessimistic when the Gauss/Kronrod gap is large.
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0, scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(err, floor)
    if not (np.all(np.isfinite(kronrod)) and np.all(np.isfinite(err))):
        raise QuadratureError("integrand returned non-finite values")
    return kronrod, err, x.size, scalar


def _adaptive(f, a: float, b: float, cfg: QuadConfig, initial: int = 1):
    edges = np.linspace(a, b, initial + 1)
    lo, hi = edges[:-1], edges[1:]
    depth = np.zeros(initial, dtype=int)
    vals, errs, nev, scalar = _gk15(f, lo, hi)
    evaluations = nev
    while True:
        total = vals.sum(axis=1)
        total_err = errs.sum(axis=1)
        tol = np.maximum(cfg.rel_tol * np.abs(total), cfg.abs_tol)
        if np.all(total_err <= tol):
            break
        # Split every interval carrying more than its share of the budget.
        share = (errs / tol[:, None]).max(axis=0)
        split = share > 0.5 / share.size
        if not split.any():
            split = share == share.max()
        if np.any(depth[split] >= cfg.max_depth):
            raise QuadratureError(
                f"no convergence on [{a}, {b}] within depth {cfg.max_depth}: "
                f"error {total_err.max():.3e} > tolerance {tol.min():.3e}",
                estimate=total, error=total_err,
            )
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_depth = np.concatenate([depth[split], depth[split]]) + 1
        nv, ne, nev, _ = _gk15(f, new_lo, new_hi)
        evaluations += nev
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        depth = np.concatenate([depth[keep], new_depth])
        vals = np.concatenate([vals[:, keep], nv], axis=1)
        errs = np.concatenate([errs[:, keep], ne], axis=1)
    return total, total_err, evaluations, scalar


def _pack(value, err, evaluations, scalar: bool):
    if scalar:
        return QuadResult(float(value[0]), float(err[0]), int(evaluations))
    return QuadResult(value, err, int(evaluations))


def integrate_finite(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: QuadConfig = QuadConfig(),
    initial_intervals: int = 1,
) -> QuadResult:
    """Integrate a vectorised ``f`` over ``[a, b]``.

    Converges when the summed Kronrod error estimate is below
    ``max(rel_tol * |value|, abs_tol)`` for every component of ``f``.
    Raises :class:`QuadratureError` when an interval that still needs
    splitting has already been bisected ``max_depth`` times.
    """
    if not a <= b:
        raise ValueError(f"integration bounds must satisfy a <= b, got {a}, {b}")
    if a == b:
        probe = np.asarray(f(np.array([a])), dtype=float)
        scalar = probe.ndim <= 1
        m = 1 if scalar else probe.shape[0]
        return _pack(np.zeros(m), np.zeros(m), 1, scalar)
    value, err, n, scalar = _adaptive(f, a, b, cfg, initial_intervals)
    return _pack(value, err, n, scalar)


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    cfg: QuadConfig = QuadConfig(),
    lower: float = 0.0,
    scale: float = 1.0,
    power: float = 1.0,
) -> QuadResult:
    """Integrate ``f`` over ``[lower, inf)``.

    Uses ``u = lower + scale * (t / (1 - t))**power`` on ``t in [0, 1)``.
    ``power = 1`` is the plain rational map; integrands decaying like
    ``u**-p`` with ``p`` close to 1 need ``power`` of roughly ``2 / (p - 1)``
    to keep the transformed integrand bounded near ``t = 1``.
    """
    if scale <= 0 or power <= 0:
        raise ValueError("scale and power must be positive")

    def mapped(t):
        w = t / (1.0 - t)
        u = lower + scale * w ** power
        jac = scale * power * w ** (power - 1.0) / (1.0 - t) ** 2
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.asarray(f(u), dtype=float) * jac
        # The integrand must vanish at infinity; 0 * inf from the map is 0.
        return np.where(np.isfinite(out), out, 0.0)

    return integrate_finite(mapped, 0.0, 1.0, cfg)


# --- log-ratio kernel ------------------------------------------------------

_SERIES_Z = 0.5
_ATANH_TERMS = 14


def _log1p_over(z: np.ndarray) -> np.ndarray:
    """``log1p(z) / z`` for ``z >= 0`` with the removable point at 0."""
    small = z < 1e-8
    zs = np.where(small, 1.0, z)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.log1p(zs) / zs
    out = np.where(np.isinf(z), 0.0, out)
    return np.where(small, 1.0 - 0.5 * z, out)


def _one_minus_log1p_over(z: np.ndarray) -> np.ndarray:
    """``1 - log1p(z) / z`` for ``z >= 0`` without cancellation near 0."""
    # z - log1p(z) = 2w^2/(1-w) - 2*sum_{n>=1} w^(2n+1)/(2n+1), w = z/(2+z).
    zs = np.where(z < _SERIES_Z, z, 0.0)
    w = zs / (2.0 + zs)
    w2 = w * w
    tail = np.zeros_like(w)
    term = w * w2
    for n in range(1, _ATANH_TERMS):
        tail = tail + term / (2 * n + 1)
        term = term * w2
    with np.errstate(invalid="ignore", divide="ignore"):
        series = np.where(zs > 0, (2.0 * w2 / (1.0 - w) - 2.0 * tail) / np.where(zs > 0, zs, 1.0), 0.0)
        zl = np.where(z >= _SERIES_Z, z, 1.0)
        direct = 1.0 - np.log1p(zl) / zl
    direct = np.where(np.isinf(z), 1.0, direct)
    return np.where(z < _SERIES_Z, series, direct)


def log_ratio_kernel(x, y, s):
    """``[ln(1+s x) - ln(1+s y)] / (s (x - y))``, symmetric in ``x`` and ``y``.

    Written as ``log1p(z)/z / (1 + s*min)`` with ``z = s|x-y| / (1 + s*min)``,
    which is well conditioned at ``x = y`` (limit ``1/(1+s x)``) and for
    large or infinite arguments (limit 0).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    base = 1.0 + s * lo
    with np.errstate(invalid="ignore", over="ignore"):
        z = s * (hi - lo) / base
    z = np.where(np.isnan(z), np.inf, z)
    out = _log1p_over(z) / base
    out = np.where(np.isinf(base), 0.0, out)
    return out if out.ndim else float(out)


def log_ratio_kernel_complement(x, y, s):
    """``1 - log_ratio_kernel(x, y, s)`` computed as a sum of nonnegative terms."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    slo = s * lo
    base = 1.0 + slo
    with np.errstate(invalid="ignore", over="ignore"):
        z = s * (hi - lo) / base
        z = np.where(np.isnan(z), np.inf, z)
        # 1 - L(z)/(1+slo) = (slo + 1 - L(z)) / (1 + slo)
        out = (slo + _one_minus_log1p_over(z)) / base
    out = np.where(np.isinf(base), 1.0, out)
    return out if out.ndim else float(out)


def one_minus_inverse_product(a, b):
    """``1 - 1/((1+a)(1+b))`` for ``a, b >= 0`` without cancellation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        out = (a + b + a * b) / ((1.0 + a) * (1.0 + b))
    out = np.where(np.isnan(out), 1.0, out)
    return out if out.ndim else float(out)


def polar_gap_power(u, phi, r, alpha):
    """``|u + r e^{j phi}|^(-alpha)`` with the near-origin case kept accurate."""
    # u^2 + r^2 + 2 r u cos(phi) = (u - r)^2 + 4 r u cos^2(phi/2)
    c = np.cos(0.5 * phi)
    d2 = (u - r) ** 2 + 4.0 * r * u * c * c
    with np.errstate(divide="ignore", over="ignore"):
        return d2 ** (-0.5 * alpha)


def decay_power(alpha: float) -> float:
    """Map exponent for integrands with a ``u**(1 - alpha)`` tail."""
    return max(1.0, 3.0 / (alpha - 2.0))

