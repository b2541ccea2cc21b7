"""Deterministic derivative-free maximisation on a bracket."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class OptimizationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SearchResult:
    x: float
    value: float
    at_boundary: bool
    evaluations: int


def _checked(f: Callable[[float], float]):
    def g(x):
        v = float(f(x))
        if not math.isfinite(v):
            raise OptimizationError(f"objective is not finite at x={x!r}: {v}")
        return v

    return g


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = 1e-6, max_iter: int = 200):
    """Golden-section search for the maximum of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x), evaluations)``.
    """
    f = _checked(f)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    n = 2
    while abs(b - a) > tol and n < max_iter:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        n += 1
    return (x1, f1, n) if f1 >= f2 else (x2, f2, n)


def log_grid_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    points: int = 41,
    log_tol: float = 1e-4,
) -> SearchResult:
    """Maximise ``f`` over ``[lo, hi]`` with a log-spaced scan and golden refinement.

    The scan locates the best grid point; golden-section search in ``log x``
    then polishes inside its two neighbouring cells.  ``at_boundary`` is set
    when the maximiser ends within one refinement tolerance of either end.
    """
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    f = _checked(f)
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), points))
    grid[0], grid[-1] = lo, hi
    values = [f(float(x)) for x in grid]
    i = int(np.argmax(values))
    left = math.log(grid[max(i - 1, 0)])
    right = math.log(grid[min(i + 1, points - 1)])
    t, v, n = golden_max(lambda t: f(math.exp(t)), left, right, tol=log_tol)
    x = math.exp(t)
    # An endpoint can beat every interior probe when the objective is monotone.
    for edge, fe in ((0, values[0]), (points - 1, values[-1])):
        if fe > v:
            x, v = float(grid[edge]), fe
    at_boundary = (
        abs(math.log(x) - math.log(lo)) <= 2 * log_tol or abs(math.log(x) - math.log(hi)) <= 2 * log_tol
    )
    return SearchResult(x, v, at_boundary, points + n)
