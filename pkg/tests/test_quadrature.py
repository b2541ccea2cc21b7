import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from fdaloha.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadConfig,
    QuadratureError,
    integrate_finite,
    integrate_semi_infinite,
    log_ratio_kernel,
    log_ratio_kernel_complement,
    one_minus_inverse_product,
    polar_gap_power,
)


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (lambda x: np.ones_like(x), 0.0, math.pi, math.pi),
        (np.sin, 0.0, math.pi, 2.0),
        (lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, math.pi / 4),
    ],
)
def test_finite_examples(f, a, b, exact):
    res = integrate_finite(f, a, b)
    assert res.value == pytest.approx(exact, rel=1e-12)
    assert res.abs_error_estimate >= 0 and res.evaluations > 0
    assert abs(res.value - exact) <= max(1e-8 * abs(exact), 1e-12)


@pytest.mark.parametrize(
    "f, exact",
    [
        (lambda u: np.exp(-u), 1.0),
        (lambda u: u * np.exp(-u * u), 0.5),
        (lambda u: 1.0 / (1.0 + u * u), math.pi / 2),
    ],
)
def test_semi_infinite_examples(f, exact):
    res = integrate_semi_infinite(f)
    assert res.value == pytest.approx(exact, rel=1e-9)


def test_semi_infinite_matches_split_with_analytic_tail():
    upper = 7.0
    head = integrate_finite(lambda u: np.exp(-u), 0.0, upper).value
    assert integrate_semi_infinite(lambda u: np.exp(-u)).value == pytest.approx(head + math.exp(-upper), abs=1e-10)


def test_semi_infinite_slow_algebraic_tail():
    # u^(1 - alpha) decay with alpha = 2.5, the slowest tail met in practice.
    f = lambda u: u / (1.0 + u) ** 3.5
    exact = 1.0 / (1.5 * 2.5)
    assert integrate_semi_infinite(f, power=6.0).value == pytest.approx(exact, rel=1e-8)


def test_kronrod_rule_exact_to_degree_23():
    for k in range(24):
        exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
        assert float(KRONROD_WEIGHTS @ NODES**k) == pytest.approx(exact, abs=1e-14)
    assert float(GAUSS_WEIGHTS @ NODES**12) == pytest.approx(2.0 / 13, abs=1e-14)
    assert abs(float(GAUSS_WEIGHTS @ NODES**14) - 2.0 / 15) > 1e-6


def test_vector_valued_integrand():
    k = np.arange(1.0, 4.0)
    # components on the leading axis, quadrature nodes on the last
    res = integrate_finite(lambda x: np.cos(np.multiply.outer(k, x)), 0.0, 1.0)
    np.testing.assert_allclose(res.value, np.sin(k) / k, rtol=1e-12)


def test_non_convergence_raises():
    with pytest.raises(QuadratureError):
        integrate_finite(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3) + 1e-300), 0.0, 1.0, QuadConfig(1e-14, 1e-300, 4))


def test_degenerate_interval():
    assert integrate_finite(np.exp, 1.0, 1.0).value == 0.0


def test_kernel_examples():
    assert log_ratio_kernel(1.0, 1.0, 2.0) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert log_ratio_kernel(1.0, 0.0, 2.0) == pytest.approx(math.log(3.0) / 2.0, rel=1e-15)
    assert log_ratio_kernel(1.0, 0.0, 2.0) == pytest.approx(0.549306, abs=1e-6)
    assert log_ratio_kernel(3.0, 0.5, 1e-12) == pytest.approx(1.0, abs=1e-11)


def test_kernel_near_diagonal_is_continuous():
    x = 0.7
    ys = x * (1.0 + np.logspace(-15, -3, 25))
    vals = log_ratio_kernel(x, ys, 5.0)
    # derivative of k in y at the diagonal is -s / (2 (1+sx)^2)
    slope = -5.0 / (2.0 * 4.5**2)
    np.testing.assert_allclose(vals, 1.0 / 4.5 + slope * (ys - x), rtol=0, atol=1e-7)


def test_kernel_complement_large_arguments():
    # Direct 1 - k loses every digit here; compare against a 50-digit reference.
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 50
    for x, y, s in [(1e-9, 2e-9, 2.0), (1e6, 3e6, 2.0), (0.5, 0.5000001, 1e-7), (1e-300, 1e-300, 1.0)]:
        X, Y, S = (mpmath.mpf(v) for v in (x, y, s))
        if X == Y:
            ref = S * X / (1 + S * X)
        else:
            ref = 1 - (mpmath.log1p(S * X) - mpmath.log1p(S * Y)) / (S * (X - Y))
        assert float(log_ratio_kernel_complement(x, y, s)) == pytest.approx(float(ref), rel=1e-13)


finite = st.floats(0.0, 1e6, allow_nan=False)


@given(finite, finite, st.floats(1e-6, 1e3))
def test_kernel_symmetry(x, y, s):
    assert log_ratio_kernel(x, y, s) == log_ratio_kernel(y, x, s)


@given(finite, finite, st.floats(1e-6, 1e3))
def test_kernel_mean_value_bounds(x, y, s):
    k = log_ratio_kernel(x, y, s)
    lo, hi = 1.0 / (1.0 + s * max(x, y)), 1.0 / (1.0 + s * min(x, y))
    assert lo * (1 - 1e-12) <= k <= hi * (1 + 1e-12)
    assert 0.0 < k <= 1.0


@given(finite, finite, st.floats(1e-6, 1e3))
def test_kernel_complement_consistent(x, y, s):
    k = log_ratio_kernel(x, y, s)
    c = log_ratio_kernel_complement(x, y, s)
    assert c + k == pytest.approx(1.0, abs=1e-12)
    assert c >= 0.0


@given(st.floats(0.0, 1e4), st.floats(0.0, 1e4))
def test_inverse_product_complement(a, b):
    direct = 1.0 - 1.0 / ((1.0 + a) * (1.0 + b))
    assert one_minus_inverse_product(a, b) == pytest.approx(direct, rel=1e-12, abs=1e-15)


@given(st.floats(0.01, 50.0), st.floats(0.0, math.pi), st.floats(1.0, 5.0), st.floats(2.1, 6.0))
def test_polar_gap_matches_law_of_cosines(u, phi, r, alpha):
    d2 = u * u + r * r + 2.0 * r * u * math.cos(phi)
    assume(d2 > 1e-6 * (u + r) ** 2)
    assert float(polar_gap_power(u, phi, r, alpha)) == pytest.approx(d2 ** (-alpha / 2), rel=1e-9)
