import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import OMEGA_HD_REF, PI2, SQRT2
from fdaloha.analytic import (
    chi_gain,
    delta,
    eta_min,
    gamma_product,
    omega_fd,
    omega_fd_bounds,
    omega_hd,
    omega_set,
    optimal_duration,
    optimal_q,
    success_prob_fd,
    success_prob_hd,
    throughput,
)
from fdaloha.model import SystemParams, beta_coeff
from fdaloha.quadrature import QuadConfig
from oracles import omega_fd_time_domain

# tight-tolerance run of omega_fd(1, 2, 4), rel_tol 1e-11
OMEGA_FD_GOLDEN = 15.517498393063882


def test_omega_hd_closed_form():
    assert omega_hd(1, 2, 4) == pytest.approx(OMEGA_HD_REF, rel=1e-14)
    assert omega_hd(2, 2, 4) == pytest.approx(4 * OMEGA_HD_REF, rel=1e-14)
    assert omega_hd(1, 1e-12, 4) < 1e-4


@pytest.mark.parametrize("alpha", [2.5, 3.0, 4.0, 6.0])
def test_gamma_product_reflection(alpha):
    x = 2.0 / alpha
    assert gamma_product(alpha) == pytest.approx(x * math.pi / math.sin(x * math.pi), rel=1e-14)


@pytest.mark.parametrize("alpha", [2.5, 4.0, 6.0])
def test_omega_hd_against_radial_integral(alpha):
    # 2 int_0^1 dv int 2 pi u (1 - 1/(1 + theta v u^-alpha)) du, triangle coverage profile
    from fdaloha.quadrature import integrate_semi_infinite

    theta = 2.0
    slotted = integrate_semi_infinite(
        lambda u: 2 * math.pi * u * theta / (theta + u**alpha), power=3.0 / (alpha - 2.0)
    ).value
    assert omega_hd(1, theta, alpha) == pytest.approx(slotted * 2 * alpha / (alpha + 2), rel=1e-8)


def test_omega_fd_value_and_gain_band():
    res = omega_fd(1, 2, 4)
    assert res.value == pytest.approx(OMEGA_FD_GOLDEN, rel=1e-8)
    assert res.abs_error_estimate <= 1e-7 * res.value
    assert 1.15 <= 2 * omega_hd(1, 2, 4) / res.value <= 1.25


def test_omega_fd_matches_time_domain_oracle():
    assert omega_fd(1, 2, 4).value == pytest.approx(omega_fd_time_domain(1, 2, 4), rel=1e-7)
    assert omega_fd(1, 0.5, 3).value == pytest.approx(omega_fd_time_domain(1, 0.5, 3), rel=1e-6)


def test_omega_fd_r_scaling():
    assert omega_fd(2, 2, 4).value / omega_fd(1, 2, 4).value == pytest.approx(4.0, rel=1e-6)


def test_bounds_examples():
    lo, hi = omega_fd_bounds(1, 2, 4)
    assert lo == pytest.approx(OMEGA_HD_REF, rel=1e-14)
    assert hi == pytest.approx(8 * SQRT2 * PI2, rel=1e-14)
    assert hi == pytest.approx(111.6618, abs=1e-4)
    lo2, hi2 = omega_fd_bounds(2, 2, 4)
    assert (lo2 / lo, hi2 / hi) == pytest.approx((4.0, 4.0), rel=1e-14)


GRID = [(t, a) for t in (0.5, 2.0, 8.0) for a in (2.5, 3.0, 4.0, 6.0)]


@pytest.mark.parametrize("theta, alpha", GRID)
def test_r_invariance_and_bracket(theta, alpha):
    base = omega_fd(1, theta, alpha).value
    lo, hi = omega_fd_bounds(1, theta, alpha)
    assert lo <= base <= hi
    for r in (2.0, 4.0, 8.0):
        v = omega_fd(r, theta, alpha).value
        assert abs(v / r**2 - base) / base <= 1e-6
        lo, hi = omega_fd_bounds(r, theta, alpha)
        assert lo <= v <= hi


def test_delta_examples():
    d = delta(2, 4)
    assert d == pytest.approx(1.67, abs=0.05)
    assert d == pytest.approx(omega_fd(3, 2, 4).value / omega_hd(3, 2, 4), rel=1e-6)


@pytest.mark.parametrize("theta", [0.5, 2.0, 8.0])
def test_delta_decreasing_in_alpha(theta):
    vals = [delta(theta, a) for a in (2.5, 3.0, 3.5, 4.0, 5.0, 6.0)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert min(vals) > 1


def test_delta_tolerance_ladder():
    assert abs(delta(2, 4, QuadConfig(1e-10)) - delta(2, 4)) < 1e-6


def test_success_probability_examples(ref_params):
    p = success_prob_hd(ref_params, 0.0, 1.0)
    assert p == pytest.approx(math.exp(-0.05 * OMEGA_HD_REF), rel=1e-14)
    assert p == pytest.approx(0.62800, abs=5e-5)
    assert success_prob_hd(ref_params, 0.3, 1e-12) == pytest.approx(1.0, abs=1e-9)
    assert success_prob_hd(ref_params, 1.0, 1.0) <= p
    assert success_prob_fd(ref_params, 0.4, 2.0) == success_prob_hd(ref_params, 0.4, 2.0)
    lossy = ref_params.replace(eta=0.9)
    assert success_prob_fd(lossy, 0.0, 1.0) == pytest.approx(math.exp(-0.2) * p, rel=1e-14)
    assert success_prob_fd(lossy, 0.0, 1.0) == pytest.approx(0.51417, abs=5e-5)
    assert success_prob_fd(ref_params.replace(eta=0.0, theta=50.0), 0.0, 1.0) < 1e-20


def test_throughput_examples(ref_params):
    assert throughput(ref_params, 0.0, 1.0) == pytest.approx(0.05 * math.exp(-0.05 * OMEGA_HD_REF), rel=1e-14)
    assert throughput(ref_params, 0.0, 1.0) == pytest.approx(0.031400, abs=5e-6)
    assert throughput(ref_params, 0.0, 1e-9) < 1e-9
    assert throughput(ref_params, 0.0, 1e4) < 1e-100
    peak = throughput(ref_params, 0.0, 1.0 / (0.05 * OMEGA_HD_REF))
    assert peak == pytest.approx(1.0 / (math.e * OMEGA_HD_REF), rel=1e-14)
    assert peak == pytest.approx(0.039535, abs=1e-6)


def test_optimal_duration(ref_params):
    d_star, t_star = optimal_duration(ref_params, 0.0)
    assert d_star == pytest.approx(2.1494, abs=1e-4)
    assert t_star == pytest.approx(0.039535, abs=1e-6)
    for q in (0.0, 0.3, 1.0):
        d, t = optimal_duration(ref_params, q)
        assert throughput(ref_params, q, d) == pytest.approx(t, rel=1e-10)
        d2, t2 = optimal_duration(ref_params.replace(lambda_=0.1), q)
        assert (d2, t2) == pytest.approx((d / 2, t), rel=1e-12)


@pytest.mark.parametrize("q", [0.0, 0.5, 1.0])
def test_throughput_unimodal_in_duration(ref_params, q):
    d_star, _ = optimal_duration(ref_params, q)
    ds = np.geomspace(d_star / 50, d_star * 50, 100)
    t = np.array([throughput(ref_params, q, d) for d in ds])
    k = int(np.argmax(t))
    assert np.all(np.diff(t[: k + 1]) > 0) and np.all(np.diff(t[k:]) < 0)
    assert ds[max(k - 1, 0)] <= d_star <= ds[min(k + 1, 99)]


def test_optimal_q_boundaries_perfect_cancellation(ref_params):
    oq = optimal_q(ref_params, 1.0)
    om = omega_set(ref_params)
    gap = 0.05 * (om.omega_fd - om.omega_hd)
    assert oq.d2 == pytest.approx(1 / gap, rel=1e-14)
    assert oq.d1 == oq.d2 / 2
    assert optimal_q(ref_params, oq.d1).q_star == pytest.approx(1.0, abs=1e-9)
    assert optimal_q(ref_params, oq.d2).q_star == pytest.approx(0.0, abs=1e-9)


def test_optimal_q_intermediate_example(ref_params):
    om = omega_set(ref_params)
    oq = optimal_q(ref_params, 2.0)
    assert oq.q_star == pytest.approx(1 / (0.05 * 2 * (om.omega_fd - om.omega_hd)) - 1, rel=1e-12)
    assert oq.q_star == pytest.approx(0.61, abs=0.01)
    assert oq.region == "intermediate"
    # stationarity: the throughput is flat in q at q*
    h = 1e-5
    dt = throughput(ref_params, oq.q_star + h, 2.0) - throughput(ref_params, oq.q_star - h, 2.0)
    assert abs(dt) < 1e-12


@given(st.floats(0.66, 1.0), st.floats(0.05, 20.0))
def test_optimal_q_is_argmax(eta, d):
    p = SystemParams(eta=eta)
    oq = optimal_q(p, d)
    grid = np.linspace(0, 1, 201)
    best = max(throughput(p, q, d) for q in grid)
    assert throughput(p, oq.q_star, d) >= best * (1 - 1e-12)
    assert oq.d1 <= oq.d2
    assert (oq.region == "full") == (oq.q_star == 1.0)
    assert (oq.region == "half") == (oq.q_star == 0.0)


def test_optimal_q_continuity(ref_params):
    oq = optimal_q(ref_params.replace(eta=0.9), 1.0)
    for edge in (oq.d1, oq.d2):
        for eps in (1e-4, 1e-7):
            a = optimal_q(ref_params.replace(eta=0.9), edge - eps).q_star
            b = optimal_q(ref_params.replace(eta=0.9), edge + eps).q_star
            assert abs(a - b) < 10 * eps / edge


def test_optimal_q_without_useful_full_duplex(ref_params):
    for eta in (0.0, 0.5, eta_min(1, 2, 4)):
        p = ref_params.replace(eta=eta)
        assert beta_coeff(p) <= 0.5 + 1e-15
        for d in (1e-3, 0.5, 2.0, 50.0):
            assert optimal_q(p, d).q_star == 0.0
    assert optimal_q(ref_params.replace(eta=0.7), 1.0).d1 > 0


def test_chi_examples(ref_params):
    chi = chi_gain(ref_params)
    assert chi == pytest.approx(1.20, abs=0.05)
    assert chi_gain(ref_params.replace(r=2.0)) == pytest.approx(chi, rel=1e-6)
    lossy = [chi_gain(ref_params.replace(eta=0.99, r=r)) for r in (1.0, 1.2, 1.5, 2.0)]
    assert all(b < a for a, b in zip(lossy, lossy[1:]))


def test_eta_min_examples():
    assert eta_min(1, 2, 4) == pytest.approx(1 - math.log(2) / 2, rel=1e-15)
    assert eta_min(1, 2, 4) == pytest.approx(0.65343, abs=1e-5)
    assert beta_coeff(SystemParams(eta=eta_min(1, 2, 4))) == pytest.approx(0.5, rel=1e-14)
    assert eta_min(1, 1e-3, 4) == 0.0


def test_omega_set_fields(ref_params):
    om = omega_set(ref_params)
    assert om.omega_hd <= om.omega_fd
    assert om.delta == pytest.approx(om.omega_fd / om.omega_hd, rel=1e-15)
    assert om.fd_error_estimate >= 0
