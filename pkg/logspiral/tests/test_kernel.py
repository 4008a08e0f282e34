"""Test kernel.py"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from ..kernel import (
    check_beta,
    check_theta,
    eval_kernel,
    eval_kernel_mp,
    eval_kernel_reflected,
    kernel_limits,
)
from ..utils._errors import SpiralDomainError

TWO_PI = 2.0 * math.pi


@pytest.mark.parametrize("beta", [0.0, float("nan"), float("inf"), "abc"])
def test_check_beta_rejects(beta):
    with pytest.raises(SpiralDomainError, match="beta"):
        check_beta(beta)


@pytest.mark.parametrize("theta", [0.0, TWO_PI, -1.0, 7.0])
def test_check_theta_rejects(theta):
    with pytest.raises(SpiralDomainError, match="theta"):
        check_theta(theta)


def test_eval_kernel_shapes():
    values = eval_kernel(0.5, 1.0)
    assert set(values) == {"theta", "K", "K1", "K2"}
    assert isinstance(values["K"], float)

    theta = np.linspace(0.1, 6.0, 7)
    values = eval_kernel(0.5, theta)
    assert values["K1"].shape == (7,)
    np.testing.assert_allclose(values["theta"], theta)


@pytest.mark.parametrize("beta", np.linspace(0.05, 5.0, 100))
def test_kprime_jump(beta):
    lim = kernel_limits(beta)
    jump = lim["k1_plus0"] - lim["k1_minus0"]
    assert abs(jump - 1.0 / (1.0 + beta**2)) < 1e-10
    assert lim["k1_zero"] == pytest.approx(0.5 * (lim["k1_plus0"] + lim["k1_minus0"]))


def test_kprime_jump_value():
    lim = kernel_limits(0.5)
    assert lim["k1_plus0"] - lim["k1_minus0"] == pytest.approx(0.8, abs=1e-12)


@pytest.mark.parametrize("beta", [0.3, 0.8, 1.7])
def test_one_sided_limits(beta):
    lim = kernel_limits(beta)
    eps = 1e-7
    near_zero = eval_kernel(beta, eps)
    near_two_pi = eval_kernel(beta, TWO_PI - eps)

    assert near_zero["K"] == pytest.approx(lim["k0"], abs=1e-6)
    assert near_two_pi["K"] == pytest.approx(lim["k0"], abs=1e-6)
    assert near_zero["K1"] == pytest.approx(lim["k1_plus0"], abs=1e-5)
    assert near_two_pi["K1"] == pytest.approx(lim["k1_minus0"], abs=1e-5)
    assert near_zero["K2"] == pytest.approx(lim["k2_plus0"], abs=1e-4)
    assert near_two_pi["K2"] == pytest.approx(lim["k2_minus0"], abs=1e-4)


@pytest.mark.parametrize("beta", [0.3, 1.0, 2.5])
@pytest.mark.parametrize("theta", [0.7, 2.0, 4.4])
def test_derivatives_match_finite_differences(beta, theta):
    h = 1e-5
    values = eval_kernel(beta, theta)
    plus = eval_kernel(beta, theta + h)
    minus = eval_kernel(beta, theta - h)
    assert (plus["K"] - minus["K"]) / (2 * h) == pytest.approx(values["K1"], rel=1e-6, abs=1e-9)
    assert (plus["K1"] - minus["K1"]) / (2 * h) == pytest.approx(
        values["K2"], rel=1e-6, abs=1e-9
    )


@settings(max_examples=50, deadline=None)
@given(
    beta=st.floats(min_value=0.05, max_value=5.0),
    theta=st.floats(min_value=0.01, max_value=TWO_PI - 0.01),
)
def test_negative_beta_reflection(beta, theta):
    left = eval_kernel(-beta, theta)
    right = eval_kernel(beta, TWO_PI - theta)
    assert left["K"] == pytest.approx(right["K"], rel=1e-9, abs=1e-12)
    assert left["K1"] == pytest.approx(-right["K1"], rel=1e-9, abs=1e-12)
    assert left["K2"] == pytest.approx(right["K2"], rel=1e-9, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    beta=st.floats(min_value=0.05, max_value=5.0),
    theta=st.floats(min_value=0.01, max_value=TWO_PI - 0.01),
)
def test_reflected_evaluation(beta, theta):
    reflected = eval_kernel_reflected(beta, theta)
    direct = eval_kernel(beta, TWO_PI - theta)
    assert reflected["theta"] == theta
    assert reflected["K1"] == direct["K1"]


@pytest.mark.parametrize("beta", np.linspace(0.1, 4.0, 20))
def test_quadrature_identity(beta):
    lim = kernel_limits(beta)
    integral, _ = quad(
        lambda t: eval_kernel(beta, t)["K1"] ** 2,
        0.0,
        TWO_PI,
        limit=200,
        epsabs=1e-13,
        epsrel=1e-11,
    )
    assert abs(lim["k1_zero"] + 4.0 * beta * integral) < 1e-6 * abs(lim["k1_zero"])


@pytest.mark.parametrize("beta", [0.3, 0.5, 1.5])
@pytest.mark.parametrize("theta", [0.5, math.pi, 5.0])
def test_extended_precision_oracle(beta, theta):
    pytest.importorskip("mpmath")
    closed = eval_kernel(beta, theta)
    oracle = eval_kernel_mp(beta, theta)
    for key in ("K", "K1", "K2"):
        assert closed[key] == pytest.approx(oracle[key], rel=1e-10, abs=1e-12)
