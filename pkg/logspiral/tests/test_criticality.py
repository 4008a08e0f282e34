"""Test criticality.py"""

import math

import numpy as np
import pytest

from ..criticality import (
    band_index,
    band_label,
    eval_F,
    eval_Fprime,
    eval_Fprime_pi,
    guard_critical,
    sign_change_indices,
    solve_alpha,
    solve_asymmetric_fixed_point,
    solve_critical_betas,
    solve_theta_stars,
)
from ..kernel import eval_kernel, kernel_limits
from ..utils._errors import NearCriticalError, SpiralDomainError


def test_critical_betas():
    crit = solve_critical_betas()
    expected = {
        "beta0": 0.44,
        "beta1": 0.57,
        "beta_star": 0.71,
        "beta2": 0.87,
        "beta3": 1.55,
    }
    for name, value in expected.items():
        assert abs(crit[name] - value) < 0.01, name
    assert (
        0 < crit["beta0"] < crit["beta1"] < crit["beta_star"] < crit["beta2"] < crit["beta3"]
    )
    assert crit["beta0"] < 1 / math.sqrt(3) < crit["beta2"] < 1.0 < crit["beta3"] < math.sqrt(3)


def test_critical_betas_are_roots():
    crit = solve_critical_betas()
    assert abs(eval_Fprime_pi(crit["beta_star"])) < 1e-10
    # theta2 + theta3 = 2*pi at beta1
    stars = solve_theta_stars(crit["beta1"])
    assert stars["theta2"] + stars["theta3"] == pytest.approx(2 * math.pi, abs=1e-7)


@pytest.mark.parametrize("beta, count", [(0.3, 3), (0.6, 2), (1.2, 1), (1.8, 0)])
def test_theta_star_counts(beta, count):
    stars = solve_theta_stars(beta)
    assert stars["count"] == count
    assert stars["labels"] == ["theta1", "theta2", "theta3"][3 - count :]
    k0 = kernel_limits(beta)["k0"]
    for theta in stars["thetas"]:
        assert 0 < theta < 2 * math.pi
        assert eval_kernel(beta, theta)["K"] == pytest.approx(k0, abs=1e-9)
    assert stars["thetas"] == sorted(stars["thetas"])


def test_theta3_at_beta_one():
    with pytest.warns(UserWarning, match="gamma"):
        stars = solve_theta_stars(1.0)
    assert stars["degenerate_gamma"] is True
    assert stars["count"] == 1
    assert abs(stars["theta3"] - math.pi) < 1e-8


def test_theta_stars_near_critical():
    crit = solve_critical_betas()
    with pytest.raises(NearCriticalError) as excinfo:
        solve_theta_stars(crit["beta0"] + 1e-8)
    assert excinfo.value.critical == "beta0"


def test_theta_stars_negative_beta():
    with pytest.raises(SpiralDomainError, match="positive"):
        solve_theta_stars(-0.3)


@pytest.mark.parametrize(
    "beta, label, index",
    [
        (0.3, "(0,beta0)", 0),
        (0.5, "(beta0,beta1)", 1),
        (0.63, "(beta1,beta_star)", 2),
        (0.8, "(beta_star,beta2)", 3),
        (0.93, "(beta2,1)", 4),
        (1.2, "(1,beta3)", 5),
        (1.8, "(beta3,inf)", 6),
        (-0.3, "(0,beta0)", 0),
    ],
)
def test_bands(beta, label, index):
    assert band_label(beta) == label
    assert band_index(beta) == index


def test_band_at_critical_value():
    assert band_label(1.0) == "1"
    with pytest.raises(NearCriticalError):
        band_index(1.0)


def test_guard_critical():
    crit = solve_critical_betas()
    guard_critical(0.3, 1e-4)
    with pytest.raises(NearCriticalError, match="beta3"):
        guard_critical(crit["beta3"] - 5e-5, 1e-4)


def test_sign_change_indices():
    assert sign_change_indices([1.0, 2.0, -1.0, -3.0, 4.0]) == [(1, 2), (3, 4)]
    # samples below the floor are ignored
    assert sign_change_indices([1.0, 1e-20, 2.0], floor=1e-15) == []


@pytest.mark.parametrize("beta, positive", [(0.3, True), (0.6, True), (0.8, False), (1.2, False)])
def test_fprime_pi_sign(beta, positive):
    value = eval_Fprime_pi(beta)
    assert (value > 0) == positive
    assert eval_Fprime(beta, math.pi) == pytest.approx(value, rel=1e-9, abs=1e-15)


@pytest.mark.parametrize("beta", [0.3, 1.2])
def test_fprime_matches_finite_difference(beta):
    h = 1e-5
    for theta in (0.8, 2.5, 4.0):
        fd = (eval_F(beta, theta + h) - eval_F(beta, theta - h)) / (2 * h)
        assert eval_Fprime(beta, theta) == pytest.approx(fd, rel=1e-5, abs=1e-10)


@pytest.mark.parametrize("beta", [0.3, 0.6, 1.2, 2.0])
def test_solve_alpha(beta):
    alpha = solve_alpha(beta)
    assert math.pi < alpha < 2 * math.pi
    values = eval_kernel(beta, alpha)
    assert values["K1"] == pytest.approx(kernel_limits(beta)["k1_zero"], abs=1e-10)
    assert values["K2"] < 0


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.63])
def test_asymmetric_fixed_point(beta):
    point = solve_asymmetric_fixed_point(beta)
    assert point is not None
    assert 0 < point["theta_bar"] < math.pi
    assert point["r_bar"] > 0
    assert abs(point["r_bar"] - point["r2_at_theta_bar"]) < 1e-8
    assert point["fprime"] < 0
    assert abs(eval_F(beta, point["theta_bar"])) < 1e-11


@pytest.mark.parametrize("beta", [0.8, 1.2, 2.0])
def test_asymmetric_fixed_point_absent(beta):
    assert solve_asymmetric_fixed_point(beta) is None


def test_F_antisymmetry():
    # F(2*pi - theta) = -F(theta)
    theta = np.linspace(0.2, 3.0, 9)
    np.testing.assert_allclose(
        eval_F(0.4, 2 * math.pi - theta), -eval_F(0.4, theta), rtol=1e-9, atol=1e-14
    )
