"""Test dynamics.py"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from ..dynamics import (
    BLOWUP_DETECTED,
    BOUNDARY_REACHED,
    EQUILIBRIUM_CAPTURED,
    ESCAPED_TO_INFINITY,
    HORIZON_REACHED,
    apply_symmetry,
    blowup_time,
    boundary_destination,
    integrate,
    line_approach,
    line_destination,
    recover_original,
    reverse_direction,
    vector_field_log,
    vector_field_original,
    vector_field_reparam,
    zeros_k_minus_k0,
)
from ..kernel import kernel_limits
from ..utils._errors import SpiralDomainError

TWO_PI = 2.0 * math.pi

states = st.tuples(
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=0.05, max_value=TWO_PI - 0.05),
)


@settings(max_examples=50, deadline=None)
@given(state=states, beta=st.sampled_from([0.3, 0.8, 2.0]))
def test_negation_symmetry(state, beta):
    i1, i2, theta = state
    f = vector_field_original(beta, (i1, i2, theta))
    g = vector_field_original(beta, (-i1, -i2, theta))
    assert g[0] == pytest.approx(f[0], rel=1e-12, abs=1e-15)
    assert g[1] == pytest.approx(f[1], rel=1e-12, abs=1e-15)
    assert g[2] == pytest.approx(-f[2], rel=1e-12, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(state=states, beta=st.sampled_from([0.3, 0.8, 2.0]))
def test_swap_symmetry(state, beta):
    i1, i2, theta = state
    f = vector_field_original(beta, (i1, i2, theta))
    g = vector_field_original(beta, (i2, i1, TWO_PI - theta))
    assert g[0] == pytest.approx(f[1], rel=1e-9, abs=1e-12)
    assert g[1] == pytest.approx(f[0], rel=1e-9, abs=1e-12)
    assert g[2] == pytest.approx(-f[2], rel=1e-9, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(state=states, beta=st.sampled_from([0.3, 0.8, 2.0]))
def test_reparam_matches_original(state, beta):
    i1, i2, theta = state
    d1, d2, dth = vector_field_original(beta, (i1, i2, theta))
    dr, dtheta = vector_field_reparam(beta, i1 / i2, theta)
    assert dr == pytest.approx((d1 * i2 - i1 * d2) / i2**3, rel=1e-9, abs=1e-12)
    assert dtheta == pytest.approx(dth / i2, rel=1e-9, abs=1e-12)


def test_log_field_matches_reparam():
    beta, theta = 0.5, 2.0
    for r in (-4.0, -0.3, 0.2, 7.0):
        dr, dtheta = vector_field_reparam(beta, r, theta)
        da, dtheta_log = vector_field_log(beta, math.log(abs(r)), theta, 1 if r > 0 else -1)
        assert da == pytest.approx(dr / r, rel=1e-12)
        assert dtheta_log == pytest.approx(dtheta, rel=1e-12)


def test_apply_symmetry_states():
    state = {"i1": 1.0, "i2": 2.0, "theta": 1.0, "t": 3.0, "direction": "forward"}
    negated = apply_symmetry(state, "negate")
    assert (negated["i1"], negated["i2"], negated["t"]) == (-1.0, -2.0, -3.0)
    assert negated["direction"] == "backward"

    swapped = apply_symmetry({"r": 4.0, "theta": 1.0}, "swap")
    assert swapped["r"] == 0.25
    assert swapped["theta"] == pytest.approx(TWO_PI - 1.0)

    with pytest.raises(SpiralDomainError):
        apply_symmetry({"r": 0.0, "theta": 1.0}, "swap")
    with pytest.raises(SpiralDomainError):
        apply_symmetry(state, "rotate")


def test_reverse_direction():
    assert reverse_direction("forward") == "backward"
    assert reverse_direction("bwd") == "forward"
    with pytest.raises(SpiralDomainError):
        reverse_direction("sideways")


@pytest.mark.parametrize(
    "i1, i2, theta",
    [(1.0, 1.0, math.pi - 0.3), (0.5, 1.0, 2.0), (2.0, 1.0, 4.0), (1.0, 3.0, 1.0), (0.2, 0.7, 3.5)],
)
def test_original_against_dop853(i1, i2, theta):
    beta = 0.5
    controls = {"horizon": 100.0, "rtol": 1e-11, "atol": 1e-13}
    traj = integrate(beta, "original", (i1, i2, theta), controls=controls)
    samples = traj["samples"]
    t_end = samples[-1, 0]

    sol = solve_ivp(
        lambda t, y: vector_field_original(beta, y),
        (0.0, t_end),
        [i1, i2, theta],
        method="DOP853",
        rtol=1e-11,
        atol=1e-13,
        dense_output=True,
    )
    reference = sol.sol(samples[:, 0]).T
    np.testing.assert_allclose(samples[:, 1:], reference, rtol=1e-6, atol=1e-10)


@pytest.mark.parametrize(
    "i1, i2, theta",
    [(1.0, 1.0, math.pi - 0.3), (0.5, 1.0, 2.0), (2.0, 1.0, 4.0), (1.0, 3.0, 1.0), (0.2, 0.7, 3.5)],
)
def test_recovery_against_dop853(i1, i2, theta):
    beta = 0.5
    controls = {"t_max": 100.0, "rtol": 1e-11, "atol": 1e-13}
    traj = integrate(
        beta, "reparam", {"r": i1 / i2, "theta": theta, "i2": i2}, controls=controls
    )
    recovered = recover_original(beta, traj, i2)
    assert recovered["terminal_event"]["recovered"] is True
    assert recovered["columns"] == ["t", "i1", "i2", "theta"]

    samples = recovered["samples"]
    keep = samples[:, 0] <= 100.0
    samples = samples[keep]
    t_end = samples[-1, 0]

    sol = solve_ivp(
        lambda t, y: vector_field_original(beta, y),
        (0.0, t_end),
        [i1, i2, theta],
        method="DOP853",
        rtol=1e-11,
        atol=1e-13,
        dense_output=True,
    )
    reference = sol.sol(samples[:, 0]).T
    np.testing.assert_allclose(samples[:, 1:], reference, rtol=1e-6, atol=1e-10)


def test_recovery_rescales_time():
    beta = 0.5
    traj = integrate(beta, "reparam", {"r": 0.5, "theta": 2.0, "i2": 1.0}, controls={"t_max": 10.0})
    twice = recover_original(beta, traj, 2.0)
    once = recover_original(beta, traj, 1.0)
    np.testing.assert_allclose(twice["samples"][:, 0], 0.5 * once["samples"][:, 0])
    np.testing.assert_allclose(twice["samples"][:, 2], 2.0 * once["samples"][:, 2])
    with pytest.raises(SpiralDomainError):
        recover_original(beta, traj, -1.0)


def test_blowup_detected():
    traj = integrate(0.3, "original", (-2.0, 1.0, math.pi))
    event = traj["terminal_event"]
    assert event["type"] == BLOWUP_DETECTED
    assert event["t_star"] > 0
    assert event["t_star_extrapolated"] is not None
    assert abs(event["t_star"] - event["t_star_extrapolated"]) < 0.01 * event["t_star"]
    assert event["t_star"] >= event["t"]


def test_blowup_time_of_riccati():
    # on I1 = 0, I2' = 2K'(0) I2^2 blows up at t* = -1/(2K'(0) I2)
    beta = 0.3
    t_star, component = blowup_time(beta, 0.0, 0.0, -1.0, 2.0)
    assert component == "i2"
    assert t_star == pytest.approx(-1.0 / (2.0 * kernel_limits(beta)["k1_zero"]), rel=1e-12)


def test_capture_near_symmetric_point():
    traj = integrate(0.3, "reparam", (1.05, math.pi - 0.05))
    event = traj["terminal_event"]
    assert event["type"] == EQUILIBRIUM_CAPTURED
    assert event["destination"] == "(1,pi)"
    assert traj["columns"] == ["s", "r", "theta", "L", "t"]
    assert traj["i2_at_0"] == 1.0


def test_reparam_reaches_boundary_line():
    traj = integrate(0.3, "reparam", (0.01, 5.5))
    event = traj["terminal_event"]
    assert event["type"] in (BOUNDARY_REACHED, EQUILIBRIUM_CAPTURED)
    assert event["destination"] == "(0,2pi)"


def test_horizon_reached():
    traj = integrate(0.3, "original", (1.0, 1.0, 3.1), controls={"horizon": 1.0})
    assert traj["terminal_event"]["type"] == HORIZON_REACHED
    assert traj["samples"][-1, 0] == pytest.approx(1.0)


def test_backward_time_runs_negative():
    traj = integrate(0.3, "original", (1.0, 1.0, 3.1), "backward", controls={"horizon": 0.1})
    assert np.all(np.diff(traj["samples"][:, 0]) < 0)


def test_integrate_rejects_inputs():
    with pytest.raises(SpiralDomainError, match="unknown integration controls"):
        integrate(0.3, "original", (1.0, 1.0, 1.0), controls={"stepsize": 1.0})
    with pytest.raises(SpiralDomainError):
        integrate(0.3, "original", (0.0, 0.0, 1.0))
    with pytest.raises(SpiralDomainError):
        integrate(0.3, "reparam", {"r": 1.0, "theta": 1.0, "i2": -1.0})
    with pytest.raises(SpiralDomainError):
        integrate(0.3, "newton", (1.0, 1.0, 1.0))


def test_line_destination():
    assert line_destination(0.3, 5.5, 1)[0] == "(0,2pi)"
    assert line_destination(0.3, math.pi, 1)[0] == "(0,theta2)"
    # backward time runs the other way along the line
    assert line_destination(0.3, math.pi, -1)[0] == "(0,theta3)"


def test_zeros_k_minus_k0():
    zeros = zeros_k_minus_k0(0.3)
    assert zeros[0] == 0.0 and zeros[-1] == TWO_PI
    assert len(zeros) == 5
    reflected = zeros_k_minus_k0(0.3, reflected=True)
    np.testing.assert_allclose(sorted(TWO_PI - z for z in zeros[1:-1]), reflected[1:-1])


@pytest.mark.parametrize(
    "r, boundary, heading, expected",
    [
        (0.5, 0.0, 1, "(+inf,0)"),
        (-0.5, 0.0, 1, "(-1,0)"),
        (0.5, 0.0, -1, "(0,0)"),
        (-2.0, 0.0, -1, "(-inf,0)"),
        (0.5, TWO_PI, 1, "(0,2pi)"),
        (-2.0, TWO_PI, 1, "(-inf,2pi)"),
        (0.5, TWO_PI, -1, "(+inf,2pi)"),
        (0.0, TWO_PI, -1, "(0,2pi)"),
    ],
)
def test_boundary_destination(r, boundary, heading, expected):
    assert boundary_destination(r, boundary, heading) == expected


def test_line_approach():
    beta = 0.3
    theta1, _, theta3 = zeros_k_minus_k0(beta)[1:4]
    node, limit = line_approach(beta, 1e-13, 1.0, -1)
    assert node == "(0,theta1)"
    assert limit == pytest.approx(theta1)
    # |R| grows forward in time here
    assert line_approach(beta, 1e-13, 1.0, 1) is None
    assert line_approach(beta, -1e-13, theta3 + 1e-11, -1) == ("(0,theta3)", theta3)
    assert line_approach(beta, 1e-13, 6.2, 1)[0] == "(0,2pi)"


def test_backward_run_ends_on_line():
    # the weak direction of (0, 0) keeps theta far from 0 long after R has collapsed
    beta, i1, i2, theta = 2.0, -2.904, 1.548, 3.219
    traj = integrate(beta, "reparam", {"r": i1 / i2, "theta": theta, "i2": i2}, "backward")
    event = traj["terminal_event"]
    assert event["type"] == EQUILIBRIUM_CAPTURED
    assert event["via"] == "invariant_line"
    assert event["destination"] == "(0,0)"
    assert event["r"] == 0.0 and event["theta"] == 0.0
    assert abs(event["r_exit"]) <= 1.01e-12
    assert traj["samples"][-1, 0] > -1e3


def test_recovery_extrapolates_blowup():
    beta = 0.3
    traj = integrate(beta, "reparam", (-2.0, math.pi))
    assert traj["terminal_event"]["type"] == ESCAPED_TO_INFINITY

    recovered = recover_original(beta, traj, 1.0)
    event = recovered["terminal_event"]
    assert event["extrapolated"] is True

    direct = integrate(beta, "original", (-2.0, 1.0, math.pi))["terminal_event"]
    assert direct["type"] == BLOWUP_DETECTED
    assert event["t_star"] == pytest.approx(direct["t_star"], rel=1e-2)

    samples = recovered["samples"]
    tail = np.isnan(recovered["s"])
    assert tail.sum() > 0 and not tail[0]
    assert np.all(np.diff(samples[:, 0]) >= 0)
    assert np.all(np.diff(samples[tail, 0]) > 0)
    assert np.all(samples[tail, 0] < event["t_star"])
    assert np.all(np.diff(np.abs(samples[tail, 1])) > 0)
    assert np.all(samples[tail, 1] < 0)


def test_recovery_without_blowup_is_not_extrapolated():
    beta = 0.3
    traj = integrate(beta, "reparam", (1.05, math.pi - 0.05))
    recovered = recover_original(beta, traj, 1.0)
    assert recovered["terminal_event"]["extrapolated"] is False
    assert "t_star" not in recovered["terminal_event"]
    assert len(recovered["samples"]) == len(traj["samples"])
    assert not np.isnan(recovered["s"]).any()


def test_locate_logs_missing_sign_change(caplog):
    from ..dynamics import _locate

    with caplog.at_level("DEBUG"):
        t = _locate(lambda t: np.array([1.0 + t]), lambda z: z[0], 0.0, 1.0)
    assert t == 1.0
    assert "No sign change" in caplog.text
