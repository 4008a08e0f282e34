"""
This module provides the vector fields of the spiral system in its three
formulations and an event-driven integrator for them.

- original:   (I1, I2, theta) in time t
- reparam:    (R, theta) = (I1/I2, theta) in time s with ds/dt = I2
- log-scaled: (A, theta) with R = sign * exp(A), same time s

Reparametrized runs carry two quadratures along with (R, theta):
L = log(I2/I2(0)) and the original time t, so trajectories in s can be
mapped back to the original variables.

"""

# ==============================================================================
# IMPORTS

import collections
import logging
import math

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import brentq

from .criticality import (
    _theta_stars,
    solve_asymmetric_fixed_point,
)
from .kernel import _kernel_pair_scalar, check_beta, kernel_limits
from .utils._errors import (
    NearCriticalError,
    RootNotFoundError,
    SpiralDomainError,
    StepSizeError,
)

# ==============================================================================
# CONSTANTS

TWO_PI = 2.0 * math.pi

DEFAULT_CONTROLS = {
    "rtol": 1e-9,
    "atol": 1e-12,
    "horizon": 1e3,
    "t_max": None,
    "escape_radius": 1e6,
    "capture_radius": 1e-6,
    "capture_steps": 10,
    "blowup_threshold": 1e9,
    "boundary_tol": 1e-10,
    "line_radius": 1e-12,
    "max_steps": 200000,
}

# chart switching thresholds on |R|
LOG_ENTER_HIGH = 10.0
LOG_ENTER_LOW = 0.1
LOG_LEAVE_HIGH = 5.0
LOG_LEAVE_LOW = 0.2

# keeps kernel arguments inside the open fundamental domain
THETA_CLIP = 1e-12

HORIZON_REACHED = "horizon_reached"
EQUILIBRIUM_CAPTURED = "equilibrium_captured"
ESCAPED_TO_INFINITY = "escaped_to_infinity"
BLOWUP_DETECTED = "blowup_detected"
BOUNDARY_REACHED = "boundary_reached"

# halvings of the distance to t* appended by an extrapolated recovery
TAIL_ROWS = 30

REPARAM_COLUMNS = ["s", "r", "theta", "L", "t"]
ORIGINAL_COLUMNS = ["t", "i1", "i2", "theta"]

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# vector fields


def _clip(theta):
    return min(max(theta, THETA_CLIP), TWO_PI - THETA_CLIP)


def _check_open_theta(theta):
    theta = float(theta)
    if not 0.0 < theta < TWO_PI:
        raise SpiralDomainError(
            "ERROR: theta must lie strictly inside (0, 2*pi), got " + repr(theta)
        )
    return theta


def vector_field_original(beta, state):
    """
    Right-hand side of the original system.

    I1' = 2K'(0) I1^2 + 2K'(theta) I1 I2
    I2' = 2K'(0) I2^2 + 2K'(-theta) I1 I2
    theta' = 2(K(0) - K(-theta)) I1 + 2(K(theta) - K(0)) I2

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    state : sequence of float
        (I1, I2, theta) with theta in (0, 2*pi).

    Returns
    -------
    tuple of float
        (dI1, dI2, dtheta).
    """
    beta = check_beta(beta)
    i1, i2, theta = (float(v) for v in state)
    theta = _check_open_theta(theta)
    return _rhs_original(beta, i1, i2, theta)


def _rhs_original(beta, i1, i2, theta):
    lim = kernel_limits(beta)
    k0, k10 = lim["k0"], lim["k1_zero"]
    k, k1, _, km, k1m, _ = _kernel_pair_scalar(beta, _clip(theta))
    di1 = 2.0 * k10 * i1 * i1 + 2.0 * k1 * i1 * i2
    di2 = 2.0 * k10 * i2 * i2 + 2.0 * k1m * i1 * i2
    dtheta = 2.0 * (k0 - km) * i1 + 2.0 * (k - k0) * i2
    return di1, di2, dtheta


def vector_field_reparam(beta, r, theta):
    """
    Right-hand side of the planar system in reparametrized time.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    r : float
        Ratio R = I1/I2.
    theta : float
        Angle in (0, 2*pi).

    Returns
    -------
    tuple of float
        (dR, dtheta); dR vanishes on the invariant line R = 0.
    """
    beta = check_beta(beta)
    theta = _check_open_theta(theta)
    return _rhs_reparam(beta, float(r), theta)[:2]


def _rhs_reparam(beta, r, theta):
    # (dR, dtheta, dL) at a point of the planar system
    lim = kernel_limits(beta)
    k0, k10 = lim["k0"], lim["k1_zero"]
    k, k1, _, km, k1m, _ = _kernel_pair_scalar(beta, _clip(theta))
    slope = 2.0 * (k10 - k1m) * r + 2.0 * (k1 - k10)
    dtheta = 2.0 * (k0 - km) * r + 2.0 * (k - k0)
    dl = 2.0 * k10 + 2.0 * k1m * r
    return slope * r, dtheta, dl, slope


def vector_field_log(beta, a, theta, sign):
    """
    Right-hand side of the log-scaled system, R = sign * exp(A).

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    a : float
        Log-modulus A = log|R|.
    theta : float
        Angle in (0, 2*pi).
    sign : {1, -1}
        Sheet of the phase plane (R > 0 or R < 0).

    Returns
    -------
    tuple of float
        (dA, dtheta).
    """
    beta = check_beta(beta)
    theta = _check_open_theta(theta)
    if sign not in (1, -1):
        raise SpiralDomainError("ERROR: sign must be +1 or -1")
    r = sign * math.exp(float(a))
    _, dtheta, _, slope = _rhs_reparam(beta, r, theta)
    return slope, dtheta


# ------------------------------------------------------------------------------
# symmetries


def apply_symmetry(obj, which):
    """
    Apply one of the discrete symmetries of the system.

    'negate' maps (I1, I2, theta, t) to (-I1, -I2, theta, -t): the image
    obeys the same equations with time reversed. 'swap' maps (R, theta) to
    (1/R, 2*pi - theta), exchanging the two branches.

    Parameters
    ----------
    obj : dict
        A state (keys 'i1', 'i2', 'theta' and optionally 't' and 'direction',
        or 'r', 'theta'), or a trajectory as returned by `integrate`.
    which : {'negate', 'swap'}
        Symmetry to apply.

    Returns
    -------
    dict
        The transformed copy.

    Raises
    ------
    SpiralDomainError
        For 'swap' on the line R = 0, or an unknown symmetry.
    """
    if which not in ("negate", "swap"):
        raise SpiralDomainError("ERROR: unknown symmetry " + repr(which))

    if "samples" in obj:
        return _symmetry_trajectory(obj, which)

    out = dict(obj)
    if which == "negate":
        out["i1"] = -obj["i1"]
        out["i2"] = -obj["i2"]
        if "t" in obj:
            out["t"] = -obj["t"]
        if "direction" in obj:
            out["direction"] = reverse_direction(obj["direction"])
    else:
        if obj["r"] == 0:
            raise SpiralDomainError("ERROR: the swap symmetry is undefined at R = 0")
        out["r"] = 1.0 / obj["r"]
        out["theta"] = TWO_PI - obj["theta"]
    return out


def _symmetry_trajectory(traj, which):
    out = dict(traj)
    samples = np.array(traj["samples"], dtype=float, copy=True)
    cols = {name: i for i, name in enumerate(traj["columns"])}

    if which == "negate":
        if traj["system"] != "original":
            raise SpiralDomainError(
                "ERROR: the negate symmetry acts on original-system trajectories"
            )
        samples[:, cols["i1"]] *= -1.0
        samples[:, cols["i2"]] *= -1.0
        samples[:, cols["t"]] *= -1.0
        out["direction"] = reverse_direction(traj["direction"])
    else:
        if traj["system"] != "reparam":
            raise SpiralDomainError(
                "ERROR: the swap symmetry acts on reparametrized trajectories"
            )
        if np.any(samples[:, cols["r"]] == 0):
            raise SpiralDomainError("ERROR: the swap symmetry is undefined at R = 0")
        samples[:, cols["r"]] = 1.0 / samples[:, cols["r"]]
        samples[:, cols["theta"]] = TWO_PI - samples[:, cols["theta"]]

    out["samples"] = samples
    return out


def reverse_direction(direction):
    """Return the opposite integration direction."""
    return {"forward": "backward", "backward": "forward"}[_check_direction(direction)]


def _check_direction(direction):
    aliases = {
        "forward": "forward",
        "fwd": "forward",
        "backward": "backward",
        "bwd": "backward",
    }
    if direction not in aliases:
        raise SpiralDomainError("ERROR: unknown direction " + repr(direction))
    return aliases[direction]


# ------------------------------------------------------------------------------
# destinations on the invariant lines and at infinity


def zeros_k_minus_k0(beta, reflected=False):
    """
    Sorted zeros of K(theta) - K(0) on [0, 2*pi], endpoints included.

    With `reflected` the zeros of K(-theta) - K(0), i.e. 2*pi - theta_i.
    """
    thetas, _ = _theta_stars(beta)
    if reflected:
        thetas = [TWO_PI - t for t in thetas]
    return [0.0] + sorted(thetas) + [TWO_PI]


def _next_zero(zeros, theta, heading):
    if heading > 0:
        ahead = [z for z in zeros if z > theta]
        return min(ahead) if ahead else TWO_PI
    if heading < 0:
        behind = [z for z in zeros if z < theta]
        return max(behind) if behind else 0.0
    return min(zeros, key=lambda z: abs(z - theta))


def _angle_tag(beta, theta, reflected):
    # name of an angle among 0, 2pi, theta_i or 2pi - theta_i
    if theta <= 0.0:
        return "0"
    if theta >= TWO_PI:
        return "2pi"
    thetas, _ = _theta_stars(beta)
    labels = ["theta1", "theta2", "theta3"][3 - len(thetas) :]
    for label, value in zip(labels, thetas):
        target = TWO_PI - value if reflected else value
        if abs(target - theta) < 1e-9:
            return ("2pi-" + label) if reflected else label
    return repr(theta)


def line_destination(beta, theta, heading, at_infinity=False, sign=1):
    """
    Limit of the flow along R = 0 or along the compactified line R = +-inf.

    Along R = 0 the angle moves with sign(K(theta) - K(0)) and stops at the
    next zero of K - K(0). Along R = sign*inf it moves with
    sign((K(0) - K(-theta)) * sign) and stops at the next zero of
    K(-theta) - K(0). `heading` is +1 in forward time and -1 in backward time.

    Returns
    -------
    tuple
        (equilibrium id, limit angle).
    """
    beta = check_beta(beta)
    lim = kernel_limits(beta)
    k, _, _, km, _, _ = _kernel_pair_scalar(beta, _clip(theta))

    if at_infinity:
        speed = (lim["k0"] - km) * sign
        zeros = zeros_k_minus_k0(beta, reflected=True)
    else:
        speed = k - lim["k0"]
        zeros = zeros_k_minus_k0(beta)

    limit = _next_zero(zeros, theta, np.sign(speed) * heading)
    tag = _angle_tag(beta, limit, reflected=at_infinity)
    if at_infinity:
        node = "(" + ("+inf" if sign > 0 else "-inf") + "," + tag + ")"
    else:
        node = "(0," + tag + ")"
    return node, limit


def boundary_destination(r, boundary, heading):
    """
    Limit of the flow on the invariant boundary lines theta = 0 and 2*pi.

    On theta = 0, R' = 2d R (R + 1); on theta = 2*pi, R' = -2d R (R + 1),
    with d = 1/(2(1 + beta^2)) > 0.

    Parameters
    ----------
    r : float
        Ratio R at the contact.
    boundary : {0, 2*pi}
        The boundary line.
    heading : {1, -1}
        Forward or backward time.

    Returns
    -------
    str
        Equilibrium id of the limit point.
    """
    at_zero = boundary < math.pi
    grows = heading > 0 if at_zero else heading < 0
    line = "0" if at_zero else "2pi"
    if r == 0.0:
        return "(0," + line + ")"
    if grows:
        # R > 0 runs off to +inf, R < 0 settles on -1
        if at_zero:
            return "(+inf,0)" if r > 0 else "(-1,0)"
        return "(+inf,2pi)" if r > 0 else "(-1,2pi)"
    if r > -1.0:
        return "(0," + line + ")"
    return "(-inf," + line + ")"


def line_approach(beta, r, theta, heading, snap=1e-9):
    """
    End point of an orbit that has come within reach of the line R = 0.

    The orbit is accepted when |R| still shrinks and the limit angle on
    the line attracts transversally in the direction of time, i.e.
    (K'(theta0) - K'(0)) * heading < 0. An angle within `snap` of a zero of
    K - K(0) is taken to be that zero.

    Returns
    -------
    tuple or None
        (equilibrium id, limit angle), or None if the orbit will leave the
        line again.
    """
    _, _, _, slope = _rhs_reparam(beta, r, _clip(theta))
    if slope * heading >= 0:
        return None

    zeros = zeros_k_minus_k0(beta)
    nearest = min(zeros, key=lambda z: abs(z - theta))
    if abs(nearest - theta) < snap:
        node, limit = "(0," + _angle_tag(beta, nearest, False) + ")", nearest
    else:
        node, limit = line_destination(beta, theta, heading)

    k1_limit = _kernel_pair_scalar(beta, _clip(limit))[1]
    if (k1_limit - kernel_limits(beta)["k1_zero"]) * heading >= 0:
        return None
    return node, limit


# ------------------------------------------------------------------------------
# capture candidates


def _finite_candidates(beta):
    candidates = [("(1,pi)", 1.0, math.pi)]
    try:
        asym = solve_asymmetric_fixed_point(beta)
    except (NearCriticalError, RootNotFoundError):
        asym = None
    if asym is not None:
        candidates.append(("(Rbar,thetabar)", asym["r_bar"], asym["theta_bar"]))
        candidates.append(
            ("(1/Rbar,2pi-thetabar)", 1.0 / asym["r_bar"], TWO_PI - asym["theta_bar"])
        )
    thetas, _ = _theta_stars(beta)
    labels = ["theta1", "theta2", "theta3"][3 - len(thetas) :]
    for label, theta in zip(labels, thetas):
        candidates.append(("(0," + label + ")", 0.0, theta))
    candidates.append(("(0,0)", 0.0, 0.0))
    candidates.append(("(0,2pi)", 0.0, TWO_PI))
    candidates.append(("(-1,0)", -1.0, 0.0))
    candidates.append(("(-1,2pi)", -1.0, TWO_PI))
    return candidates


# ------------------------------------------------------------------------------
# integration


def _merge_controls(controls):
    merged = dict(DEFAULT_CONTROLS)
    if controls:
        unknown = set(controls) - set(DEFAULT_CONTROLS)
        if unknown:
            raise SpiralDomainError(
                "ERROR: unknown integration controls: " + ", ".join(sorted(unknown))
            )
        for key, value in controls.items():
            if value is not None or key == "t_max":
                merged[key] = value
    return merged


def _initial_state(system, initial):
    if isinstance(initial, dict):
        state = dict(initial)
    elif system == "original":
        state = dict(zip(("i1", "i2", "theta"), initial))
    else:
        state = dict(zip(("r", "theta", "i2"), initial))

    state["theta"] = _check_open_theta(state["theta"])
    if system == "original":
        state["i1"] = float(state["i1"])
        state["i2"] = float(state["i2"])
        if state["i1"] == 0.0 and state["i2"] == 0.0:
            raise SpiralDomainError("ERROR: I1 and I2 cannot both be zero")
    else:
        state["r"] = float(state["r"])
        state["i2"] = float(state.get("i2", 1.0))
        if not math.isfinite(state["r"]):
            raise SpiralDomainError("ERROR: initial R must be finite")
        if not state["i2"] > 0.0:
            raise SpiralDomainError(
                "ERROR: reparametrized runs need I2(0) > 0; apply the negate symmetry first"
            )
    return state


def integrate(beta, system, initial, direction="forward", controls=None):
    """
    Integrate the original or the reparametrized system until a terminal event.

    The stepper is the Dormand-Prince 5(4) pair (`scipy.integrate.RK45`),
    stepped manually. After every accepted step the events below are tested
    in this order, and located on the dense output with Brent's method:

    - boundary contact: theta within `boundary_tol` of 0 or 2*pi; the limit
      point follows from the flow on the invariant boundary line.
    - escape (reparametrized): |R| above `escape_radius` and growing; the
      limit angle follows from the flow along the compactified line.
    - blowup (original): max(|I1|, |I2|) above `blowup_threshold`; the
      blowup time is extrapolated as t* = t + I/I' of the dominant component.
    - capture (reparametrized): distance to a finite equilibrium below
      `capture_radius`, non-increasing over the last `capture_steps` steps.
    - horizon: `horizon` in the integration variable, `t_max` in original
      time, or `max_steps`.

    Reparametrized runs switch to the log-scaled chart when |R| > 10 or
    0 < |R| < 0.1 and back when 0.2 < |R| < 5.

    Parameters
    ----------
    beta : float
        Spiral shape parameter; positive for the reparametrized system.
    system : {'original', 'reparam'}
        Formulation to integrate.
    initial : dict or sequence
        Original: (i1, i2, theta). Reparametrized: (r, theta[, i2]) with
        i2 = I2(0) > 0 (default 1) setting the time scale of the t quadrature.
    direction : {'forward', 'backward'}, default: 'forward'
        Direction of original time (and of s, since I2 > 0).
    controls : dict, default: None
        Overrides of `DEFAULT_CONTROLS`.

    Returns
    -------
    dict
        Trajectory with keys 'system', 'beta', 'direction', 'controls',
        'columns', 'samples' (numpy array, one row per accepted step),
        'initial', 'terminal_event' and, for reparametrized runs, 'i2_at_0'.

    Raises
    ------
    SpiralDomainError
        For invalid inputs.
    StepSizeError
        If the step size underflows.
    """
    beta = check_beta(beta)
    if system not in ("original", "reparam"):
        raise SpiralDomainError("ERROR: unknown system " + repr(system))
    direction = _check_direction(direction)
    ctrl = _merge_controls(controls)
    state = _initial_state(system, initial)

    logging.debug(
        "Integrating %s system, beta = %r, %s, initial %r",
        system,
        beta,
        direction,
        state,
    )

    if system == "original":
        result = _integrate_original(beta, state, direction, ctrl)
    else:
        if beta < 0:
            raise SpiralDomainError(
                "ERROR: the reparametrized system is integrated for beta > 0; "
                "map negative beta by reflection first"
            )
        result = _integrate_reparam(beta, state, direction, ctrl)

    logging.debug("Terminal event: %r", result["terminal_event"])

    return result


def _locate(dense, g, t_old, t_new):
    # first zero of g along the dense output on the step [t_old, t_new]
    def h(t):
        return g(dense(t))

    try:
        return brentq(h, t_old, t_new, xtol=1e-13, rtol=4 * np.finfo(float).eps)
    except ValueError as e:
        logging.debug(
            "No sign change on [%r, %r] (g = %r, %r), using the step end: %s",
            t_old,
            t_new,
            h(t_old),
            h(t_new),
            e,
        )
        return t_new


def _step(solver):
    message = solver.step()
    if solver.status == "failed":
        raise StepSizeError(
            "ERROR: integration failed at "
            + repr(solver.t)
            + ": "
            + str(message),
            last_state=(solver.t, np.array(solver.y, copy=True)),
        )
    return solver.status == "finished"


def _trajectory(system, beta, direction, ctrl, initial, columns, rows, event):
    traj = dict()
    traj["system"] = system
    traj["beta"] = beta
    traj["direction"] = direction
    traj["controls"] = dict(ctrl)
    traj["initial"] = initial
    traj["columns"] = list(columns)
    traj["samples"] = np.array(rows, dtype=float)
    traj["terminal_event"] = event
    return traj


def _integrate_original(beta, state, direction, ctrl):
    heading = 1.0 if direction == "forward" else -1.0
    tol_b = ctrl["boundary_tol"]
    threshold = ctrl["blowup_threshold"]
    horizon = ctrl["t_max"] if ctrl["t_max"] is not None else ctrl["horizon"]

    def fun(t, y):
        return np.array(_rhs_original(beta, y[0], y[1], y[2]))

    y0 = np.array([state["i1"], state["i2"], state["theta"]])
    solver = RK45(
        fun, 0.0, y0, heading * horizon, rtol=ctrl["rtol"], atol=ctrl["atol"]
    )
    rows = [[0.0, y0[0], y0[1], y0[2]]]
    event = None

    def bound_lo(y):
        return y[2] - tol_b

    def bound_hi(y):
        return TWO_PI - tol_b - y[2]

    def size(y):
        return max(abs(y[0]), abs(y[1])) - threshold

    for _ in range(int(ctrl["max_steps"])):
        t_old = solver.t
        finished = _step(solver)
        t_new, y = solver.t, solver.y

        hit = None
        if bound_lo(y) <= 0 or bound_hi(y) <= 0:
            g = bound_lo if bound_lo(y) <= 0 else bound_hi
            hit = ("boundary", _locate(solver.dense_output(), g, t_old, t_new))
        elif size(y) >= 0:
            hit = ("blowup", _locate(solver.dense_output(), size, t_old, t_new))

        if hit is not None:
            t_hit = hit[1]
            y_hit = solver.dense_output()(t_hit)
            rows.append([t_hit, y_hit[0], y_hit[1], y_hit[2]])
            if hit[0] == "boundary":
                event = {
                    "type": BOUNDARY_REACHED,
                    "boundary": 0.0 if y_hit[2] < math.pi else TWO_PI,
                    "t": t_hit,
                }
            else:
                event = _blowup_event(beta, t_hit, y_hit, rows)
            break

        rows.append([t_new, y[0], y[1], y[2]])
        if finished:
            event = {"type": HORIZON_REACHED, "reason": "horizon", "t": t_new}
            break

    if event is None:
        event = {"type": HORIZON_REACHED, "reason": "max_steps", "t": rows[-1][0]}

    return _trajectory(
        "original", beta, direction, ctrl, state, ORIGINAL_COLUMNS, rows, event
    )


def blowup_time(beta, t, i1, i2, theta):
    """
    Extrapolate a blowup time from one state: t* = t + I/I' of the dominant
    component, exact when I ~ C/(t* - t).
    """
    d1, d2, _ = _rhs_original(beta, i1, i2, theta)
    if abs(i1) >= abs(i2):
        return t + i1 / d1, "i1"
    return t + i2 / d2, "i2"


def _blowup_event(beta, t_hit, y_hit, rows):
    t_star, component = blowup_time(beta, t_hit, y_hit[0], y_hit[1], y_hit[2])

    # linear extrapolation of 1/I1 from the last two samples
    t_lin = None
    if len(rows) >= 3:
        (ta, ia), (tb, ib) = (rows[-2][0], rows[-2][1]), (rows[-1][0], rows[-1][1])
        if ia != 0 and ib != 0 and tb != ta:
            ua, ub = 1.0 / ia, 1.0 / ib
            slope = (ub - ua) / (tb - ta)
            if slope != 0:
                t_lin = tb - ub / slope

    event = dict()
    event["type"] = BLOWUP_DETECTED
    event["t"] = t_hit
    event["t_star"] = t_star
    event["t_star_extrapolated"] = t_lin
    event["component"] = component
    return event


def _integrate_reparam(beta, state, direction, ctrl):
    heading = 1.0 if direction == "forward" else -1.0
    i2_0 = state["i2"]
    tol_b = ctrl["boundary_tol"]
    log_escape = math.log(ctrl["escape_radius"])
    log_line = math.log(ctrl["line_radius"])
    t_max = ctrl["t_max"]
    n_capture = int(ctrl["capture_steps"])
    candidates = _finite_candidates(beta)

    def make_fun(chart):
        sigma = {"log+": 1.0, "log-": -1.0}.get(chart)

        def fun(s, y):
            theta = y[1]
            r = y[0] if sigma is None else sigma * math.exp(min(y[0], 700.0))
            dr, dtheta, dl, slope = _rhs_reparam(beta, r, theta)
            dt = math.exp(min(-y[2], 700.0)) / i2_0
            return np.array([dr if sigma is None else slope, dtheta, dl, dt])

        return fun

    def to_r(chart, y0):
        if chart == "linear":
            return y0
        return (1.0 if chart == "log+" else -1.0) * math.exp(min(y0, 700.0))

    def choose_chart(chart, r):
        if r == 0.0:
            return "linear"
        if chart == "linear":
            if abs(r) > LOG_ENTER_HIGH or abs(r) < LOG_ENTER_LOW:
                return "log+" if r > 0 else "log-"
            return "linear"
        if LOG_LEAVE_LOW < abs(r) < LOG_LEAVE_HIGH:
            return "linear"
        return chart

    def to_y(chart, r, theta, big_l, t):
        first = r if chart == "linear" else math.log(abs(r))
        return np.array([first, theta, big_l, t])

    s_bound = heading * ctrl["horizon"]
    chart = choose_chart("linear", state["r"])
    y = to_y(chart, state["r"], state["theta"], 0.0, 0.0)

    def new_solver(s0, y0):
        return RK45(
            make_fun(chart),
            s0,
            y0,
            s_bound,
            rtol=ctrl["rtol"],
            atol=ctrl["atol"],
        )

    solver = new_solver(0.0, y)
    rows = [[0.0, state["r"], state["theta"], 0.0, 0.0]]
    history = collections.deque(maxlen=n_capture + 1)
    history.append((state["r"], state["theta"]))
    event = None

    for _ in range(int(ctrl["max_steps"])):
        s_old = solver.t
        finished = _step(solver)
        s_new, y = solver.t, solver.y
        r = to_r(chart, y[0])

        checks = []

        def bound_lo(z):
            return z[1] - tol_b

        def bound_hi(z):
            return TWO_PI - tol_b - z[1]

        checks.append(("boundary", bound_lo))
        checks.append(("boundary", bound_hi))
        if chart != "linear":

            def escape(z):
                return log_escape - z[0]

            checks.append(("escape", escape))

            def line(z):
                return z[0] - log_line

            checks.append(("line", line))
        else:

            def escape_lin(z):
                return ctrl["escape_radius"] - abs(z[0])

            checks.append(("escape", escape_lin))
        if t_max is not None:

            def t_limit(z):
                return t_max - abs(z[3])

            checks.append(("t_max", t_limit))

        hit = None
        for name, g in checks:
            if g(y) > 0:
                continue
            if name == "escape":
                _, _, _, slope = _rhs_reparam(beta, r, _clip(y[1]))
                if slope * heading <= 0:
                    continue
            if name == "line":
                approach = line_approach(beta, r, y[1], heading)
                if approach is None:
                    continue
            s_hit = _locate(solver.dense_output(), g, s_old, s_new)
            hit = (name, s_hit)
            break

        if hit is not None:
            name, s_hit = hit
            z = solver.dense_output()(s_hit)
            r_hit, theta_hit = to_r(chart, z[0]), z[1]
            rows.append([s_hit, r_hit, theta_hit, z[2], z[3]])
            if name == "boundary":
                boundary = 0.0 if theta_hit < math.pi else TWO_PI
                event = {
                    "type": BOUNDARY_REACHED,
                    "boundary": boundary,
                    "destination": boundary_destination(r_hit, boundary, heading),
                    "r": r_hit,
                    "theta": theta_hit,
                }
            elif name == "escape":
                sign = 1 if r_hit > 0 else -1
                node, limit = line_destination(
                    beta, theta_hit, heading, at_infinity=True, sign=sign
                )
                event = {
                    "type": ESCAPED_TO_INFINITY,
                    "destination": node,
                    "sign": sign,
                    "theta_limit": limit,
                    "r": r_hit,
                    "theta": theta_hit,
                }
            elif name == "line":
                node, limit = line_approach(beta, r_hit, theta_hit, heading) or approach
                logging.debug(
                    "Line R = 0 reached at s = %r, R = %r, theta = %r -> %s",
                    s_hit,
                    r_hit,
                    theta_hit,
                    node,
                )
                event = {
                    "type": EQUILIBRIUM_CAPTURED,
                    "destination": node,
                    "r": 0.0,
                    "theta": limit,
                    "distance": math.hypot(r_hit, theta_hit - limit),
                    "via": "invariant_line",
                    "r_exit": r_hit,
                    "theta_exit": theta_hit,
                }
            else:
                event = {
                    "type": HORIZON_REACHED,
                    "reason": "t_max",
                    "r": r_hit,
                    "theta": theta_hit,
                }
            break

        rows.append([s_new, r, y[1], y[2], y[3]])
        history.append((r, y[1]))

        captured = _capture(candidates, history, ctrl["capture_radius"], n_capture)
        if captured is not None:
            node, cr, ctheta, dist = captured
            event = {
                "type": EQUILIBRIUM_CAPTURED,
                "destination": node,
                "r": cr,
                "theta": ctheta,
                "distance": dist,
            }
            break

        if finished:
            event = {
                "type": HORIZON_REACHED,
                "reason": "horizon",
                "r": r,
                "theta": y[1],
            }
            break

        new_chart = choose_chart(chart, r)
        if new_chart != chart:
            logging.debug(
                "Chart %s -> %s at s = %r, R = %r", chart, new_chart, s_new, r
            )
            chart = new_chart
            solver = new_solver(s_new, to_y(chart, r, y[1], y[2], y[3]))

    if event is None:
        last = rows[-1]
        event = {
            "type": HORIZON_REACHED,
            "reason": "max_steps",
            "r": last[1],
            "theta": last[2],
        }

    traj = _trajectory(
        "reparam", beta, direction, ctrl, state, REPARAM_COLUMNS, rows, event
    )
    traj["i2_at_0"] = i2_0
    return traj


def _capture(candidates, history, radius, n_capture):
    if len(history) < n_capture + 1:
        return None
    r, theta = history[-1]
    best = min(candidates, key=lambda c: math.hypot(r - c[1], theta - c[2]))
    dist = math.hypot(r - best[1], theta - best[2])
    if dist >= radius:
        return None
    dists = [math.hypot(hr - best[1], ht - best[2]) for hr, ht in history]
    if all(b <= a * (1.0 + 1e-9) + 1e-15 for a, b in zip(dists[:-1], dists[1:])):
        return best[0], best[1], best[2], dist
    return None


# ------------------------------------------------------------------------------
# recovery of the original variables


def recover_original(beta, trajectory, i2_at_0):
    """
    Map a reparametrized trajectory back to the original variables.

    The run carries L = log(I2/I2(0)) and t as quadratures in s, so
    I2 = i2_at_0 * exp(L), I1 = R * I2 and the time rescales as
    t -> t * I2_run(0) / i2_at_0.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    trajectory : dict
        A reparametrized trajectory from `integrate`.
    i2_at_0 : float
        Initial branch strength I2(0) > 0 of the original problem.

    Returns
    -------
    dict
        Original-system trajectory with columns t, i1, i2, theta (and the
        pseudo-time s kept in 's').
    """
    beta = check_beta(beta)
    if trajectory["system"] != "reparam":
        raise SpiralDomainError(
            "ERROR: recover_original needs a reparametrized trajectory"
        )
    i2_at_0 = float(i2_at_0)
    if not i2_at_0 > 0:
        raise SpiralDomainError(
            "ERROR: recovery needs I2(0) > 0; apply the negate symmetry first"
        )

    samples = np.asarray(trajectory["samples"], dtype=float)
    s, r, theta, big_l, t = (samples[:, i] for i in range(5))

    with np.errstate(over="ignore"):
        i2 = i2_at_0 * np.exp(big_l)
    i1 = r * i2
    t_new = t * trajectory["i2_at_0"] / i2_at_0

    out = dict()
    out["system"] = "original"
    out["beta"] = beta
    out["direction"] = trajectory["direction"]
    out["controls"] = dict(trajectory["controls"])
    out["initial"] = {"i1": r[0] * i2_at_0, "i2": i2_at_0, "theta": theta[0]}
    out["columns"] = list(ORIGINAL_COLUMNS)
    out["terminal_event"] = dict(trajectory["terminal_event"])
    out["terminal_event"]["recovered"] = True
    out["terminal_event"]["extrapolated"] = False

    tail = _asymptotic_tail(
        beta,
        out["terminal_event"],
        trajectory["direction"],
        (t_new[-1], i1[-1], i2[-1]),
    )
    samples = np.column_stack([t_new, i1, i2, theta])
    if tail is not None:
        t_star, rows = tail
        samples = np.vstack([samples, rows])
        s = np.concatenate([s, np.full(len(rows), np.nan)])
        out["terminal_event"]["extrapolated"] = True
        out["terminal_event"]["t_star"] = t_star
        logging.debug("Recovery extrapolated to t* = %r", t_star)
    out["samples"] = samples
    out["s"] = s
    return out


def _limit_point(event):
    # (R, theta) the reduced orbit ends on, R possibly +-inf
    kind = event["type"]
    if kind == EQUILIBRIUM_CAPTURED:
        return float(event["r"]), float(event["theta"])
    if kind == ESCAPED_TO_INFINITY:
        return math.copysign(math.inf, event["sign"]), float(event["theta_limit"])
    if kind == BOUNDARY_REACHED:
        r_part = event["destination"][1:-1].split(",", 1)[0]
        return float(r_part), float(event["boundary"])
    return None


def _asymptotic_tail(beta, event, direction, last, n_rows=TAIL_ROWS):
    """
    Closed-form continuation of a recovered run that ends in blowup.

    Near the limit point (R0, theta0) the dominant strength obeys a scalar
    Riccati equation I' = a I^2, so I = I_last * f with
    f = (t* - t_last) / (t* - t) and t* = t_last + 1/(a I_last). The other
    strength follows f^p: p = 1 for finite R0 != 0, p = K'(theta0)/K'(0)
    for R0 = 0 and p = K'(-theta0)/K'(0) for R0 = +-inf.

    Returns
    -------
    tuple or None
        (t*, rows of t, i1, i2, theta), or None if the run does not blow up
        in its direction of time.
    """
    limit = _limit_point(event)
    if limit is None:
        return None
    r0, theta0 = limit
    heading = 1.0 if direction == "forward" else -1.0
    t_last, i1_last, i2_last = last
    k10 = kernel_limits(beta)["k1_zero"]
    _, k1, _, _, k1m, _ = _kernel_pair_scalar(beta, _clip(theta0))

    if math.isinf(r0):
        a, base = 2.0 * k10, i1_last
    elif r0 == 0.0:
        a, base = 2.0 * k10, i2_last
    else:
        a, base = 2.0 * (k10 + k1m * r0), i2_last
    if a == 0.0 or base == 0.0 or not math.isfinite(base):
        return None
    dt_star = 1.0 / (a * base)
    if not (math.isfinite(dt_star) and dt_star * heading > 0):
        return None
    t_star = t_last + dt_star

    f = 2.0 ** np.arange(1, n_rows + 1)
    t_tail = t_star - dt_star / f
    if math.isinf(r0):
        i1_tail, i2_tail = i1_last * f, i2_last * f ** (k1m / k10)
    elif r0 == 0.0:
        i1_tail, i2_tail = i1_last * f ** (k1 / k10), i2_last * f
    else:
        i1_tail, i2_tail = i1_last * f, i2_last * f
    rows = np.column_stack([t_tail, i1_tail, i2_tail, np.full(n_rows, theta0)])
    return t_star, rows
