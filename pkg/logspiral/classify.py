"""
This module provides the long-time classification of spiral configurations:
the behaviour class and asymptotic rates of a single initial datum, the
predicted heteroclinic graph of each band of the shape parameter, and
basin sweeps over the phase plane.

Classification reduces every datum to beta > 0 and I2(0) > 0 using the
reflection (beta, theta, t) -> (-beta, 2*pi - theta, -t) and the negation
(I1, I2, t) -> (-I1, -I2, -t), integrates the reparametrized system to its
destination and reads the case off the destination and the direction.

"""

# ==============================================================================
# IMPORTS

import logging
import math

import numpy as np

from .criticality import (
    _theta_stars,
    band_index,
    band_label,
    guard_critical,
    solve_asymmetric_fixed_point,
)
from .dynamics import (
    EQUILIBRIUM_CAPTURED,
    HORIZON_REACHED,
    TWO_PI,
    _check_direction,
    integrate,
    line_destination,
    reverse_direction,
)
from .equilibria import ATTRACTOR, REPELLER, list_equilibria
from .kernel import _kernel_pair_scalar, check_beta, kernel_limits
from .utils._errors import (
    SpiralDomainError,
    StepSizeError,
    UnresolvedDestinationError,
)

# ==============================================================================
# CONSTANTS

CLASSIFY_GUARD = 1e-4
CLASSIFY_CRITICAL = ("beta0", "beta_star", "beta2", "beta3")

INTERPRETATION_FLAG = "interpreted_k_equals_k0"
SADDLE_DESTINED = "boundary/saddle-destined"
INVARIANT_LINE = "invariant-line"

POWER_T = "power_t"
POWER_T_STAR = "power_t_star"
LOG_EXPONENT = "log_exponent"

FORWARD_CASES = {
    "(1,pi)": "1",
    "(Rbar,thetabar)": "2",
    "(1/Rbar,2pi-thetabar)": "2'",
    "(0,2pi)": "3",
    "(+inf,0)": "3'",
    "(-1,2pi)": "4",
}
BACKWARD_CASES = {
    "(1,pi)": "6",
    "(Rbar,thetabar)": "7",
    "(1/Rbar,2pi-thetabar)": "7'",
    "(-1,0)": "9",
    "(-inf,0)": "10",
}
FINITE_TIME_CASES = ("5", "6", "7", "7'", "8", "8'")
INTERPRETED_CASES = ("5", "8", "8'")

BAND_LABELS = (
    "(0,beta0)",
    "(beta0,beta1)",
    "(beta1,beta_star)",
    "(beta_star,beta2)",
    "(beta2,1)",
    "(1,beta3)",
    "(beta3,inf)",
)

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# case table


def case_of_destination(destination, direction):
    """
    Case label of a destination reached in the reduced frame (I2 > 0).

    Parameters
    ----------
    destination : str
        Equilibrium id.
    direction : {'forward', 'backward'}
        Integration direction.

    Returns
    -------
    str or None
        One of '1', '2', "2'", '3', "3'", '4', '5', '6', '7', "7'", '8',
        "8'", '9', '10'; None for destinations outside the table.
    """
    direction = _check_direction(direction)
    if direction == "forward":
        if destination in FORWARD_CASES:
            return FORWARD_CASES[destination]
        if destination.startswith("(-inf,2pi"):
            return "5"
        return None
    if destination in BACKWARD_CASES:
        return BACKWARD_CASES[destination]
    if destination == "(0,0)" or destination.startswith("(0,theta"):
        return "8"
    if destination.startswith("(+inf,2pi"):
        return "8'"
    return None


def _line_angle(beta, tag):
    # angle named by an id component: 0, 2pi, theta_i or 2pi-theta_i
    if tag == "0":
        return 0.0
    if tag == "2pi":
        return TWO_PI
    thetas, _ = _theta_stars(beta)
    labels = ["theta1", "theta2", "theta3"][3 - len(thetas) :]
    lookup = dict(zip(labels, thetas))
    if tag.startswith("2pi-"):
        return TWO_PI - lookup[tag[4:]]
    return lookup[tag]


def _kprime_line(beta, theta0):
    # K'(theta0) for theta0 in {0, theta_i}, with K'(+0) at 0
    if theta0 == 0.0:
        return kernel_limits(beta)["k1_plus0"]
    return _kernel_pair_scalar(beta, theta0)[1]


def _theta0(beta, case_id, destination):
    tag = destination[1:-1].split(",", 1)[1]
    angle = _line_angle(beta, tag)
    if case_id == "5":
        # K'(-theta0) with theta0 = angle is K' at 2*pi - angle
        return (TWO_PI - angle) % TWO_PI
    if case_id == "8":
        return angle
    return (TWO_PI - angle) % TWO_PI


def _rate(quantity, kind, exponent, coefficient=None):
    rate = dict()
    rate["quantity"] = quantity
    rate["kind"] = kind
    rate["exponent"] = exponent
    rate["coefficient"] = coefficient
    return rate


def case_rates(beta, case_id, destination=None):
    """
    Asymptotic rates of a case in the reduced frame (I2 > 0).

    Each rate reads quantity ~ coefficient * |t - t_ref|^exponent, with
    t_ref = 0 for 'power_t' and t_ref = t* for 'power_t_star'. For
    'log_exponent' only log|quantity| ~ exponent * log|t - t_ref| holds and
    the coefficient is None.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).
    case_id : str
        Case label.
    destination : str, default: None
        Destination id; needed for cases 5, 8 and 8'.

    Returns
    -------
    tuple
        (list of rate dicts, theorem bullet 1..5).
    """
    lim = kernel_limits(beta)
    k10 = lim["k1_zero"]
    k1p, k1m0 = lim["k1_plus0"], lim["k1_minus0"]

    if case_id in ("1", "6"):
        k1pi = _kernel_pair_scalar(beta, math.pi)[1]
        coeff = 1.0 / (-2.0 * (k10 + k1pi))
        kind = POWER_T if case_id == "1" else POWER_T_STAR
        rates = [_rate("i1", kind, -1.0, coeff), _rate("i2", kind, -1.0, coeff)]
        return rates, 1 if case_id == "1" else 4

    if case_id in ("2", "2'", "7", "7'"):
        asym = solve_asymmetric_fixed_point(beta)
        _, k1b, _, _, k1mb, _ = _kernel_pair_scalar(beta, asym["theta_bar"])
        den = -2.0 * (k1b * k1mb - k10**2)
        c_i1 = (k1b - k10) / den
        c_i2 = (k1mb - k10) / den
        if case_id.endswith("'"):
            c_i1, c_i2 = c_i2, c_i1
        kind = POWER_T if case_id.startswith("2") else POWER_T_STAR
        rates = [_rate("i1", kind, -1.0, c_i1), _rate("i2", kind, -1.0, c_i2)]
        return rates, 1 if case_id.startswith("2") else 4

    if case_id in ("3", "3'"):
        c1 = k1m0 / k10
        decaying = _rate("i2", POWER_T, -1.0, 1.0 / (-2.0 * k10))
        slow = _rate("i1", LOG_EXPONENT, -c1)
        if case_id == "3'":
            decaying["quantity"], slow["quantity"] = "i1", "i2"
            return [slow, decaying], 2
        return [slow, decaying], 2

    if case_id == "4":
        rates = [
            _rate("i1", POWER_T, -1.0, 1.0 / (2.0 * (k10 - k1p))),
            _rate("i2", POWER_T, -1.0, 1.0 / (-2.0 * (k10 - k1p))),
        ]
        return rates, 1

    if case_id == "9":
        rates = [
            _rate("i1", POWER_T, -1.0, -1.0 / (2.0 * (k10 - k1m0))),
            _rate("i2", POWER_T, -1.0, 1.0 / (2.0 * (k10 - k1m0))),
        ]
        return rates, 1

    if case_id == "10":
        rates = [
            _rate("i1", POWER_T, -1.0, 1.0 / (2.0 * k10)),
            _rate("i2", LOG_EXPONENT, -k1m0 / k10),
        ]
        return rates, 2

    if case_id in ("5", "8", "8'"):
        if destination is None:
            raise SpiralDomainError("ERROR: case " + case_id + " needs its destination")
        kp = _kprime_line(beta, _theta0(beta, case_id, destination))
        bullet = 3 if kp > 0 else 5
        if case_id == "5":
            rates = [
                _rate("i1", POWER_T_STAR, -1.0, 1.0 / (2.0 * k10)),
                _rate("i2", LOG_EXPONENT, -kp / k10),
            ]
        elif case_id == "8":
            rates = [
                _rate("i1", LOG_EXPONENT, -kp / k10),
                _rate("i2", POWER_T_STAR, -1.0, 1.0 / (-2.0 * k10)),
            ]
        else:
            rates = [
                _rate("i1", POWER_T_STAR, -1.0, 1.0 / (-2.0 * k10)),
                _rate("i2", LOG_EXPONENT, -kp / k10),
            ]
        return rates, bullet

    raise SpiralDomainError("ERROR: unknown case " + repr(case_id))


# ------------------------------------------------------------------------------
# single datum


def _reduced_t_star(beta, traj):
    # t* = t + I/I' of the dominant component at the last sample
    r, theta, big_l, t = traj["samples"][-1, 1:5]
    lim = kernel_limits(beta)
    _, k1, _, _, k1m, _ = _kernel_pair_scalar(beta, min(max(theta, 1e-12), TWO_PI - 1e-12))
    inv_i2 = math.exp(min(-big_l, 700.0)) / traj["i2_at_0"]
    if abs(r) >= 1.0:
        rate = 2.0 * lim["k1_zero"] * r + 2.0 * k1
    else:
        rate = 2.0 * lim["k1_zero"] + 2.0 * k1m * r
    return float(t + inv_i2 / rate)


def _invariant_line(beta, i1, i2, theta, direction):
    # closed-form Riccati solution on I1 = 0 or I2 = 0
    heading = 1.0 if direction == "forward" else -1.0
    k10 = kernel_limits(beta)["k1_zero"]
    strength = i1 if i2 == 0.0 else i2
    quantity = "i1" if i2 == 0.0 else "i2"

    t_blow = 1.0 / (2.0 * k10 * strength)
    blows_up = t_blow * heading > 0

    if i2 == 0.0:
        sign = 1 if i1 > 0 else -1
        node, limit = line_destination(
            beta, theta, heading, at_infinity=True, sign=sign
        )
    else:
        node, limit = line_destination(beta, theta, heading * np.sign(i2))

    if blows_up:
        rates = [_rate(quantity, POWER_T_STAR, -1.0, heading / (2.0 * k10))]
    else:
        rates = [_rate(quantity, POWER_T, -1.0, heading / (-2.0 * k10))]

    result = dict()
    result["case_id"] = "i1_only" if i2 == 0.0 else "i2_only"
    result["theorem_bullet"] = INVARIANT_LINE
    result["destination"] = node
    result["destination_theta"] = limit
    result["t_star"] = t_blow if blows_up else None
    result["rates"] = rates
    result["flags"] = []
    result["terminal_event"] = {"type": "closed_form"}
    return result


def classify_behavior(
    beta,
    i1_0,
    i2_0,
    theta_0,
    direction="forward",
    controls=None,
    return_trajectory=False,
):
    """
    Classify the long-time behaviour of one initial datum.

    Parameters
    ----------
    beta : float
        Spiral shape parameter; negative values are mapped to -beta with
        theta -> 2*pi - theta and time reversal. |beta| must be at least
        1e-4 away from beta0, beta_star, beta2 and beta3.
    i1_0, i2_0 : float
        Initial branch strengths, not both zero.
    theta_0 : float
        Initial angle difference in (0, 2*pi).
    direction : {'forward', 'backward'}, default: 'forward'
        Direction of original time.
    controls : dict, default: None
        Integration controls passed to `integrate`.
    return_trajectory : bool, default: False
        Attach the reduced-frame trajectory under 'trajectory'.

    Returns
    -------
    dict
        Dictionary with keys 'beta', 'band', 'direction', 'case_id',
        'theorem_bullet', 'destination', 'destination_theta', 't_star',
        'rates', 'flags', 'reflected', 'negated', 'reduced' and
        'terminal_event'.

    Raises
    ------
    NearCriticalError
        If |beta| is inside a guard band.
    UnresolvedDestinationError
        If integration stops at its horizon without a terminal event.
    """
    beta = check_beta(beta)
    direction = _check_direction(direction)
    i1, i2 = float(i1_0), float(i2_0)
    theta = float(theta_0)
    if not 0.0 < theta < TWO_PI:
        raise SpiralDomainError(
            "ERROR: theta(0) must lie strictly inside (0, 2*pi), got " + repr(theta)
        )
    if i1 == 0.0 and i2 == 0.0:
        raise SpiralDomainError("ERROR: I1 and I2 cannot both be zero")

    # reflection to positive beta
    reflected = beta < 0
    red_beta, red_theta, red_dir = beta, theta, direction
    if reflected:
        red_beta, red_theta = -beta, TWO_PI - theta
        red_dir = reverse_direction(direction)

    guard_critical(red_beta, CLASSIFY_GUARD, names=CLASSIFY_CRITICAL)

    negated = False
    if i1 == 0.0 or i2 == 0.0:
        result = _invariant_line(red_beta, i1, i2, red_theta, red_dir)
        reduced = {"i1": i1, "i2": i2, "theta": red_theta, "direction": red_dir}
    else:
        if i2 < 0:
            negated = True
            i1, i2 = -i1, -i2
            red_dir = reverse_direction(red_dir)
        reduced = {"i1": i1, "i2": i2, "theta": red_theta, "direction": red_dir}

        traj = integrate(
            red_beta,
            "reparam",
            {"r": i1 / i2, "theta": red_theta, "i2": i2},
            direction=red_dir,
            controls=controls,
        )
        event = traj["terminal_event"]
        if event["type"] == HORIZON_REACHED:
            raise UnresolvedDestinationError(
                "ERROR: no destination reached before the horizon ("
                + event.get("reason", "horizon")
                + ") for beta = "
                + repr(beta)
                + ", I = ("
                + repr(i1_0)
                + ", "
                + repr(i2_0)
                + "), theta = "
                + repr(theta_0),
                trajectory=traj,
            )

        destination = event["destination"]
        case_id = case_of_destination(destination, red_dir)

        result = dict()
        result["destination"] = destination
        result["destination_theta"] = _destination_angle(red_beta, destination, event)
        result["terminal_event"] = event
        result["flags"] = []
        if case_id is None:
            result["case_id"] = None
            result["theorem_bullet"] = SADDLE_DESTINED
            result["rates"] = []
            result["t_star"] = None
        else:
            rates, bullet = case_rates(red_beta, case_id, destination)
            result["case_id"] = case_id
            result["theorem_bullet"] = bullet
            result["rates"] = rates
            result["t_star"] = (
                _reduced_t_star(red_beta, traj) if case_id in FINITE_TIME_CASES else None
            )
            if case_id in INTERPRETED_CASES:
                result["flags"].append(INTERPRETATION_FLAG)
        if return_trajectory:
            result["trajectory"] = traj

    # undo the reductions
    if negated:
        for rate in result["rates"]:
            if rate["coefficient"] is not None:
                rate["coefficient"] = -rate["coefficient"]
        if result["t_star"] is not None:
            result["t_star"] = -result["t_star"]
    if reflected:
        if result["t_star"] is not None:
            result["t_star"] = -result["t_star"]
        result["flags"].append("reflected_beta")

    result["beta"] = beta
    result["band"] = band_label(beta)
    result["direction"] = direction
    result["input"] = {"i1": float(i1_0), "i2": float(i2_0), "theta": float(theta_0)}
    result["reflected"] = reflected
    result["negated"] = negated
    result["reduced"] = reduced

    logging.info(
        "beta = %r, I = (%r, %r), theta = %r, %s: case %s -> %s",
        beta,
        i1_0,
        i2_0,
        theta_0,
        direction,
        result["case_id"],
        result["destination"],
    )

    return result


def _destination_angle(beta, destination, event):
    if event["type"] == EQUILIBRIUM_CAPTURED:
        return float(event["theta"])
    tag = destination[1:-1].split(",", 1)[1]
    try:
        return _line_angle(beta, tag)
    except KeyError:
        return float(event.get("theta", np.nan))


def blowup_expected(behavior):
    """
    Blowup criterion evaluated along the reduced trajectory.

    With beta > 0 and I2 > 0, finite-time blowup happens forward in time iff
    R < -1 at some time, and backward in time iff R > -1 at some time
    (equivalently beta*(I1 + I2) < 0, resp. > 0, somewhere).

    Parameters
    ----------
    behavior : dict
        Result of `classify_behavior` with `return_trajectory=True`, or an
        invariant-line result.

    Returns
    -------
    bool
        True iff the criterion predicts finite-time blowup.
    """
    reduced = behavior["reduced"]
    forward = reduced["direction"] == "forward"
    if "trajectory" not in behavior:
        total = reduced["i1"] + reduced["i2"]
        return total < 0 if forward else total > 0
    r = behavior["trajectory"]["samples"][:, 1]
    if forward:
        return bool(np.any(r < -1.0))
    return bool(np.any(r > -1.0))


# ------------------------------------------------------------------------------
# heteroclinic graph

# interior edges per band, on the sheets R > 0 and R < 0
_NEGATIVE_SHEET = [
    ("(0,theta2)", "(-inf,2pi-theta3)"),
    ("(0,theta3)", "(-inf,2pi-theta2)"),
    ("(-1,0)", "(-inf,2pi-theta3)"),
    ("(0,theta3)", "(-1,2pi)"),
]

_INTERIOR_EDGES = {
    0: [
        ("(Rbar,thetabar)", "(+inf,0)"),
        ("(Rbar,thetabar)", "(1,pi)"),
        ("(0,theta1)", "(Rbar,thetabar)"),
        ("(+inf,2pi-theta3)", "(Rbar,thetabar)"),
        ("(1/Rbar,2pi-thetabar)", "(0,2pi)"),
        ("(1/Rbar,2pi-thetabar)", "(1,pi)"),
        ("(+inf,2pi-theta1)", "(1/Rbar,2pi-thetabar)"),
        ("(0,theta3)", "(1/Rbar,2pi-thetabar)"),
        ("(0,theta2)", "(1,pi)"),
        ("(+inf,2pi-theta2)", "(1,pi)"),
    ]
    + _NEGATIVE_SHEET,
    1: [
        ("(Rbar,thetabar)", "(+inf,0)"),
        ("(Rbar,thetabar)", "(1,pi)"),
        ("(0,0)", "(Rbar,thetabar)"),
        ("(+inf,2pi-theta3)", "(Rbar,thetabar)"),
        ("(1/Rbar,2pi-thetabar)", "(0,2pi)"),
        ("(1/Rbar,2pi-thetabar)", "(1,pi)"),
        ("(+inf,2pi)", "(1/Rbar,2pi-thetabar)"),
        ("(0,theta3)", "(1/Rbar,2pi-thetabar)"),
        ("(0,theta2)", "(1,pi)"),
        ("(+inf,2pi-theta2)", "(1,pi)"),
    ]
    + _NEGATIVE_SHEET,
    2: [
        ("(Rbar,thetabar)", "(+inf,0)"),
        ("(Rbar,thetabar)", "(1,pi)"),
        ("(+inf,2pi-theta3)", "(Rbar,thetabar)"),
        ("(0,theta3)", "(Rbar,thetabar)"),
        ("(1/Rbar,2pi-thetabar)", "(0,2pi)"),
        ("(1/Rbar,2pi-thetabar)", "(1,pi)"),
        ("(0,theta3)", "(1/Rbar,2pi-thetabar)"),
        ("(+inf,2pi-theta3)", "(1/Rbar,2pi-thetabar)"),
        ("(0,theta2)", "(+inf,0)"),
        ("(+inf,2pi-theta2)", "(0,2pi)"),
    ]
    + _NEGATIVE_SHEET,
    3: [
        ("(1,pi)", "(+inf,0)"),
        ("(1,pi)", "(0,2pi)"),
        ("(0,theta3)", "(1,pi)"),
        ("(+inf,2pi-theta3)", "(1,pi)"),
        ("(0,theta2)", "(+inf,0)"),
        ("(+inf,2pi-theta2)", "(0,2pi)"),
    ]
    + _NEGATIVE_SHEET,
    4: [
        ("(1,pi)", "(+inf,0)"),
        ("(1,pi)", "(0,2pi)"),
        ("(0,theta3)", "(1,pi)"),
        ("(+inf,2pi-theta3)", "(1,pi)"),
        ("(-1,0)", "(-inf,2pi-theta3)"),
        ("(0,theta3)", "(-1,2pi)"),
    ],
    6: [
        ("(1,pi)", "(+inf,0)"),
        ("(1,pi)", "(0,2pi)"),
        ("(0,0)", "(1,pi)"),
        ("(+inf,2pi)", "(1,pi)"),
        ("(-1,0)", "(-inf,2pi)"),
        ("(0,0)", "(-1,2pi)"),
    ],
}
_INTERIOR_EDGES[5] = list(_INTERIOR_EDGES[4])


def _mirror_id(node, sign):
    # (0, a) -> (sign*inf, 2pi - a)
    tag = node[1:-1].split(",", 1)[1]
    if tag == "0":
        mirrored = "2pi"
    elif tag == "2pi":
        mirrored = "0"
    else:
        mirrored = "2pi-" + tag
    return "(" + ("+inf" if sign > 0 else "-inf") + "," + mirrored + ")"


def invariant_line_edges(beta):
    """
    Heteroclinic edges on the invariant lines R = 0, R = +-inf, theta = 0, 2*pi.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).

    Returns
    -------
    list of tuple
        Directed edges (source id, target id).
    """
    thetas, _ = _theta_stars(beta)
    labels = ["theta1", "theta2", "theta3"][3 - len(thetas) :]
    points = [("(0,0)", 0.0)]
    points += [("(0," + lab + ")", t) for lab, t in zip(labels, thetas)]
    points += [("(0,2pi)", TWO_PI)]

    k0 = kernel_limits(beta)["k0"]
    line = []
    for (a, ta), (b, tb) in zip(points[:-1], points[1:]):
        k_mid = _kernel_pair_scalar(beta, 0.5 * (ta + tb))[0]
        line.append((a, b) if k_mid > k0 else (b, a))

    edges = list(line)
    edges += [(_mirror_id(a, 1), _mirror_id(b, 1)) for a, b in line]
    edges += [(_mirror_id(b, -1), _mirror_id(a, -1)) for a, b in line]
    edges += [
        ("(0,0)", "(+inf,0)"),
        ("(0,0)", "(-1,0)"),
        ("(-inf,0)", "(-1,0)"),
        ("(+inf,2pi)", "(0,2pi)"),
        ("(-1,2pi)", "(0,2pi)"),
        ("(-1,2pi)", "(-inf,2pi)"),
    ]
    return edges


def predicted_heteroclinic_graph(beta):
    """
    Heteroclinic graph of the compactified phase plane for one band.

    Parameters
    ----------
    beta : float
        Spiral shape parameter, positive and at least 1e-4 away from every
        critical value.

    Returns
    -------
    dict
        Dictionary with keys 'beta', 'band', 'nodes' (list of dicts with
        'id', 'r', 'theta', 'kind') and 'edges' (list of [source, target]).
    """
    beta = check_beta(beta)
    if beta < 0:
        raise SpiralDomainError("ERROR: the heteroclinic graph needs beta > 0")
    equilibria = list_equilibria(beta)
    index = band_index(beta)

    nodes = []
    for e in equilibria:
        nodes.append({"id": e["id"], "r": e["r"], "theta": e["theta"], "kind": e["kind"]})
    known = {n["id"] for n in nodes}

    edges = invariant_line_edges(beta) + _INTERIOR_EDGES[index]
    missing = {v for edge in edges for v in edge} - known
    if missing:
        raise SpiralDomainError(
            "ERROR: graph edges reference unknown equilibria: "
            + ", ".join(sorted(missing))
        )

    graph = dict()
    graph["beta"] = beta
    graph["band"] = BAND_LABELS[index]
    graph["nodes"] = nodes
    graph["edges"] = [list(edge) for edge in edges]
    return graph


def _sheet_of(r):
    if r in ("+inf", "-inf"):
        return "+" if r == "+inf" else "-"
    if r == 0:
        return "0"
    return "+" if r > 0 else "-"


def sheet_attractors(graph, sheet, direction="forward"):
    """
    Nodes a sweep cell on `sheet` may end at.

    On the sheets '+' and '-' these are the attractors (repellers when
    backward) with R = 0 or R of the sheet's sign. On the line '0' they are
    the sinks (sources when backward) of the flow along R = 0.

    Parameters
    ----------
    graph : dict
        Result of `predicted_heteroclinic_graph`.
    sheet : {'+', '-', '0'}
        Sheet of the phase plane.
    direction : {'forward', 'backward'}, default: 'forward'
        Integration direction.

    Returns
    -------
    set of str
        Node ids.
    """
    direction = _check_direction(direction)
    kinds = {n["id"]: n["kind"] for n in graph["nodes"]}
    sheets = {n["id"]: _sheet_of(n["r"]) for n in graph["nodes"]}

    if sheet == "0":
        line = [
            (a, b)
            for a, b in graph["edges"]
            if sheets[a] == "0" and sheets[b] == "0"
        ]
        if direction == "backward":
            line = [(b, a) for a, b in line]
        sources = {a for a, _ in line}
        return {b for _, b in line if b not in sources}

    wanted = ATTRACTOR if direction == "forward" else REPELLER
    return {
        node
        for node, kind in kinds.items()
        if kind == wanted and sheets[node] in ("0", sheet)
    }


# ------------------------------------------------------------------------------
# basin sweep


def _sweep_cell(args):
    beta, a_or_r, theta, sheet, direction, controls = args
    if sheet == "0":
        r = 0.0
    else:
        r = (1.0 if sheet == "+" else -1.0) * math.exp(a_or_r)
    try:
        result = classify_behavior(beta, r, 1.0, theta, direction, controls=controls)
    except (UnresolvedDestinationError, StepSizeError, SpiralDomainError) as e:
        logging.debug("Unresolved cell (%r, %r, %s): %s", a_or_r, theta, sheet, e)
        return (a_or_r, theta, sheet, "unresolved", "unresolved")
    case_id = result["case_id"] if result["case_id"] is not None else "none"
    return (a_or_r, theta, sheet, result["destination"], case_id)


def basin_sweep(
    beta,
    width=61,
    height=61,
    direction="forward",
    epsilon=1e-3,
    log_range=3.0,
    sheets=("+", "-", "0"),
    controls=None,
    n_jobs=1,
):
    """
    Label a grid of the phase plane with destinations and cases.

    The grid takes `width` angles in (epsilon, 2*pi - epsilon) and, on the
    sheets '+' and '-', `height` values of A = log|R| in [-log_range,
    log_range]; the line R = 0 is sampled at the same angles.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    width, height : int, default: 61
        Grid size.
    direction : {'forward', 'backward'}, default: 'forward'
        Integration direction.
    epsilon : float, default: 1e-3
        Angular margin from the boundary lines.
    log_range : float, default: 3.0
        Half-width of the A range.
    sheets : tuple of str, default: ('+', '-', '0')
        Sheets to sample.
    controls : dict, default: None
        Integration controls.
    n_jobs : int, default: 1
        Worker processes; -1 uses all physical cores.

    Returns
    -------
    dict
        Dictionary with keys 'beta', 'band', 'direction', 'grid', 'columns',
        'rows' (tuples in grid order), 'cells' and 'unresolved'.
    """
    beta = check_beta(beta)
    direction = _check_direction(direction)
    width, height = int(width), int(height)
    if width < 1 or height < 1:
        raise SpiralDomainError("ERROR: sweep grid must be at least 1x1")

    thetas = np.linspace(epsilon, TWO_PI - epsilon, width)
    a_values = np.linspace(-log_range, log_range, height)

    tasks = []
    for sheet in sheets:
        if sheet == "0":
            tasks += [(beta, 0.0, float(t), "0", direction, controls) for t in thetas]
        elif sheet in ("+", "-"):
            tasks += [
                (beta, float(a), float(t), sheet, direction, controls)
                for a in a_values
                for t in thetas
            ]
        else:
            raise SpiralDomainError("ERROR: unknown sheet " + repr(sheet))

    logging.info("Sweeping %d cells for beta = %r ...", len(tasks), beta)

    rows = _map_tasks(_sweep_cell, tasks, n_jobs)
    unresolved = sum(1 for row in rows if row[3] == "unresolved")

    if unresolved:
        logging.warning("%d of %d sweep cells unresolved", unresolved, len(rows))

    sweep = dict()
    sweep["beta"] = beta
    sweep["band"] = band_label(beta)
    sweep["direction"] = direction
    sweep["grid"] = {
        "width": width,
        "height": height,
        "epsilon": epsilon,
        "log_range": log_range,
        "sheets": list(sheets),
    }
    sweep["columns"] = ["a_or_r", "theta", "sheet", "destination_id", "case_id"]
    sweep["rows"] = rows
    sweep["cells"] = len(rows)
    sweep["unresolved"] = unresolved
    return sweep


def _map_tasks(func, tasks, n_jobs):
    # ordered map, optionally over a process pool
    n_jobs = resolve_n_jobs(n_jobs)
    if n_jobs == 1 or len(tasks) < 2:
        return [func(task) for task in tasks]

    import multiprocessing

    with multiprocessing.Pool(processes=n_jobs) as pool:
        return list(pool.imap(func, tasks, chunksize=max(1, len(tasks) // (4 * n_jobs))))


def resolve_n_jobs(n_jobs):
    """Number of worker processes; -1 means all physical cores."""
    n_jobs = int(n_jobs)
    if n_jobs == -1:
        import psutil

        return max(1, psutil.cpu_count(logical=False) or 1)
    if n_jobs < 1:
        raise SpiralDomainError("ERROR: n_jobs must be positive or -1")
    return n_jobs


# ------------------------------------------------------------------------------
# rate table


def asymptotic_rate_table(beta):
    """
    Exponents and coefficients of every case at one shape parameter.

    Parameters
    ----------
    beta : float
        Spiral shape parameter, admissible for classification.

    Returns
    -------
    dict
        Dictionary with keys 'beta', 'band', 'c1' (K'(-0)/K'(0)), 'c2' (list
        of blowup exponents K'(theta0)/K'(0) with K'(theta0) < 0),
        'decay_exponents' (list of -K'(theta0)/K'(0) with K'(theta0) > 0),
        and 'rows' (one dict per case and angle with 'case', 'theta0',
        'theorem_bullet', 'rates').
    """
    beta = check_beta(beta)
    if beta < 0:
        raise SpiralDomainError("ERROR: the rate table is tabulated for beta > 0")
    guard_critical(beta, CLASSIFY_GUARD, names=CLASSIFY_CRITICAL)

    lim = kernel_limits(beta)
    k10 = lim["k1_zero"]
    thetas, _ = _theta_stars(beta)
    labels = ["theta1", "theta2", "theta3"][3 - len(thetas) :]

    line_angles = [("0", 0.0)] + list(zip(labels, thetas))
    c2 = []
    decay = []
    for _, theta0 in line_angles:
        kp = _kprime_line(beta, theta0)
        if kp < 0:
            c2.append(kp / k10)
        else:
            decay.append(-kp / k10)

    rows = []
    cases = ["1", "3", "3'", "4", "6", "9", "10"]
    if solve_asymmetric_fixed_point(beta) is not None:
        cases[1:1] = ["2", "2'"]
        cases[7:7] = ["7", "7'"]
    for case_id in cases:
        rates, bullet = case_rates(beta, case_id)
        rows.append(
            {"case": case_id, "theta0": None, "theorem_bullet": bullet, "rates": rates}
        )
    for label, theta0 in line_angles:
        for case_id, destination in (
            ("5", "(-inf," + ("2pi" if label == "0" else "2pi-" + label) + ")"),
            ("8", "(0," + label + ")"),
            ("8'", "(+inf," + ("2pi" if label == "0" else "2pi-" + label) + ")"),
        ):
            rates, bullet = case_rates(beta, case_id, destination)
            rows.append(
                {
                    "case": case_id,
                    "theta0": theta0,
                    "theorem_bullet": bullet,
                    "rates": rates,
                }
            )

    table = dict()
    table["beta"] = beta
    table["band"] = band_label(beta)
    table["c1"] = lim["k1_minus0"] / k10
    table["c2"] = c2
    table["decay_exponents"] = decay
    table["rows"] = rows
    return table
