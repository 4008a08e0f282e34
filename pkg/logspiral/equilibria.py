"""
This module provides the nullclines, the Jacobians and the list of
equilibria of the planar system

    R' = 2(K'(0) - K'(-theta)) R^2 + 2(K'(theta) - K'(0)) R
    theta' = 2(K(0) - K(-theta)) R + 2(K(theta) - K(0))

including the compactified points at R = +inf and R = -inf.

"""

# ==============================================================================
# IMPORTS

import logging

import numpy as np

from .criticality import (
    _check_positive_beta,
    guard_critical,
    solve_alpha,
    solve_asymmetric_fixed_point,
    solve_critical_betas,
    solve_theta_stars,
)
from .kernel import _kernel_pair, _unwrap, check_beta, check_theta, kernel_limits
from .utils._errors import NonHyperbolicError, SingularityError, SpiralDomainError

# ==============================================================================
# CONSTANTS

ATTRACTOR = "attractor"
REPELLER = "repeller"
SADDLE = "saddle"

HYPERBOLICITY_GUARD = 1e-8
POLE_GUARD = 1e-9
ASYMPTOTE_GUARD = 1e-12

# guard band around every critical beta for equilibrium listings
LISTING_GUARD = 1e-4

WORDING_FLAG = "theorem_wording_discrepancy"

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# nullclines


def nullcline_R1(beta, theta):
    """
    Nullcline R' = 0 off the line R = 0.

    R1(theta) = (K'(theta) - K'(0)) / (K'(-theta) - K'(0)); it has a pole at
    theta = 2*pi - alpha and satisfies R1(-theta) = 1/R1(theta).

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).
    theta : float or array_like
        Angle(s) strictly inside (0, 2*pi).

    Returns
    -------
    float or numpy.ndarray
        Value(s) of R1.

    Raises
    ------
    SingularityError
        If an angle is within 1e-9 of the pole 2*pi - alpha.
    """
    beta = _check_positive_beta(beta)
    theta = check_theta(theta)

    pole = 2.0 * np.pi - solve_alpha(beta)
    if np.any(np.abs(theta - pole) < POLE_GUARD):
        raise SingularityError(
            "ERROR: R1 has a pole at theta = 2*pi - alpha = " + repr(pole)
        )

    k10 = kernel_limits(beta)["k1_zero"]
    _, k1, _, _, k1m, _ = _kernel_pair(beta, theta)
    return _unwrap((k1 - k10) / (k1m - k10))


def nullcline_R2(beta, theta):
    """
    Nullcline theta' = 0.

    R2(theta) = (K(theta) - K(0)) / (K(-theta) - K(0)); it vanishes at the
    roots of K(theta) = K(0) and has vertical asymptotes at their reflections.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).
    theta : float or array_like
        Angle(s) strictly inside (0, 2*pi).

    Returns
    -------
    float or numpy.ndarray
        Value(s) of R2.

    Raises
    ------
    SingularityError
        If the denominator vanishes (asymptote), or both numerator and
        denominator vanish (removable degeneracy at beta = beta1 or 1).
    """
    beta = _check_positive_beta(beta)
    theta = check_theta(theta)

    k0 = kernel_limits(beta)["k0"]
    k, _, _, km, _, _ = _kernel_pair(beta, theta)
    num = k - k0
    den = km - k0

    bad = np.abs(den) < ASYMPTOTE_GUARD
    if np.any(bad & (np.abs(num) < ASYMPTOTE_GUARD)):
        raise SingularityError(
            "ERROR: R2 is 0/0 at beta = "
            + repr(beta)
            + " (removable degeneracy of the nullcline)"
        )
    if np.any(bad):
        raise SingularityError(
            "ERROR: R2 has a vertical asymptote at theta = "
            + np.array2string(np.atleast_1d(theta)[np.atleast_1d(bad)], precision=17)
        )

    return _unwrap(num / den)


def nullcline_traces(beta, theta):
    """
    Both nullclines on an angle grid, with NaN at poles and asymptotes.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).
    theta : array_like
        Angles strictly inside (0, 2*pi).

    Returns
    -------
    tuple of numpy.ndarray
        R1 and R2 sampled on `theta`.
    """
    beta = _check_positive_beta(beta)
    theta = check_theta(np.atleast_1d(theta))

    lim = kernel_limits(beta)
    k, k1, _, km, k1m, _ = _kernel_pair(beta, theta)

    with np.errstate(divide="ignore", invalid="ignore"):
        den1 = k1m - lim["k1_zero"]
        den2 = km - lim["k0"]
        r1 = (k1 - lim["k1_zero"]) / den1
        r2 = (k - lim["k0"]) / den2
    r1 = np.where(np.abs(den1) < ASYMPTOTE_GUARD, np.nan, r1)
    r2 = np.where(np.abs(den2) < ASYMPTOTE_GUARD, np.nan, r2)

    return r1, r2


# ------------------------------------------------------------------------------
# Jacobians


def _side_values(beta, theta0):
    # kernel values at theta0 and -theta0, one-sided at the boundary lines
    lim = kernel_limits(beta)
    if theta0 == 0.0:
        plus = (lim["k0"], lim["k1_plus0"], lim["k2_plus0"])
        minus = (lim["k0"], lim["k1_minus0"], lim["k2_minus0"])
        return plus, minus
    if theta0 == 2.0 * np.pi:
        plus = (lim["k0"], lim["k1_plus0"], lim["k2_plus0"])
        minus = (lim["k0"], lim["k1_minus0"], lim["k2_minus0"])
        return minus, plus
    check_theta(theta0)
    k, k1, k2, km, k1m, k2m = _kernel_pair(beta, theta0)
    return (float(k), float(k1), float(k2)), (float(km), float(k1m), float(k2m))


def jacobian_reparam(beta, r0, theta0):
    """
    Jacobian of the planar system at (r0, theta0).

    On the boundary lines theta0 = 0 and theta0 = 2*pi the one-sided kernel
    limits are used: at 0 the theta side takes +0 limits and the -theta side
    takes -0 limits; at 2*pi the sides swap.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    r0 : float
        Finite ratio I1/I2.
    theta0 : float
        Angle in (0, 2*pi), or exactly 0 or 2*pi.

    Returns
    -------
    numpy.ndarray
        The 2x2 matrix [[dR'/dR, dR'/dtheta], [dtheta'/dR, dtheta'/dtheta]].
    """
    beta = check_beta(beta)
    r0 = float(r0)
    if not np.isfinite(r0):
        raise SpiralDomainError("ERROR: jacobian_reparam needs a finite r0")

    lim = kernel_limits(beta)
    k0, k10 = lim["k0"], lim["k1_zero"]
    (k, k1, k2), (km, k1m, k2m) = _side_values(beta, float(theta0))

    jac = np.array(
        [
            [
                4.0 * (k10 - k1m) * r0 + 2.0 * (k1 - k10),
                2.0 * k2m * r0**2 + 2.0 * k2 * r0,
            ],
            [2.0 * (k0 - km), 2.0 * k1m * r0 + 2.0 * k1],
        ]
    )
    return jac


def jacobian_log(beta, a0, theta0, sign=1):
    """
    Jacobian of the log-scaled system, R = sign * exp(A).

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    a0 : float
        Log-modulus A = log|R|.
    theta0 : float
        Angle in (0, 2*pi), or exactly 0 or 2*pi.
    sign : {1, -1}, default: 1
        Sheet of the phase plane.

    Returns
    -------
    numpy.ndarray
        The 2x2 matrix [[dA'/dA, dA'/dtheta], [dtheta'/dA, dtheta'/dtheta]].
    """
    beta = check_beta(beta)
    if sign not in (1, -1):
        raise SpiralDomainError("ERROR: sign must be +1 or -1")

    lim = kernel_limits(beta)
    k0, k10 = lim["k0"], lim["k1_zero"]
    (_, k1, k2), (km, k1m, k2m) = _side_values(beta, float(theta0))
    r = sign * np.exp(float(a0))

    jac = np.array(
        [
            [2.0 * (k10 - k1m) * r, 2.0 * k2m * r + 2.0 * k2],
            [2.0 * (k0 - km) * r, 2.0 * k1m * r + 2.0 * k1],
        ]
    )
    return jac


def classify_jacobian(jac):
    """
    Classify an equilibrium from its Jacobian by trace and determinant.

    Parameters
    ----------
    jac : array_like
        A 2x2 matrix.

    Returns
    -------
    dict
        Dictionary with keys 'kind', 'trace', 'determinant', 'eigenvalues'.

    Raises
    ------
    NonHyperbolicError
        If |trace| or |determinant| is at most 1e-8.
    """
    jac = np.asarray(jac, dtype=float)
    a = float(np.trace(jac))
    b = float(np.linalg.det(jac))

    if abs(a) <= HYPERBOLICITY_GUARD or abs(b) <= HYPERBOLICITY_GUARD:
        raise NonHyperbolicError(
            "ERROR: non-hyperbolic equilibrium, trace = "
            + repr(a)
            + ", determinant = "
            + repr(b)
        )

    if b < 0:
        kind = SADDLE
    elif a < 0:
        kind = ATTRACTOR
    else:
        kind = REPELLER

    result = dict()
    result["kind"] = kind
    result["trace"] = a
    result["determinant"] = b
    result["eigenvalues"] = [complex(e) for e in np.linalg.eigvals(jac)]
    return result


# ------------------------------------------------------------------------------
# equilibria


def _reverse_kind(kind):
    return {ATTRACTOR: REPELLER, REPELLER: ATTRACTOR, SADDLE: SADDLE}[kind]


def _entry(node_id, r, theta, stability, source, flags=None):
    entry = dict()
    entry["id"] = node_id
    entry["r"] = r
    entry["theta"] = theta
    entry["kind"] = stability["kind"]
    entry["trace"] = stability["trace"]
    entry["determinant"] = stability["determinant"]
    entry["eigenvalues"] = list(stability["eigenvalues"])
    entry["source"] = source
    entry["flags"] = list(flags) if flags else []
    return entry


def list_equilibria(beta):
    """
    List every equilibrium of the planar system with its stability.

    Finite equilibria are classified from their Jacobians (the log-scaled
    one for the asymmetric pair). The compactified points mirror finite
    ones: (+inf, 2*pi - theta) behaves as (0, theta), so (+inf, 2*pi)
    mirrors (0, 0) and (+inf, 0) mirrors (0, 2*pi); the points at -inf
    carry the time-reversed behaviour of the same mirrors.

    Parameters
    ----------
    beta : float
        Spiral shape parameter, positive and at least 1e-4 away from every
        critical value.

    Returns
    -------
    list of dict
        Entries with keys 'id', 'r' (float, '+inf' or '-inf'), 'theta',
        'kind', 'trace', 'determinant', 'eigenvalues', 'source', 'flags'.

    Raises
    ------
    NearCriticalError
        If beta is within 1e-4 of a critical value.
    """
    beta = _check_positive_beta(beta)
    guard_critical(beta, LISTING_GUARD)

    logging.info("Listing equilibria for beta = %r ...", beta)

    crit = solve_critical_betas()
    stars = solve_theta_stars(beta)
    asym = solve_asymmetric_fixed_point(beta)
    two_pi = 2.0 * np.pi

    finite = []

    flags = [WORDING_FLAG] if beta > crit["beta_star"] else []
    finite.append(
        _entry(
            "(1,pi)",
            1.0,
            np.pi,
            classify_jacobian(jacobian_reparam(beta, 1.0, np.pi)),
            "jacobian",
            flags,
        )
    )

    if asym is not None:
        a_bar = float(np.log(asym["r_bar"]))
        finite.append(
            _entry(
                "(Rbar,thetabar)",
                asym["r_bar"],
                asym["theta_bar"],
                classify_jacobian(jacobian_log(beta, a_bar, asym["theta_bar"], 1)),
                "log_jacobian",
            )
        )
        finite.append(
            _entry(
                "(1/Rbar,2pi-thetabar)",
                1.0 / asym["r_bar"],
                two_pi - asym["theta_bar"],
                classify_jacobian(
                    jacobian_log(beta, -a_bar, two_pi - asym["theta_bar"], 1)
                ),
                "log_jacobian",
            )
        )

    for label, theta in zip(stars["labels"], stars["thetas"]):
        finite.append(
            _entry(
                "(0," + label + ")",
                0.0,
                theta,
                classify_jacobian(jacobian_reparam(beta, 0.0, theta)),
                "jacobian",
            )
        )

    for node_id, r, theta in (
        ("(0,0)", 0.0, 0.0),
        ("(0,2pi)", 0.0, two_pi),
        ("(-1,0)", -1.0, 0.0),
        ("(-1,2pi)", -1.0, two_pi),
    ):
        finite.append(
            _entry(
                node_id,
                r,
                theta,
                classify_jacobian(jacobian_reparam(beta, r, theta)),
                "jacobian",
            )
        )

    # compactified points mirror the equilibria on the line R = 0
    by_id = {e["id"]: e for e in finite}
    mirrors = [
        ("2pi-" + label, two_pi - theta, "(0," + label + ")")
        for label, theta in zip(stars["labels"], stars["thetas"])
    ]
    mirrors.append(("2pi", two_pi, "(0,0)"))
    mirrors.append(("0", 0.0, "(0,2pi)"))

    compact = []
    for tag, theta, mirror_id in mirrors:
        mirror = by_id[mirror_id]
        stability = dict()
        stability["kind"] = mirror["kind"]
        stability["trace"] = mirror["trace"]
        stability["determinant"] = mirror["determinant"]
        stability["eigenvalues"] = mirror["eigenvalues"]
        compact.append(
            _entry(
                "(+inf," + tag + ")", "+inf", theta, stability, "mirror of " + mirror_id
            )
        )

        reversed_ = dict()
        reversed_["kind"] = _reverse_kind(mirror["kind"])
        reversed_["trace"] = -mirror["trace"]
        reversed_["determinant"] = mirror["determinant"]
        reversed_["eigenvalues"] = [-e for e in mirror["eigenvalues"]]
        compact.append(
            _entry(
                "(-inf," + tag + ")",
                "-inf",
                theta,
                reversed_,
                "time-reversed mirror of " + mirror_id,
            )
        )

    equilibria = finite + compact

    logging.debug("Equilibria: %r", [(e["id"], e["kind"]) for e in equilibria])

    return equilibria


def equilibria_by_id(beta):
    """Equilibria of `list_equilibria` keyed by their id."""
    return {e["id"]: e for e in list_equilibria(beta)}


# ------------------------------------------------------------------------------
# phase portrait


def phase_portrait(beta, width=41, height=41, log_scale=False, r_range=3.0, epsilon=1e-3):
    """
    Sample the planar vector field and both nullclines on a grid.

    With `log_scale` the vertical coordinate is A = log|R| on both sheets
    R > 0 and R < 0, and the field is (A', theta'); otherwise it is R itself
    and the field is (R', theta').

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).
    width, height : int, default: 41
        Number of angles and of vertical samples.
    log_scale : bool, default: False
        Sample in A = log|R| instead of R.
    r_range : float, default: 3.0
        Half-width of the vertical range in R (or in A).
    epsilon : float, default: 1e-3
        Angular margin from the boundary lines.

    Returns
    -------
    dict
        Dictionary with keys 'field' (dict of arrays 'sheet', 'theta',
        'r_or_a', 'd_r_or_a', 'd_theta') and 'nullclines' (dict of arrays
        'theta', 'r1', 'r2'; in A on the sheet R > 0 when `log_scale`).
    """
    beta = _check_positive_beta(beta)
    width, height = int(width), int(height)
    if width < 1 or height < 1:
        raise SpiralDomainError("ERROR: portrait grid must be at least 1x1")

    theta = np.linspace(epsilon, 2.0 * np.pi - epsilon, width)
    vertical = np.linspace(-r_range, r_range, height)

    lim = kernel_limits(beta)
    k, k1, _, km, k1m, _ = _kernel_pair(beta, theta)

    if log_scale:
        sheets = np.repeat([1.0, -1.0], width * height)
        grid_v, grid_t = np.meshgrid(vertical, np.arange(width), indexing="ij")
        grid_v = np.tile(grid_v.ravel(), 2)
        idx = np.tile(grid_t.ravel(), 2)
        r = sheets * np.exp(grid_v)
    else:
        grid_v, grid_t = np.meshgrid(vertical, np.arange(width), indexing="ij")
        grid_v = grid_v.ravel()
        idx = grid_t.ravel()
        r = grid_v
        sheets = np.sign(r)

    slope = 2.0 * (lim["k1_zero"] - k1m[idx]) * r + 2.0 * (k1[idx] - lim["k1_zero"])
    d_theta = 2.0 * (lim["k0"] - km[idx]) * r + 2.0 * (k[idx] - lim["k0"])
    d_vertical = slope if log_scale else slope * r

    r1, r2 = nullcline_traces(beta, theta)
    if log_scale:
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(r1 > 0, np.log(np.abs(r1)), np.nan)
            r2 = np.where(r2 > 0, np.log(np.abs(r2)), np.nan)

    portrait = dict()
    portrait["field"] = {
        "sheet": sheets,
        "theta": theta[idx],
        "r_or_a": grid_v,
        "d_r_or_a": d_vertical,
        "d_theta": d_theta,
    }
    portrait["nullclines"] = {"theta": theta, "r1": r1, "r2": r2}
    return portrait
