"""
This module provides the scalar root problems of the spiral kernel: the
angles where K(theta) = K(0), the critical shape parameters, the angle alpha
with K'(alpha) = K'(0) and the asymmetric fixed point.

All roots are found by bracketing and Brent's method.

"""

# ==============================================================================
# IMPORTS

import functools
import logging
import warnings

import numpy as np
from scipy.optimize import brentq

from .kernel import (
    _kernel_arrays,
    _kernel_pair,
    _unwrap,
    check_beta,
    check_theta,
    kernel_limits,
    spiral_params,
)
from .utils._errors import NearCriticalError, RootNotFoundError, SpiralDomainError

# ==============================================================================
# CONSTANTS

XTOL = 1e-14
RTOL = 4 * np.finfo(float).eps

# guard band for refusing degenerate beta in root problems
CRITICAL_GUARD = 1e-6

# |gamma - n*pi| below this is treated as the removable case gamma = n*pi
DEGENERATE_GAMMA_TOL = 1e-9

# offset of branch brackets from the poles of f, in units of x = k*gamma
POLE_OFFSET = 1e-12

CRITICAL_NAMES = ("beta0", "beta1", "beta_star", "beta2", "beta3")

ALPHA_SCAN_POINTS = 2000
THETABAR_SCAN_POINTS = 10000

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# helpers


def _check_positive_beta(beta):
    beta = check_beta(beta)
    if beta < 0:
        raise SpiralDomainError(
            "ERROR: beta must be positive here; map negative beta by reflection first"
        )
    return beta


def _brentq(func, lo, hi, what):
    try:
        return brentq(func, lo, hi, xtol=XTOL, rtol=RTOL, maxiter=500)
    except ValueError as e:
        raise RootNotFoundError(
            "ERROR: no sign change while solving for "
            + what
            + " on ["
            + repr(lo)
            + ", "
            + repr(hi)
            + "]: "
            + str(e)
        )


def sign_change_indices(values, floor=0.0):
    """
    Locate sign changes in a sampled function.

    Samples with magnitude at or below `floor` are ignored.

    Parameters
    ----------
    values : array_like
        Sampled function values.
    floor : float, default: 0.0
        Noise floor.

    Returns
    -------
    list of tuple
        Index pairs (i, j) of consecutive retained samples with opposite signs.
    """
    values = np.asarray(values, dtype=float)
    keep = np.flatnonzero(np.abs(values) > floor)
    signs = np.sign(values[keep])
    flips = np.flatnonzero(signs[1:] != signs[:-1])
    return [(int(keep[i]), int(keep[i + 1])) for i in flips]


def guard_critical(beta, guard, names=CRITICAL_NAMES):
    """
    Raise if beta lies within `guard` of one of the named critical values.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).
    guard : float
        Half-width of the guard band.
    names : tuple of str
        Critical values to check, subset of 'beta0', 'beta1', 'beta_star',
        'beta2', 'beta3'.

    Raises
    ------
    NearCriticalError
        If beta is inside a guard band.
    """
    crit = solve_critical_betas()
    for name in names:
        if abs(beta - crit[name]) < guard:
            raise NearCriticalError(
                "ERROR: beta = "
                + repr(beta)
                + " is within "
                + repr(guard)
                + " of the critical value "
                + name
                + " = "
                + repr(crit[name]),
                beta=beta,
                critical=name,
            )


# ------------------------------------------------------------------------------
# K(theta) = K(0)


def _f_branch(x, beta):
    # (cos x - exp(-beta x)) / sin x, with a cancellation-free numerator
    return (-2.0 * np.sin(0.5 * x) ** 2 - np.expm1(-beta * x)) / np.sin(x)


def _theta_stars(beta):
    # roots of K(theta) = K(0) on (0, 2*pi) without the near-critical guard
    gamma = spiral_params(beta)["gamma"]
    n = int(round(gamma / np.pi))

    if abs(gamma - n * np.pi) < DEGENERATE_GAMMA_TOL and n >= 1:
        thetas = [2.0 * np.pi * j / n for j in range(1, n)]
        return thetas, True

    n = int(np.floor(gamma / np.pi))
    target = _f_branch(gamma, beta)

    xs = []
    for j in range(n):
        if j == 0:
            # f tends to beta at 0+ and decreases, so the branch has a root
            # iff f(gamma) < beta
            if not target < beta:
                continue
            lo = 1e-9
        else:
            lo = j * np.pi * (1.0 + POLE_OFFSET)
        hi = (j + 1) * np.pi * (1.0 - POLE_OFFSET)
        x = _brentq(
            lambda x: _f_branch(x, beta) - target,
            lo,
            hi,
            "K(theta) = K(0) on branch " + str(j),
        )
        xs.append(x)

    thetas = sorted(2.0 * np.pi * x / gamma for x in xs)
    return thetas, False


def solve_theta_stars(beta):
    """
    Solve K(theta) = K(0) on (0, 2*pi).

    Writing k = theta/(2*pi) and x = k*gamma, the equation becomes f(k) = f(1)
    with f = (cos x - exp(-beta*x))/sin x, which decreases strictly on every
    branch between consecutive poles x = j*pi. Each full branch inside
    (0, gamma) is searched with a bracketed Brent solve.

    Parameters
    ----------
    beta : float
        Spiral shape parameter, positive and at least 1e-6 away from beta0,
        beta2 and beta3.

    Returns
    -------
    dict
        Dictionary with keys 'thetas' (sorted list), 'labels' (names
        'theta1', 'theta2', 'theta3' assigned from the largest root down),
        'count', 'theta1', 'theta2', 'theta3' (float or None) and
        'degenerate_gamma' (True when gamma = n*pi).

    Raises
    ------
    NearCriticalError
        If beta is within 1e-6 of a count transition.
    """
    beta = _check_positive_beta(beta)
    guard_critical(beta, CRITICAL_GUARD, names=("beta0", "beta2", "beta3"))

    thetas, degenerate = _theta_stars(beta)
    if degenerate:
        warnings.warn(
            "WARNING: gamma = n*pi for beta = "
            + repr(beta)
            + ", roots taken as the one-sided limits 2*pi*j/n."
        )

    labels = ["theta1", "theta2", "theta3"][3 - len(thetas) :]

    solutions = dict()
    solutions["thetas"] = thetas
    solutions["labels"] = labels
    solutions["count"] = len(thetas)
    for label in ("theta1", "theta2", "theta3"):
        solutions[label] = None
    for label, theta in zip(labels, thetas):
        solutions[label] = theta
    solutions["degenerate_gamma"] = degenerate

    logging.debug(
        "beta = %r: %d solutions of K(theta) = K(0): %r", beta, len(thetas), thetas
    )

    return solutions


# ------------------------------------------------------------------------------
# critical parameters


def _g(beta):
    return _f_branch(spiral_params(beta)["gamma"], beta) - beta


def _theta_pair_sum(beta):
    thetas, _ = _theta_stars(beta)
    if len(thetas) != 2:
        raise RootNotFoundError(
            "ERROR: expected two solutions of K(theta) = K(0) at beta = "
            + repr(beta)
            + ", found "
            + str(len(thetas))
        )
    return thetas[0] + thetas[1] - 2.0 * np.pi


@functools.lru_cache(maxsize=1)
def solve_critical_betas():
    """
    Solve the five critical shape parameters.

    beta0, beta2 and beta3 are the zeros of g(beta) = f(1) - beta on the
    intervals (0, 1/sqrt(3)), (1/sqrt(3), 1) and (1, sqrt(3)); beta1 solves
    theta2 + theta3 = 2*pi on (beta0, beta2); beta_star is the sign change
    of F'(pi) on (beta1, beta2).

    Returns
    -------
    dict
        Dictionary with keys 'beta0', 'beta1', 'beta_star', 'beta2', 'beta3'.

    Raises
    ------
    RootNotFoundError
        If any bracket fails to contain a sign change.
    """
    logging.info("Solving critical beta values ...")

    s3 = 1.0 / np.sqrt(3.0)
    eps = 1e-9

    beta0 = _brentq(_g, 1e-3, s3 - eps, "beta0")
    beta2 = _brentq(_g, s3 + eps, 1.0 - eps, "beta2")
    beta3 = _brentq(_g, 1.0 + eps, np.sqrt(3.0) - eps, "beta3")
    beta1 = _brentq(_theta_pair_sum, beta0 + 1e-6, beta2 - 1e-4, "beta1")
    beta_star = _brentq(eval_Fprime_pi, beta1, beta2, "beta_star")

    crit = dict()
    crit["beta0"] = beta0
    crit["beta1"] = beta1
    crit["beta_star"] = beta_star
    crit["beta2"] = beta2
    crit["beta3"] = beta3

    if not beta0 < beta1 < beta_star < beta2 < beta3:
        raise RootNotFoundError(
            "ERROR: critical values are out of order: " + repr(crit)
        )

    logging.info("Critical values: %r", crit)

    return crit


def band_label(beta):
    """
    Name of the open band between critical values that contains beta.

    Parameters
    ----------
    beta : float
        Spiral shape parameter; negative values are labelled by |beta|.

    Returns
    -------
    str
        One of '(0,beta0)', '(beta0,beta1)', '(beta1,beta_star)',
        '(beta_star,beta2)', '(beta2,1)', '(1,beta3)', '(beta3,inf)', or the
        name of the critical value when beta coincides with it.
    """
    b = abs(check_beta(beta))
    crit = solve_critical_betas()
    edges = [
        ("0", 0.0),
        ("beta0", crit["beta0"]),
        ("beta1", crit["beta1"]),
        ("beta_star", crit["beta_star"]),
        ("beta2", crit["beta2"]),
        ("1", 1.0),
        ("beta3", crit["beta3"]),
        ("inf", np.inf),
    ]
    for name, value in edges[1:-1]:
        if abs(b - value) <= 1e-12:
            return name
    for (lo_name, lo), (hi_name, hi) in zip(edges[:-1], edges[1:]):
        if lo < b < hi:
            return "(" + lo_name + "," + hi_name + ")"
    # unreachable for finite nonzero beta
    raise SpiralDomainError("ERROR: cannot place beta = " + repr(beta) + " in a band")


def band_index(beta):
    """Position 0..6 of the band containing |beta| (see `band_label`)."""
    labels = [
        "(0,beta0)",
        "(beta0,beta1)",
        "(beta1,beta_star)",
        "(beta_star,beta2)",
        "(beta2,1)",
        "(1,beta3)",
        "(beta3,inf)",
    ]
    label = band_label(beta)
    if label not in labels:
        raise NearCriticalError(
            "ERROR: beta = " + repr(beta) + " coincides with " + label,
            beta=beta,
            critical=label,
        )
    return labels.index(label)


# ------------------------------------------------------------------------------
# F and its derivative


def eval_F(beta, theta):
    """
    Evaluate F, whose zeros in (0, pi) are the angles of asymmetric fixed points.

    F(theta) = K(0)(K'(-theta) - K'(theta)) + K(theta)(K'(0) - K'(-theta))
    + K(-theta)(K'(theta) - K'(0)), with -theta := 2*pi - theta.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    theta : float or array_like
        Angle(s) strictly inside (0, 2*pi).

    Returns
    -------
    float or numpy.ndarray
        Value(s) of F.
    """
    beta = check_beta(beta)
    theta = check_theta(theta)
    return _unwrap(_F(beta, theta))


def _F(beta, theta):
    lim = kernel_limits(beta)
    k0, k10 = lim["k0"], lim["k1_zero"]
    k, k1, _, km, k1m, _ = _kernel_pair(beta, theta)
    return k0 * (k1m - k1) + k * (k10 - k1m) + km * (k1 - k10)


def eval_Fprime(beta, theta):
    """
    Evaluate the derivative of F at interior angles.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    theta : float or array_like
        Angle(s) strictly inside (0, 2*pi).

    Returns
    -------
    float or numpy.ndarray
        Value(s) of F'.
    """
    beta = check_beta(beta)
    theta = check_theta(theta)

    lim = kernel_limits(beta)
    k0, k10 = lim["k0"], lim["k1_zero"]
    k, k1, k2, km, k1m, k2m = _kernel_pair(beta, theta)

    value = (
        k0 * (-k2m - k2)
        + k1 * (k10 - k1m)
        + k * k2m
        - k1m * (k1 - k10)
        + km * k2
    )
    return _unwrap(value)


def eval_Fprime_pi(beta):
    """
    Closed form F'(pi) = 2K'(pi)(K'(0) - K'(pi)) - 2K''(pi)(K(0) - K(pi)).

    Parameters
    ----------
    beta : float
        Spiral shape parameter.

    Returns
    -------
    float
        F'(pi); positive below beta_star and negative above.
    """
    beta = check_beta(beta)
    lim = kernel_limits(beta)
    k, k1, k2 = _kernel_arrays(beta, np.pi)
    return float(2.0 * k1 * (lim["k1_zero"] - k1) - 2.0 * k2 * (lim["k0"] - k))


# ------------------------------------------------------------------------------
# alpha


@functools.lru_cache(maxsize=256)
def solve_alpha(beta):
    """
    Solve K'(alpha) = K'(0) on (pi, 2*pi).

    A scan of 2000 interior points must show exactly one sign change of
    K'(theta) - K'(0), which is then refined with Brent's method.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive).

    Returns
    -------
    float
        The angle alpha.

    Raises
    ------
    RootNotFoundError
        If the scan does not show exactly one sign change.
    """
    beta = _check_positive_beta(beta)
    k10 = kernel_limits(beta)["k1_zero"]

    def h(theta):
        return _kernel_arrays(beta, theta)[1] - k10

    grid = np.linspace(np.pi, 2.0 * np.pi, ALPHA_SCAN_POINTS + 2)[1:-1]
    flips = sign_change_indices(h(grid))
    if len(flips) != 1:
        raise RootNotFoundError(
            "ERROR: expected exactly one solution of K'(theta) = K'(0) in (pi, 2*pi) "
            "for beta = " + repr(beta) + ", found " + str(len(flips))
        )
    i, j = flips[0]
    alpha = _brentq(lambda t: float(h(t)), grid[i], grid[j], "alpha")

    logging.debug("beta = %r: alpha = %r", beta, alpha)

    return alpha


# ------------------------------------------------------------------------------
# asymmetric fixed point


@functools.lru_cache(maxsize=256)
def solve_asymmetric_fixed_point(beta):
    """
    Locate the asymmetric equilibrium (Rbar, thetabar) of the planar system.

    thetabar is the unique root of F in (0, pi) with a downward crossing,
    found by a 10^4-point scan and Brent refinement; Rbar = R1(thetabar).

    Parameters
    ----------
    beta : float
        Spiral shape parameter, positive and at least 1e-6 away from beta_star.

    Returns
    -------
    dict or None
        Dictionary with keys 'theta_bar', 'r_bar', 'r2_at_theta_bar' and
        'fprime' (F'(thetabar)); None when beta > beta_star.

    Raises
    ------
    NearCriticalError
        If beta is within 1e-6 of beta_star.
    RootNotFoundError
        If the scan does not show exactly one downward crossing below
        beta_star, or shows one above it.
    """
    beta = _check_positive_beta(beta)
    guard_critical(beta, CRITICAL_GUARD, names=("beta_star",))
    below = beta < solve_critical_betas()["beta_star"]

    margin = 1e-9
    grid = np.linspace(margin, np.pi - margin, THETABAR_SCAN_POINTS)
    values = _F(beta, grid)
    floor = 1e-13 * max(1.0, float(np.max(np.abs(values))))
    flips = sign_change_indices(values, floor=floor)

    if not below:
        if flips:
            raise RootNotFoundError(
                "ERROR: F has "
                + str(len(flips))
                + " sign change(s) in (0, pi) for beta = "
                + repr(beta)
                + " above beta_star"
            )
        return None

    if len(flips) != 1 or not values[flips[0][0]] > 0 > values[flips[0][1]]:
        raise RootNotFoundError(
            "ERROR: expected a unique downward zero of F in (0, pi) for beta = "
            + repr(beta)
            + ", found "
            + str(len(flips))
            + " sign change(s)"
        )

    i, j = flips[0]
    theta_bar = _brentq(lambda t: float(_F(beta, t)), grid[i], grid[j], "thetabar")

    lim = kernel_limits(beta)
    k10, k0 = lim["k1_zero"], lim["k0"]
    k, k1, _, km, k1m, _ = _kernel_pair(beta, theta_bar)
    r1 = float((k1 - k10) / (k1m - k10))
    r2 = float((k - k0) / (km - k0))
    if abs(r1 - r2) > 1e-8 * (1.0 + abs(r1)):
        warnings.warn(
            "WARNING: nullclines disagree at thetabar for beta = "
            + repr(beta)
            + ": R1 = "
            + repr(r1)
            + ", R2 = "
            + repr(r2)
        )

    point = dict()
    point["theta_bar"] = theta_bar
    point["r_bar"] = r1
    point["r2_at_theta_bar"] = r2
    point["fprime"] = eval_Fprime(beta, theta_bar)
    return point

