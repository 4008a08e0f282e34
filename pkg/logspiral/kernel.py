"""
This module provides functions to evaluate the interaction kernel K of a
two-branch logarithmic spiral and its first two derivatives.

All kernel functions live on the fundamental domain (0, 2*pi). Negative
arguments map through 2*pi - theta, and the angle 0 is served only by the
one-sided limits in `kernel_limits`.

"""

# ==============================================================================
# IMPORTS

import cmath
import functools
import math

import numpy as np

from .utils._errors import SpiralDomainError

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# parameters


def check_beta(beta):
    """
    Validate the shape parameter and return it as a float.

    Parameters
    ----------
    beta : float
        Spiral shape parameter, any finite nonzero real.

    Returns
    -------
    float
        The validated shape parameter.

    Raises
    ------
    SpiralDomainError
        If beta is zero or not finite.
    """
    try:
        beta = float(beta)
    except (TypeError, ValueError):
        raise SpiralDomainError("ERROR: beta must be a real number, got " + repr(beta))

    if not math.isfinite(beta):
        raise SpiralDomainError("ERROR: beta must be finite, got " + repr(beta))
    if beta == 0.0:
        raise SpiralDomainError("ERROR: beta must be nonzero")

    return beta


def check_theta(theta):
    """
    Validate angles against the open fundamental domain (0, 2*pi).

    Parameters
    ----------
    theta : float or array_like
        Angle(s) in radians.

    Returns
    -------
    numpy.ndarray
        Angles as a float array (0-d for scalar input).

    Raises
    ------
    SpiralDomainError
        If any angle lies outside (0, 2*pi).
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any(theta <= 0.0) or np.any(
        theta >= 2.0 * np.pi
    ):
        raise SpiralDomainError(
            "ERROR: theta must lie strictly inside (0, 2*pi), got "
            + np.array2string(theta, precision=17)
        )
    return theta


@functools.lru_cache(maxsize=256)
def spiral_params(beta):
    """
    Derived constants of the spiral shape parameter.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (nonzero).

    Returns
    -------
    dict
        Dictionary with keys 'beta', 'z' (2*pi*(beta-i)/(1+beta^2)), 'gamma'
        (4*pi/(1+beta^2)), 'c' (z/pi, the derivative factor) and 'E'
        (exp(2z) - 1).
    """
    beta = check_beta(beta)
    z = 2.0 * np.pi * complex(beta, -1.0) / (1.0 + beta**2)
    params = dict()
    params["beta"] = beta
    params["z"] = z
    params["gamma"] = 4.0 * np.pi / (1.0 + beta**2)
    params["c"] = z / np.pi
    params["E"] = np.exp(2.0 * z) - 1.0
    return params


# ------------------------------------------------------------------------------
# kernel values


def _kernel_arrays(beta, theta):
    # K, K', K'' on an already validated angle array
    p = spiral_params(beta)
    c = p["c"]
    w = np.exp(np.asarray(theta, dtype=float) * c) / p["E"]
    return 0.5 * w.imag, 0.5 * (c * w).imag, 0.5 * (c * c * w).imag


def _kernel_pair(beta, theta):
    """Values at theta and at the reflected angle -theta in one evaluation.

    Returns K(theta), K'(theta), K''(theta), K(-theta), K'(-theta), K''(-theta)
    with the branch convention -theta := 2*pi - theta.
    """
    theta = np.asarray(theta, dtype=float)
    k, k1, k2 = _kernel_arrays(beta, np.stack([theta, 2.0 * np.pi - theta]))
    return k[0], k1[0], k2[0], k[1], k1[1], k2[1]


def eval_kernel(beta, theta):
    """
    Evaluate the kernel and its first two derivatives.

    The three values come from one complex exponential
    w = exp(2kz) / (exp(2z) - 1), k = theta / (2*pi):
    K = Im(w)/2, K' = Im(c*w)/2 and K'' = Im(c^2*w)/2 with the derivative
    factor c = 2*(beta - i)/(1 + beta^2).

    Parameters
    ----------
    beta : float
        Spiral shape parameter (nonzero, negative values allowed).
    theta : float or array_like
        Angle(s) strictly inside (0, 2*pi).

    Returns
    -------
    dict
        Dictionary with keys 'theta', 'K', 'K1', 'K2'. Values are floats for
        scalar input and arrays otherwise.

    Raises
    ------
    SpiralDomainError
        If beta is zero or theta lies outside (0, 2*pi).
    """
    beta = check_beta(beta)
    theta = check_theta(theta)

    k, k1, k2 = _kernel_arrays(beta, theta)

    values = dict()
    values["theta"] = _unwrap(theta)
    values["K"] = _unwrap(k)
    values["K1"] = _unwrap(k1)
    values["K2"] = _unwrap(k2)
    return values


def eval_kernel_reflected(beta, theta):
    """
    Evaluate the kernel at the reflected angle -theta := 2*pi - theta.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    theta : float or array_like
        Angle(s) strictly inside (0, 2*pi).

    Returns
    -------
    dict
        Same layout as `eval_kernel`, with 'theta' holding the input angle.
    """
    theta = check_theta(theta)
    values = eval_kernel(beta, 2.0 * np.pi - theta)
    values["theta"] = _unwrap(theta)
    return values


@functools.lru_cache(maxsize=256)
def kernel_limits(beta):
    """
    One-sided limits of the kernel at theta = 0.

    K is continuous at 0 but K' and K'' jump: K'(+0) - K'(-0) = 1/(1+beta^2)
    and K''(+0) - K''(-0) = 4*beta/(1+beta^2)^2. K'(0) denotes the midpoint
    of the one-sided first derivatives.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.

    Returns
    -------
    dict
        Dictionary with keys 'k0', 'k1_plus0', 'k1_minus0', 'k1_zero',
        'k2_plus0', 'k2_minus0'.
    """
    p = spiral_params(beta)
    c = p["c"]
    inv = 1.0 / p["E"]

    k1_plus0 = 0.5 * (c * inv).imag
    k2_plus0 = 0.5 * (c * c * inv).imag

    limits = dict()
    limits["k0"] = 0.5 * inv.imag
    limits["k1_plus0"] = k1_plus0
    limits["k1_minus0"] = k1_plus0 + 0.5 * c.imag
    limits["k1_zero"] = 0.5 * (limits["k1_plus0"] + limits["k1_minus0"])
    limits["k2_plus0"] = k2_plus0
    limits["k2_minus0"] = k2_plus0 + 0.5 * (c * c).imag
    return limits


def eval_kernel_mp(beta, theta, dps=40):
    """
    Evaluate the kernel in extended precision through the sine form.

    Uses K = Re[exp(2kz) exp(-z) / sin(iz)] / 4 with mpmath arithmetic and
    numerical differentiation at working precision. This is an independent
    path to the closed form used by `eval_kernel` and serves as an oracle.

    Parameters
    ----------
    beta : float
        Spiral shape parameter.
    theta : float
        Angle strictly inside (0, 2*pi).
    dps : int, default: 40
        Decimal digits of working precision.

    Returns
    -------
    dict
        Dictionary with keys 'theta', 'K', 'K1', 'K2' as floats.
    """
    from .utils._imports import import_optional_dependency

    mpmath = import_optional_dependency(
        "mpmath", extra="mpmath is needed for extended-precision kernel checks."
    )

    beta = check_beta(beta)
    theta = float(check_theta(theta))

    with mpmath.workdps(dps):
        b = mpmath.mpf(beta)
        z = 2 * mpmath.pi * mpmath.mpc(b, -1) / (1 + b**2)

        def k_of(t):
            k = t / (2 * mpmath.pi)
            return mpmath.re(
                mpmath.exp(2 * k * z) * mpmath.exp(-z) / mpmath.sin(1j * z)
            ) / 4

        t0 = mpmath.mpf(theta)
        values = dict()
        values["theta"] = theta
        values["K"] = float(k_of(t0))
        values["K1"] = float(mpmath.diff(k_of, t0, 1))
        values["K2"] = float(mpmath.diff(k_of, t0, 2))

    return values


# ------------------------------------------------------------------------------
# auxiliary


def _unwrap(x):
    x = np.asarray(x)
    if x.ndim == 0:
        return float(x)
    return x


def _kernel_pair_scalar(beta, theta):
    # scalar counterpart of _kernel_pair for right-hand sides of the ODEs
    p = spiral_params(beta)
    c = p["c"]
    c2 = c * c
    w = cmath.exp(theta * c) / p["E"]
    wm = cmath.exp((2.0 * math.pi - theta) * c) / p["E"]
    return (
        0.5 * w.imag,
        0.5 * (c * w).imag,
        0.5 * (c2 * w).imag,
        0.5 * wm.imag,
        0.5 * (c * wm).imag,
        0.5 * (c2 * wm).imag,
    )
