"""
This module provides the numerical audit of the kernel properties and of
the working assumptions on the roots, the angle orderings, the fixed point
of F and the nullcline slopes that the classification relies on.

Every check is evaluated on a grid of shape parameters and reports its
worst margin (positive means the property holds at every sample) together
with the parameter values where the worst margin occurs.

"""

# ==============================================================================
# IMPORTS

import logging
import math

import numpy as np
from scipy.integrate import quad

from .classify import _map_tasks
from .criticality import (
    _theta_stars,
    eval_Fprime_pi,
    solve_alpha,
    solve_asymmetric_fixed_point,
    solve_critical_betas,
)
from .dynamics import _rhs_reparam
from .equilibria import ATTRACTOR, REPELLER, SADDLE, WORDING_FLAG, list_equilibria
from .kernel import (
    _kernel_arrays,
    _kernel_pair,
    _kernel_pair_scalar,
    eval_kernel,
    eval_kernel_mp,
    kernel_limits,
)
from .utils._errors import DOMAIN_ERRORS, SpiralDomainError

# ==============================================================================
# CONSTANTS

TWO_PI = 2.0 * math.pi

PASS = "pass"
FAIL = "fail"
SKIPPED_NEAR_CRITICAL = "skipped-near-critical"
SKIPPED_OUT_OF_RANGE = "skipped-out-of-range"
SKIPPED_MISSING_DEPENDENCY = "skipped-missing-dependency"

VERIFY_GUARD = 1e-3

DEFAULT_BETA_MIN = 0.05
DEFAULT_BETA_MAX = 5.0
DEFAULT_BETA_POINTS = 200

PAIR_BOUND_POINTS = 50
SIGN_TABLE_POINTS = 200
SIGN_TABLE_EXCLUSION = 1e-4
ALPHA_SCAN_POINTS = 2000
SLOPE_GRID_POINTS = 50
UPPER_SLOPE_POINTS = 200
STRIP_RATIOS = np.logspace(-3.0, 3.0, 50)

JUMP_STEP = 1e-6
JUMP_TOL = 1e-10
QUADRATURE_TOL = 1e-8
QUADRATURE_ALPHAS = (1.0, math.pi, 4.0)
EXTENDED_PRECISION_TOL = 1e-9
EXTENDED_PRECISION_THETAS = (0.5, math.pi, 5.0)

KIND_TABLE_BETAS = (0.3, 0.5, 0.63, 0.8, 0.93, 1.2, 1.8)

LEMMA_CHECKS = (
    ("kprime_zero_negative", "K'(0) < 0"),
    ("kprime_pair_bound", "|K'(a) + K'(-a)| < -2 K'(0) on a grid of angles a"),
    ("kprime_pi_bound", "|K'(pi)| < -K'(0)"),
    ("kprime_jump", "K'(+0) - K'(-0) = 1/(1 + beta^2) from interior samples"),
    (
        "theta_star_kprime_signs",
        "K'(theta1) > 0, K'(theta2) < 0, K'(theta3) > 0",
    ),
    (
        "kprime_plus0_sign",
        "K'(+0) < 0 on (0,beta0) and (beta2,beta3), K'(+0) > 0 elsewhere",
    ),
    ("k_minus_k0_sign_table", "sign of K(theta) - K(0) per band"),
    ("quadrature_kprime_zero", "K'(0) = -4 beta int K'^2"),
    (
        "quadrature_kprime_pair",
        "K'(a) + K'(-a) = -8 beta int K'(theta) K'(theta + a)",
    ),
    (
        "kernel_extended_precision",
        "closed-form kernel agrees with the extended-precision sine form",
    ),
)

ASSUMPTION_CHECKS = (
    ("theta_stars_decreasing", "theta1, theta2, theta3 decrease in beta"),
    ("angle_ordering", "ordering of theta_i and 2*pi - theta_i per band"),
    (
        "alpha_unique",
        "K'(theta) - K'(0) changes sign once, at alpha in (pi, 2*pi), with K''(alpha) < 0",
    ),
    ("fprime_pi_sign", "F'(pi) > 0 below beta_star and < 0 above"),
    (
        "thetabar_unique",
        "unique zero of F in (0, pi) with F' < 0 below beta_star, none above",
    ),
    (
        "slope_inequality_lower_band",
        "|(log R1)'(theta)| < (log R2)'(eta) on (theta2, 2*pi - theta2) for beta < beta1",
    ),
    (
        "slope_inequality_upper_band",
        "(log R1)'(theta) > 0 on (thetabar, 2*pi - thetabar) for beta1 < beta < beta_star",
    ),
    (
        "invariant_strip",
        "theta' >= 0 on theta = theta2 and <= 0 on theta = 2*pi - theta2 for R > 0, beta < beta1",
    ),
    ("equilibrium_kind_table", "equilibrium kinds at the reference shape parameters"),
)

NOTES = [
    WORDING_FLAG
    + ": (1,pi) is classified from its eigenvalues; for beta > beta_star it is"
    " a saddle (negative determinant), not a repeller.",
    "interpreted_k_equals_k0: destinations (-inf, theta0) of finite-time cases"
    " are read as K(-theta0) = K(0).",
    "slope_inequality_upper_band is checked for beta in (beta1, beta_star) and"
    " theta in (thetabar, 2*pi - thetabar) only.",
]

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# grid and guards


def default_beta_grid(
    beta_min=DEFAULT_BETA_MIN, beta_max=DEFAULT_BETA_MAX, points=DEFAULT_BETA_POINTS
):
    """Evenly spaced grid of shape parameters."""
    if not 0.0 < beta_min < beta_max or int(points) < 2:
        raise SpiralDomainError(
            "ERROR: the verification grid needs 0 < beta_min < beta_max and at"
            " least two points"
        )
    return np.linspace(beta_min, beta_max, int(points))


def _near_critical(beta, crit):
    for name, value in crit.items():
        if abs(beta - value) < VERIFY_GUARD:
            return name
    return None


def _labelled_roots(beta):
    thetas, degenerate = _theta_stars(beta)
    labels = ["theta1", "theta2", "theta3"][3 - len(thetas) :]
    return dict(zip(labels, thetas)), degenerate


def expected_finite_kinds(beta):
    """
    Expected kinds of the finite equilibria at a shape parameter.

    (1,pi) is expected to be a saddle above beta_star, following its
    eigenvalues.

    Parameters
    ----------
    beta : float
        Spiral shape parameter (positive, away from critical values).

    Returns
    -------
    dict
        Equilibrium id -> kind.
    """
    crit = solve_critical_betas()
    kinds = dict()
    kinds["(1,pi)"] = ATTRACTOR if beta < crit["beta_star"] else SADDLE
    if beta < crit["beta_star"]:
        kinds["(Rbar,thetabar)"] = SADDLE
        kinds["(1/Rbar,2pi-thetabar)"] = SADDLE
    kinds["(0,2pi)"] = ATTRACTOR
    if beta < crit["beta3"]:
        kinds["(0,theta3)"] = REPELLER
    if beta < crit["beta2"]:
        kinds["(0,theta2)"] = SADDLE
    if beta < crit["beta0"]:
        kinds["(0,theta1)"] = REPELLER
    if beta < crit["beta0"] or crit["beta2"] < beta < crit["beta3"]:
        kinds["(0,0)"] = SADDLE
    else:
        kinds["(0,0)"] = REPELLER
    kinds["(-1,0)"] = SADDLE
    kinds["(-1,2pi)"] = SADDLE
    return kinds


# ------------------------------------------------------------------------------
# per-beta margins


def _k1(beta, theta):
    return _kernel_pair_scalar(beta, theta)[1]


def _lemma_margins(args):
    beta, with_mp = args
    crit = solve_critical_betas()
    lim = kernel_limits(beta)
    k10 = lim["k1_zero"]
    margins = []

    margins.append(("kprime_zero_negative", -k10, {"k1_zero": k10}))

    alphas = (np.arange(PAIR_BOUND_POINTS) + 0.5) * TWO_PI / PAIR_BOUND_POINTS
    _, k1, _, _, k1m, _ = _kernel_pair(beta, alphas)
    gap = -2.0 * k10 - np.abs(k1 + k1m)
    i = int(np.argmin(gap))
    margins.append(("kprime_pair_bound", float(gap[i]), {"alpha": float(alphas[i])}))

    k1pi = _k1(beta, math.pi)
    margins.append(("kprime_pi_bound", -k10 - abs(k1pi), {"k1_pi": k1pi}))

    # linear extrapolation of interior samples to both sides of 0
    near = _kernel_pair_scalar(beta, JUMP_STEP)
    far = _kernel_pair_scalar(beta, 2.0 * JUMP_STEP)
    plus0 = 2.0 * near[1] - far[1]
    minus0 = 2.0 * near[4] - far[4]
    err = abs(plus0 - minus0 - 1.0 / (1.0 + beta**2))
    margins.append(("kprime_jump", JUMP_TOL - err, {"error": err}))

    roots, _ = _labelled_roots(beta)
    if roots:
        expected = {"theta1": 1.0, "theta2": -1.0, "theta3": 1.0}
        signed = [(lab, expected[lab] * _k1(beta, t), t) for lab, t in roots.items()]
        lab, worst, t = min(signed, key=lambda x: x[1])
        margins.append(
            ("theta_star_kprime_signs", worst, {"root": lab, "theta": t})
        )

    negative = beta < crit["beta0"] or crit["beta2"] < beta < crit["beta3"]
    k1p = lim["k1_plus0"]
    margins.append(
        (
            "kprime_plus0_sign",
            -k1p if negative else k1p,
            {"k1_plus0": k1p, "expected": "negative" if negative else "positive"},
        )
    )

    theta = (np.arange(SIGN_TABLE_POINTS) + 0.5) * TWO_PI / SIGN_TABLE_POINTS
    for t in roots.values():
        theta = theta[np.abs(theta - t) > SIGN_TABLE_EXCLUSION]
    k, _, _ = _kernel_arrays(beta, theta)
    positive = _expected_k_positive(beta, theta, roots, crit)
    signed = np.where(positive, 1.0, -1.0) * (k - lim["k0"])
    i = int(np.argmin(signed))
    margins.append(
        ("k_minus_k0_sign_table", float(signed[i]), {"theta": float(theta[i])})
    )

    integral, _ = quad(
        lambda t: _k1(beta, t) ** 2, 0.0, TWO_PI, limit=200, epsabs=1e-14, epsrel=1e-12
    )
    rel = abs(k10 + 4.0 * beta * integral) / abs(k10)
    margins.append(("quadrature_kprime_zero", QUADRATURE_TOL - rel, {"relative_error": rel}))

    worst = None
    for alpha in QUADRATURE_ALPHAS:
        integral, _ = quad(
            lambda t, a=alpha: _k1(beta, t) * _k1(beta, (t + a) % TWO_PI),
            0.0,
            TWO_PI,
            points=[TWO_PI - alpha],
            limit=200,
            epsabs=1e-14,
            epsrel=1e-12,
        )
        pair = _k1(beta, alpha) + _k1(beta, TWO_PI - alpha)
        rel = abs(pair + 8.0 * beta * integral) / abs(k10)
        if worst is None or rel > worst[0]:
            worst = (rel, alpha)
    margins.append(
        (
            "quadrature_kprime_pair",
            QUADRATURE_TOL - worst[0],
            {"relative_error": worst[0], "alpha": worst[1]},
        )
    )

    if with_mp:
        worst = (0.0, None)
        for t in EXTENDED_PRECISION_THETAS:
            closed = eval_kernel(beta, t)
            oracle = eval_kernel_mp(beta, t)
            for key in ("K", "K1", "K2"):
                err = abs(closed[key] - oracle[key]) / max(1.0, abs(oracle[key]))
                if err >= worst[0]:
                    worst = (err, t)
        margins.append(
            (
                "kernel_extended_precision",
                EXTENDED_PRECISION_TOL - worst[0],
                {"relative_error": worst[0], "theta": worst[1]},
            )
        )

    return margins


def _expected_k_positive(beta, theta, roots, crit):
    t1, t2, t3 = (roots.get(lab) for lab in ("theta1", "theta2", "theta3"))
    if beta < crit["beta0"]:
        return ((theta > t1) & (theta < t2)) | (theta > t3)
    if beta < crit["beta2"]:
        return (theta < t2) | (theta > t3)
    if beta < crit["beta3"]:
        return theta > t3
    return np.ones_like(theta, dtype=bool)


def _ordering_chain(beta, roots, crit):
    t1, t2, t3 = (roots.get(lab) for lab in ("theta1", "theta2", "theta3"))
    if beta < crit["beta0"]:
        return [t1, TWO_PI - t3, t2, TWO_PI - t2, t3, TWO_PI - t1]
    if beta < crit["beta1"]:
        return [TWO_PI - t3, t2, TWO_PI - t2, t3]
    if beta < crit["beta2"]:
        return [t2, TWO_PI - t3, t3, TWO_PI - t2]
    if beta < 1.0:
        return [TWO_PI - t3, t3]
    if beta < crit["beta3"]:
        return [t3, TWO_PI - t3]
    return None


def _log_r1_slope(beta, theta, k10):
    _, k1, k2, _, k1m, k2m = _kernel_pair(beta, theta)
    return k2 / (k1 - k10) + k2m / (k1m - k10)


def _assumption_margins(args):
    beta, _ = args
    crit = solve_critical_betas()
    lim = kernel_limits(beta)
    k10 = lim["k1_zero"]
    roots, degenerate = _labelled_roots(beta)
    margins = []

    if abs(beta - 1.0) >= VERIFY_GUARD:
        chain = _ordering_chain(beta, roots, crit)
        if chain is not None:
            steps = np.diff(chain)
            i = int(np.argmin(steps))
            margins.append(
                ("angle_ordering", float(steps[i]), {"position": i, "chain": chain})
            )

    try:
        alpha = solve_alpha(beta)
        left = (np.arange(ALPHA_SCAN_POINTS) + 0.5) * math.pi / ALPHA_SCAN_POINTS
        _, k1_left, _ = _kernel_arrays(beta, left)
        k2a = _kernel_pair_scalar(beta, alpha)[2]
        margin = min(float(np.min(k1_left - k10)), -k2a)
        margins.append(("alpha_unique", margin, {"alpha": alpha, "k2_alpha": k2a}))
    except DOMAIN_ERRORS as e:
        margins.append(("alpha_unique", -1.0, {"error": str(e)}))

    fpi = eval_Fprime_pi(beta)
    below = beta < crit["beta_star"]
    margins.append(
        ("fprime_pi_sign", fpi if below else -fpi, {"fprime_pi": fpi})
    )

    asym = None
    try:
        asym = solve_asymmetric_fixed_point(beta)
        if below:
            if asym is None:
                margins.append(("thetabar_unique", -1.0, {"present": False}))
            else:
                margins.append(
                    (
                        "thetabar_unique",
                        -asym["fprime"],
                        {"theta_bar": asym["theta_bar"], "fprime": asym["fprime"]},
                    )
                )
        elif asym is None:
            margins.append(("thetabar_unique", -fpi, {"present": False}))
        else:
            margins.append(
                ("thetabar_unique", -1.0, {"present": True, "theta_bar": asym["theta_bar"]})
            )
    except DOMAIN_ERRORS as e:
        margins.append(("thetabar_unique", -1.0, {"error": str(e)}))

    if beta < crit["beta1"] and "theta2" in roots:
        t2 = roots["theta2"]
        n = SLOPE_GRID_POINTS
        grid = t2 + (TWO_PI - 2.0 * t2) * (np.arange(n) + 0.5) / n
        k, k1, _, km, k1m, _ = _kernel_pair(beta, grid)
        lhs = np.abs(_log_r1_slope(beta, grid, k10))
        rhs = k1 / (k - lim["k0"]) + k1m / (km - lim["k0"])
        i, j = int(np.argmax(lhs)), int(np.argmin(rhs))
        margins.append(
            (
                "slope_inequality_lower_band",
                float(rhs[j] - lhs[i]),
                {"theta": float(grid[i]), "eta": float(grid[j])},
            )
        )

        dtheta_low = [_rhs_reparam(beta, r, t2)[1] for r in STRIP_RATIOS]
        dtheta_high = [-_rhs_reparam(beta, r, TWO_PI - t2)[1] for r in STRIP_RATIOS]
        low, high = min(dtheta_low), min(dtheta_high)
        margins.append(
            (
                "invariant_strip",
                min(low, high),
                {"theta": t2 if low <= high else TWO_PI - t2},
            )
        )

    if crit["beta1"] < beta < crit["beta_star"] and asym is not None:
        tb = asym["theta_bar"]
        n = UPPER_SLOPE_POINTS
        grid = tb + (TWO_PI - 2.0 * tb) * (np.arange(n) + 0.5) / n
        slope = _log_r1_slope(beta, grid, k10)
        i = int(np.argmin(slope))
        margins.append(
            ("slope_inequality_upper_band", float(slope[i]), {"theta": float(grid[i])})
        )

    margins.append(("_roots", 0.0, {"roots": roots, "degenerate": degenerate}))
    return margins


# ------------------------------------------------------------------------------
# report assembly


def _run_grid(worker, beta_grid, with_mp, n_jobs):
    crit = solve_critical_betas()
    betas = [float(b) for b in beta_grid]
    skipped = []
    admitted = []
    for beta in betas:
        near = _near_critical(beta, crit)
        if near is not None:
            skipped.append({"beta": beta, "near": near})
        else:
            admitted.append(beta)

    results = _map_tasks(worker, [(beta, with_mp) for beta in admitted], n_jobs)
    return admitted, results, skipped


def _summarize(check_id, description, samples, skipped, status_if_empty):
    entry = dict()
    entry["id"] = check_id
    entry["description"] = description
    entry["evaluated"] = len(samples)
    entry["skipped"] = list(skipped)
    if not samples:
        entry["status"] = status_if_empty
        entry["worst"] = None
        return entry

    beta, margin, witness = min(samples, key=lambda s: s[1])
    worst = {"beta": beta, "margin": margin}
    worst.update(witness)
    entry["status"] = PASS if all(s[1] > 0 for s in samples) else FAIL
    entry["worst"] = worst
    return entry


def _collect(checks, admitted, results, skipped, missing=()):
    samples = {check_id: [] for check_id, _ in checks}
    for beta, margins in zip(admitted, results):
        for check_id, margin, witness in margins:
            if check_id in samples:
                samples[check_id].append((beta, float(margin), witness))

    report = []
    for check_id, description in checks:
        if check_id in missing:
            status = SKIPPED_MISSING_DEPENDENCY
        elif skipped and not admitted:
            status = SKIPPED_NEAR_CRITICAL
        else:
            status = SKIPPED_OUT_OF_RANGE
        report.append(
            _summarize(check_id, description, samples[check_id], skipped, status)
        )
    return report


def _grid_summary(beta_grid):
    beta_grid = np.asarray(beta_grid, dtype=float)
    return {
        "beta_min": float(beta_grid.min()),
        "beta_max": float(beta_grid.max()),
        "points": int(beta_grid.size),
    }


def _report(checks, beta_grid):
    report = dict()
    report["beta_grid"] = _grid_summary(beta_grid)
    report["checks"] = checks
    report["passed"] = all(c["status"] != FAIL for c in checks)
    return report


def check_lemmas(beta_grid=None, n_jobs=1):
    """
    Audit the kernel properties on a grid of shape parameters.

    Parameters
    ----------
    beta_grid : array_like, default: None
        Positive shape parameters; None uses `default_beta_grid()`. Points
        within 1e-3 of a critical value are skipped and listed.
    n_jobs : int, default: 1
        Worker processes; -1 uses all physical cores.

    Returns
    -------
    dict
        Dictionary with keys 'beta_grid', 'checks' (list of dicts with 'id',
        'description', 'status', 'evaluated', 'skipped', 'worst') and 'passed'.
    """
    from .utils._imports import import_optional_dependency

    if beta_grid is None:
        beta_grid = default_beta_grid()

    with_mp = import_optional_dependency("mpmath", raise_error=False) is not None
    missing = () if with_mp else ("kernel_extended_precision",)
    if not with_mp:
        logging.warning("mpmath not available, skipping the extended-precision check")

    logging.info("Checking kernel properties on %d shape parameters ...", len(beta_grid))

    admitted, results, skipped = _run_grid(_lemma_margins, beta_grid, with_mp, n_jobs)
    checks = _collect(LEMMA_CHECKS, admitted, results, skipped, missing)
    return _report(checks, beta_grid)


def check_assumptions(beta_grid=None, n_jobs=1):
    """
    Audit the working assumptions on a grid of shape parameters.

    Parameters
    ----------
    beta_grid : array_like, default: None
        Positive shape parameters; None uses `default_beta_grid()`.
    n_jobs : int, default: 1
        Worker processes; -1 uses all physical cores.

    Returns
    -------
    dict
        Same layout as `check_lemmas`.
    """
    if beta_grid is None:
        beta_grid = default_beta_grid()

    logging.info("Checking assumptions on %d shape parameters ...", len(beta_grid))

    admitted, results, skipped = _run_grid(
        _assumption_margins, beta_grid, False, n_jobs
    )
    checks = _collect(ASSUMPTION_CHECKS, admitted, results, skipped)

    # monotonicity across consecutive admitted grid points
    roots = [dict(m[-1][2]["roots"]) for m in results]
    samples = []
    for (b0, r0), (b1, r1) in zip(
        zip(admitted[:-1], roots[:-1]), zip(admitted[1:], roots[1:])
    ):
        for label in set(r0) & set(r1):
            samples.append((b1, r0[label] - r1[label], {"root": label, "previous_beta": b0}))
    by_id = {c["id"]: c for c in checks}
    by_id["theta_stars_decreasing"].update(
        _summarize(
            "theta_stars_decreasing",
            by_id["theta_stars_decreasing"]["description"],
            samples,
            skipped,
            SKIPPED_OUT_OF_RANGE,
        )
    )

    samples = []
    for beta in KIND_TABLE_BETAS:
        expected = expected_finite_kinds(beta)
        found = {e["id"]: e["kind"] for e in list_equilibria(beta)}
        mismatches = sorted(
            node for node, kind in expected.items() if found.get(node) != kind
        )
        extra = sorted(
            node
            for node in found
            if node not in expected and "inf" not in node
        )
        bad = mismatches + extra
        samples.append((beta, 1.0 if not bad else -float(len(bad)), {"mismatches": bad}))
    by_id["equilibrium_kind_table"].update(
        _summarize(
            "equilibrium_kind_table",
            by_id["equilibrium_kind_table"]["description"],
            samples,
            [],
            SKIPPED_OUT_OF_RANGE,
        )
    )

    return _report(checks, beta_grid)


def run_verification(beta_grid=None, n_jobs=1):
    """
    Run every check and assemble the verification report.

    Parameters
    ----------
    beta_grid : array_like, default: None
        Positive shape parameters; None uses `default_beta_grid()`.
    n_jobs : int, default: 1
        Worker processes; -1 uses all physical cores.

    Returns
    -------
    dict
        Dictionary with keys 'beta_grid', 'critical_betas', 'checks',
        'notes' and 'passed'.
    """
    if beta_grid is None:
        beta_grid = default_beta_grid()

    lemmas = check_lemmas(beta_grid, n_jobs=n_jobs)
    assumptions = check_assumptions(beta_grid, n_jobs=n_jobs)

    report = _report(lemmas["checks"] + assumptions["checks"], beta_grid)
    report["critical_betas"] = dict(solve_critical_betas())
    report["notes"] = list(NOTES)

    failed = [c["id"] for c in report["checks"] if c["status"] == FAIL]
    if failed:
        logging.warning("Failed checks: %s", ", ".join(failed))
    else:
        logging.info("All checks passed.")

    return report
