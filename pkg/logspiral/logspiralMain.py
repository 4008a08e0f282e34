"""
This module provides the main functionality of the logspiral package.
"""

# ==============================================================================
# CONSTANTS

COMMANDS = (
    "constants",
    "kernel",
    "equilibria",
    "portrait",
    "simulate",
    "classify",
    "sweep",
    "graph",
    "rates",
    "verify",
)

LOG_LEVELS = {"error": 40, "warn": 30, "warning": 30, "info": 20, "debug": 10}

LOG_ENV = "LOGSPIRAL_LOG"

DEFAULTS = {
    "beta": None,
    "samples": 201,
    "grid": "61x61",
    "log": False,
    "system": "original",
    "i1": None,
    "i2": None,
    "theta": None,
    "t_max": 100.0,
    "direction": "forward",
    "out": None,
    "n_jobs": 1,
    "beta_min": 0.05,
    "beta_max": 5.0,
    "points": 200,
    "rtol": None,
    "atol": None,
    "logfile": None,
}

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# get_version()


def get_version():
    """
    A function to get the version of the 'logspiral' package.

    Returns
    -------
    str
        The version of the 'logspiral' package if installed; otherwise, "unknown".
    """
    from importlib import metadata

    try:
        # requires existing installation
        version = metadata.version("logspiral")
    except Exception:
        # fall-back if package is not installed, but run directly
        version = "unknown"

    return version


def get_help(print_help=True, return_help=False):
    """
    A function to return a help message.

    Parameters
    ----------
    print_help : bool, optional, default: True
        Whether to print the help message.
    return_help : bool, optional, default: False
        Whether to return the help message as a string.

    Returns
    -------
    None or str
        If `print_help` is True, the help message is printed. If `return_help`
        is True, the help message is returned as a string.
    """
    HELPTEXT = """

    logspiral


    ============
    Description:
    ============

    This program analyses the self-similar dynamics of two-branch
    logarithmic spiral vortex sheets with branch strengths I1, I2 and
    opening angle theta. It evaluates the interaction kernel, solves the
    critical shape parameters, lists and classifies the equilibria of the
    planar system in R = I1/I2, integrates trajectories in original and
    reparametrized time, and classifies the long-time behaviour of initial
    data together with asymptotic rate constants.

    All output is plain data: CSV tables with '#'-prefixed metadata lines,
    or one JSON object per invocation with the fields 'schema_version',
    'command', 'beta' and 'band'. Diagnostics go to standard error; their
    verbosity is set by the environment variable LOGSPIRAL_LOG (error,
    warn, info, debug; default: warn).


    ========
    Usage:
    ========

    logspiral <command> [options]

    constants                           critical shape parameters beta0, beta1,
        [--beta B]                      beta_star, beta2, beta3; with --beta
                                        also theta1..3, alpha and (Rbar,
                                        thetabar).

    kernel --beta B [--samples N]       CSV table theta, K, K1, K2 on N
                                        points of (0, 2*pi).

    equilibria --beta B                 JSON list of equilibria with kinds and
                                        eigenvalues.

    portrait --beta B [--grid WxH]      CSV vector-field samples and nullcline
        [--log]                         traces; --log uses A = log|R| on both
                                        sheets R > 0 and R < 0.

    simulate --beta B --i1 X --i2 Y     CSV trajectory. --system original
        --theta T [--t-max T]           integrates I1, I2, theta in time t;
        [--system original|reparam]     --system reparam integrates R, theta
        [--direction fwd|bwd]           in the pseudo-time s and needs I2 > 0.

    classify --beta B --i1 X --i2 Y     JSON behaviour class: case label,
        --theta T [--direction fwd|bwd] destination, blowup time and rates.

    sweep --beta B [--grid WxH]         CSV basin partition of the phase
        [--direction fwd|bwd]           plane with columns a_or_r, theta,
        [--n-jobs N]                    sheet, destination_id, case_id.

    graph --beta B                      JSON predicted heteroclinic graph.

    rates --beta B                      JSON asymptotic rate table for all
                                        cases.

    verify [--beta-min B0]              JSON report of the kernel identities
        [--beta-max B1] [--points N]    and the numerical assumptions on a
        [--n-jobs N]                    beta grid; exit status 1 on failure.

    Common options:

    --out <file>                        write the output to a file instead of
                                        standard output.
    --logfile <file>                    also write the log to a file.
    --rtol, --atol                      integration tolerances (simulate,
                                        classify, sweep).


    ========
    Exit status:
    ========

    0   success
    1   verification failed
    2   usage error
    3   domain error (invalid or near-critical input, missing root,
        unresolved destination, step-size underflow); a JSON object with
        'schema_version', 'error' and 'message' is written to standard
        output


    ========
    Example:
    ========

    logspiral classify --beta 0.3 --i1 1 --i2 1 --theta 3.14159

    """

    if print_help:
        print(HELPTEXT)

    if return_help:
        return HELPTEXT


# ------------------------------------------------------------------------------
# parse_arguments


def _direction(value):
    """Argparse type for fwd/bwd (or forward/backward)."""
    import argparse

    value = str(value).lower()
    if value in ("fwd", "forward"):
        return "forward"
    if value in ("bwd", "backward"):
        return "backward"
    raise argparse.ArgumentTypeError("direction must be fwd or bwd, got " + repr(value))


def _parse_arguments(argv=None):
    """
    An internal function to parse input arguments.

    Parameters
    ----------
    argv : list of str, default: None
        Arguments to parse; None uses sys.argv.

    Returns
    -------
    dict or None
        Dictionary of input arguments, or None if extensive help is requested.

    Notes
    -----
    Usage errors make argparse exit with status 2.
    """
    # imports
    import argparse

    # shared options
    common = argparse.ArgumentParser(add_help=False)
    output = common.add_argument_group("output arguments")
    output.add_argument(
        "--out",
        dest="out",
        help="output file (default: standard output).",
        default=None,
        metavar="<file>",
    )
    output.add_argument(
        "--logfile",
        dest="logfile",
        help="additional log file.",
        default=None,
        metavar="<file>",
    )

    beta_opt = argparse.ArgumentParser(add_help=False)
    beta_opt.add_argument(
        "--beta",
        dest="beta",
        help="spiral shape parameter.",
        type=float,
        required=True,
        metavar="<float>",
    )

    datum = argparse.ArgumentParser(add_help=False)
    initial = datum.add_argument_group("initial datum")
    initial.add_argument("--i1", dest="i1", type=float, required=True, metavar="<float>")
    initial.add_argument("--i2", dest="i2", type=float, required=True, metavar="<float>")
    initial.add_argument(
        "--theta",
        dest="theta",
        help="opening angle in (0, 2*pi).",
        type=float,
        required=True,
        metavar="<float>",
    )

    integration = argparse.ArgumentParser(add_help=False)
    controls = integration.add_argument_group("integration arguments")
    controls.add_argument(
        "--direction",
        dest="direction",
        help="time direction, fwd or bwd (default: fwd).",
        type=_direction,
        default=DEFAULTS["direction"],
        metavar="<fwd|bwd>",
    )
    controls.add_argument(
        "--rtol", dest="rtol", type=float, default=None, metavar="<float>"
    )
    controls.add_argument(
        "--atol", dest="atol", type=float, default=None, metavar="<float>"
    )

    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument(
        "--n-jobs",
        dest="n_jobs",
        help="number of worker processes, -1 for all physical cores (default: 1).",
        type=int,
        default=DEFAULTS["n_jobs"],
        metavar="<int>",
    )

    # parse
    parser = argparse.ArgumentParser(
        prog="logspiral",
        description="""
        Dynamics of two-branch logarithmic spiral vortex sheets: kernel,
        critical parameters, equilibria, trajectories and long-time behaviour.
        """,
        add_help=False,
        formatter_class=argparse.RawTextHelpFormatter,
    )

    help = parser.add_argument_group("getting help")
    help.add_argument(
        "-h", "--help", help="display this help message and exit", action="help"
    )
    help.add_argument(
        "--more-help",
        dest="more_help",
        help="display extensive help message and exit",
        default=False,
        action="store_true",
        required=False,
    )
    help.add_argument(
        "--version", action="version", version="%(prog)s " + get_version()
    )

    sub = parser.add_subparsers(dest="command", metavar="<command>")

    p = sub.add_parser("constants", parents=[common], help="critical shape parameters")
    p.add_argument("--beta", dest="beta", type=float, default=None, metavar="<float>")

    p = sub.add_parser("kernel", parents=[common, beta_opt], help="kernel samples")
    p.add_argument(
        "--samples",
        dest="samples",
        type=int,
        default=DEFAULTS["samples"],
        metavar="<int>",
    )

    sub.add_parser("equilibria", parents=[common, beta_opt], help="equilibrium list")

    p = sub.add_parser("portrait", parents=[common, beta_opt], help="phase portrait data")
    p.add_argument("--grid", dest="grid", default="41x41", metavar="<WxH>")
    p.add_argument("--log", dest="log", default=False, action="store_true")

    p = sub.add_parser(
        "simulate", parents=[common, beta_opt, datum, integration], help="trajectory"
    )
    p.add_argument(
        "--system",
        dest="system",
        choices=["original", "reparam"],
        default=DEFAULTS["system"],
    )
    p.add_argument(
        "--t-max",
        dest="t_max",
        help="original-time horizon (default: 100).",
        type=float,
        default=DEFAULTS["t_max"],
        metavar="<float>",
    )

    sub.add_parser(
        "classify",
        parents=[common, beta_opt, datum, integration],
        help="behaviour class of an initial datum",
    )

    p = sub.add_parser(
        "sweep", parents=[common, beta_opt, integration, jobs], help="basin partition"
    )
    p.add_argument("--grid", dest="grid", default=DEFAULTS["grid"], metavar="<WxH>")

    sub.add_parser("graph", parents=[common, beta_opt], help="heteroclinic graph")
    sub.add_parser("rates", parents=[common, beta_opt], help="asymptotic rate table")

    p = sub.add_parser("verify", parents=[common, jobs], help="numerical checks")
    p.add_argument(
        "--beta-min", dest="beta_min", type=float, default=DEFAULTS["beta_min"]
    )
    p.add_argument(
        "--beta-max", dest="beta_max", type=float, default=DEFAULTS["beta_max"]
    )
    p.add_argument("--points", dest="points", type=int, default=DEFAULTS["points"])

    args = parser.parse_args(argv)

    # check if we should print extensive help
    if args.more_help is True:
        get_help()
        return None

    if args.command is None:
        parser.error("a command is required, one of: " + ", ".join(COMMANDS))

    # prepare output
    argsDict = dict(DEFAULTS)
    argsDict["command"] = args.command
    for key in DEFAULTS:
        if hasattr(args, key):
            argsDict[key] = getattr(args, key)

    #
    return argsDict


# ------------------------------------------------------------------------------
# check arguments


def _check_arguments(argsDict):
    """
    Check input arguments for validity.

    Parameters
    ----------
    argsDict : dict
        Dictionary containing input arguments.

    Raises
    ------
    ValueError
        If a command is unknown, a required argument is missing, or a count,
        grid or range is invalid.

    Returns
    -------
    dict
        Updated dictionary of input arguments.
    """
    # imports
    import logging

    from .logspiralUtils import parse_grid

    command = argsDict["command"]
    if command not in COMMANDS:
        raise ValueError("ERROR: unknown command " + repr(command))

    # required arguments
    needs_beta = command not in ("constants", "verify")
    if needs_beta and argsDict["beta"] is None:
        raise ValueError("ERROR: the '" + command + "' command needs --beta")

    if command in ("simulate", "classify"):
        for key in ("i1", "i2", "theta"):
            if argsDict[key] is None:
                raise ValueError("ERROR: the '" + command + "' command needs --" + key)

    # counts and grids
    if command == "kernel" and argsDict["samples"] < 1:
        raise ValueError("ERROR: --samples must be positive")

    if command in ("portrait", "sweep"):
        argsDict["width"], argsDict["height"] = parse_grid(argsDict["grid"])

    if command == "simulate" and not argsDict["t_max"] > 0:
        raise ValueError("ERROR: --t-max must be positive")

    if command == "verify":
        if argsDict["points"] < 2:
            raise ValueError("ERROR: --points must be at least 2")
        if not 0 < argsDict["beta_min"] < argsDict["beta_max"]:
            raise ValueError("ERROR: need 0 < --beta-min < --beta-max")

    if argsDict["n_jobs"] == 0 or argsDict["n_jobs"] < -1:
        raise ValueError("ERROR: --n-jobs must be positive or -1")

    argsDict["direction"] = {"fwd": "forward", "bwd": "backward"}.get(
        argsDict["direction"], argsDict["direction"]
    )
    if argsDict["direction"] not in ("forward", "backward"):
        raise ValueError("ERROR: direction must be forward or backward")

    logging.info("Command '%s' with arguments %r", command, argsDict)

    return argsDict


# ------------------------------------------------------------------------------
# check packages


def _check_packages():
    """
    An internal function to check required packages.
    """

    import importlib.util
    import sys

    import packaging.version

    if sys.version_info < (3, 9):
        raise RuntimeError("ERROR: Python version must be 3.9 or greater\n")

    for package in ("numpy", "scipy", "pandas"):
        if importlib.util.find_spec(package) is None:
            raise ImportError(
                "ERROR: the '"
                + package
                + "' package is required for running this program, please install.\n"
            )

    import pandas as pd

    # 'lineterminator' in DataFrame.to_csv
    if packaging.version.parse(pd.__version__) < packaging.version.parse("1.5"):
        raise ImportError(
            "ERROR: A version >=1.5 of the 'pandas' package is required."
        )


# ------------------------------------------------------------------------------
# start logging


def _start_logging(argsDict):
    """
    Start logging.

    The level is read from the environment variable LOGSPIRAL_LOG (error,
    warn, info or debug; default: warn). Messages go to standard error and,
    with a logfile argument, also to that file.

    Parameters
    ----------
    argsDict : dict
        Dictionary containing input arguments.

    Returns
    -------
    dict
        The dictionary of input arguments.
    """
    # imports
    import logging
    import os
    import sys
    import time
    import traceback

    # setup function to log uncaught exceptions
    def _log_uncaught(exctype, value, tb):
        # log
        logging.error("Error Information:")
        logging.error("Type: %s", exctype)
        logging.error("Value: %s", value)
        for i in traceback.format_list(traceback.extract_tb(tb)):
            logging.error("Traceback: %s", i)
        # message
        logging.error("Status: program exited with errors")

    sys.excepthook = _log_uncaught

    # level
    requested = os.environ.get(LOG_ENV, "warn").strip().lower()
    level = LOG_LEVELS.get(requested, logging.WARNING)

    # set up logging
    logfile_format = "[%(levelname)s: %(filename)s: %(lineno)4d]: %(message)s"
    logfile_handlers = [logging.StreamHandler(sys.stderr)]
    if argsDict.get("logfile") is not None:
        logfile_handlers.append(logging.FileHandler(filename=argsDict["logfile"], mode="w"))
    logging.basicConfig(
        level=level, format=logfile_format, handlers=logfile_handlers, force=True
    )
    logging.captureWarnings(True)

    if requested not in LOG_LEVELS:
        logging.warning(
            "WARNING: unknown %s value %r, using 'warn'", LOG_ENV, requested
        )

    # initial messages
    logging.info("Starting logging for logspiral ...")
    logging.info("Version: %s", get_version())
    logging.info("Date: %s", time.strftime("%d/%m/%Y %H:%M:%S"))

    # log args
    logging.info("Command: " + " ".join(sys.argv))

    # return
    return argsDict


# ------------------------------------------------------------------------------
# commands


def _controls(argsDict):
    controls = dict()
    if argsDict.get("rtol") is not None:
        controls["rtol"] = argsDict["rtol"]
    if argsDict.get("atol") is not None:
        controls["atol"] = argsDict["atol"]
    return controls


def _run_constants(argsDict):
    from .criticality import (
        solve_alpha,
        solve_asymmetric_fixed_point,
        solve_critical_betas,
        solve_theta_stars,
    )
    from .kernel import check_beta

    payload = dict(solve_critical_betas())
    beta = argsDict["beta"]
    if beta is not None:
        beta = check_beta(beta)
        if beta < 0:
            from .utils._errors import SpiralDomainError

            raise SpiralDomainError("ERROR: per-beta constants are tabulated for beta > 0")
        stars = solve_theta_stars(beta)
        angles = dict()
        for label in ("theta1", "theta2", "theta3"):
            angles[label] = stars[label]
        angles["degenerate_gamma"] = stars["degenerate_gamma"]
        angles["alpha"] = solve_alpha(beta)
        asym = solve_asymmetric_fixed_point(beta)
        angles["theta_bar"] = None if asym is None else asym["theta_bar"]
        angles["r_bar"] = None if asym is None else asym["r_bar"]
        payload["angles"] = angles

    return "json", payload, beta


def _run_kernel(argsDict):
    import numpy as np

    from .kernel import check_beta, eval_kernel
    from .logspiralUtils import kernel_frame

    beta = check_beta(argsDict["beta"])
    n = argsDict["samples"]
    # open interval (0, 2*pi)
    theta = (np.arange(n) + 1.0) * (2.0 * np.pi) / (n + 1.0)
    frame = kernel_frame(eval_kernel(beta, theta))
    return "csv", frame, {"command": "kernel", "beta": beta, "samples": n}


def _run_equilibria(argsDict):
    from .equilibria import list_equilibria

    beta = argsDict["beta"]
    return "json", {"equilibria": list_equilibria(beta)}, beta


def _run_portrait(argsDict):
    from .equilibria import phase_portrait
    from .logspiralUtils import portrait_frame

    beta = argsDict["beta"]
    portrait = phase_portrait(
        beta,
        width=argsDict["width"],
        height=argsDict["height"],
        log_scale=argsDict["log"],
    )
    metadata = {
        "command": "portrait",
        "beta": beta,
        "grid": argsDict["grid"],
        "chart": "log" if argsDict["log"] else "linear",
    }
    return "csv", portrait_frame(portrait), metadata


def _run_simulate(argsDict):
    from .dynamics import integrate
    from .logspiralUtils import trajectory_frame
    from .utils._errors import SpiralDomainError

    beta = argsDict["beta"]
    controls = _controls(argsDict)
    i1, i2, theta = argsDict["i1"], argsDict["i2"], argsDict["theta"]

    if argsDict["system"] == "original":
        controls["horizon"] = argsDict["t_max"]
        initial = (i1, i2, theta)
    else:
        if not i2 > 0:
            raise SpiralDomainError(
                "ERROR: the reparametrized system needs I2 > 0; apply the negate symmetry first"
            )
        controls["t_max"] = argsDict["t_max"]
        initial = {"r": i1 / i2, "theta": theta, "i2": i2}

    trajectory = integrate(
        beta, argsDict["system"], initial, argsDict["direction"], controls
    )
    metadata = {
        "command": "simulate",
        "system": trajectory["system"],
        "beta": beta,
        "direction": trajectory["direction"],
        "controls": trajectory["controls"],
        "terminal_event": trajectory["terminal_event"],
    }
    return "csv", trajectory_frame(trajectory), metadata


def _run_classify(argsDict):
    from .classify import classify_behavior

    beta = argsDict["beta"]
    behavior = classify_behavior(
        beta,
        argsDict["i1"],
        argsDict["i2"],
        argsDict["theta"],
        direction=argsDict["direction"],
        controls=_controls(argsDict),
    )
    return "json", behavior, beta


def _run_sweep(argsDict):
    from .classify import basin_sweep
    from .logspiralUtils import sweep_frame

    beta = argsDict["beta"]
    sweep = basin_sweep(
        beta,
        width=argsDict["width"],
        height=argsDict["height"],
        direction=argsDict["direction"],
        controls=_controls(argsDict),
        n_jobs=argsDict["n_jobs"],
    )
    metadata = {
        "command": "sweep",
        "beta": beta,
        "band": sweep["band"],
        "direction": sweep["direction"],
        "grid": argsDict["grid"],
        "cells": sweep["cells"],
        "unresolved": sweep["unresolved"],
    }
    return "csv", sweep_frame(sweep), metadata


def _run_graph(argsDict):
    from .classify import predicted_heteroclinic_graph

    beta = argsDict["beta"]
    return "json", predicted_heteroclinic_graph(beta), beta


def _run_rates(argsDict):
    from .classify import asymptotic_rate_table

    beta = argsDict["beta"]
    return "json", asymptotic_rate_table(beta), beta


def _run_verify(argsDict):
    from .verify import default_beta_grid, run_verification

    grid = default_beta_grid(argsDict["beta_min"], argsDict["beta_max"], argsDict["points"])
    report = run_verification(beta_grid=grid, n_jobs=argsDict["n_jobs"])
    return "json", report, None


_RUNNERS = {
    "constants": _run_constants,
    "kernel": _run_kernel,
    "equilibria": _run_equilibria,
    "portrait": _run_portrait,
    "simulate": _run_simulate,
    "classify": _run_classify,
    "sweep": _run_sweep,
    "graph": _run_graph,
    "rates": _run_rates,
    "verify": _run_verify,
}


# ------------------------------------------------------------------------------
# do logspiral


def _do_logspiral(argsDict):
    """
    Run one logspiral command and write its output.

    Parameters
    ----------
    argsDict : dict
        Dictionary of checked input arguments.

    Returns
    -------
    int
        Exit status: 0 on success, 1 if verification failed.
    """
    # imports
    import logging

    from .logspiralUtils import envelope, write_csv, write_json

    command = argsDict["command"]
    kind, result, extra = _RUNNERS[command](argsDict)

    if kind == "csv":
        write_csv(result, metadata=extra, out=argsDict["out"])
        return 0

    document = envelope(command, result, beta=extra)
    write_json(document, out=argsDict["out"])

    if command == "verify" and not result["passed"]:
        logging.error("ERROR: verification failed")
        return 1
    return 0


# ------------------------------------------------------------------------------
# run logspiral


def run_logspiral(
    command,
    argsDict=None,
    beta=None,
    samples=DEFAULTS["samples"],
    grid=DEFAULTS["grid"],
    log=False,
    system=DEFAULTS["system"],
    i1=None,
    i2=None,
    theta=None,
    t_max=DEFAULTS["t_max"],
    direction=DEFAULTS["direction"],
    out=None,
    n_jobs=DEFAULTS["n_jobs"],
    beta_min=DEFAULTS["beta_min"],
    beta_max=DEFAULTS["beta_max"],
    points=DEFAULTS["points"],
    rtol=None,
    atol=None,
    logfile=None,
):
    """
    Run a logspiral command.

    This is the Python counterpart of the command line: it builds the same
    dictionary of arguments the parser builds, checks it, and writes the
    command's output.

    Parameters
    ----------
    command : str
        One of 'constants', 'kernel', 'equilibria', 'portrait', 'simulate',
        'classify', 'sweep', 'graph', 'rates', 'verify'; ignored when
        `argsDict` is given.
    argsDict : dict, default: None
        Dictionary of input arguments; cannot be combined with keyword
        arguments other than `command`.
    beta : float, default: None
        Spiral shape parameter.
    samples : int, default: 201
        Number of kernel samples.
    grid : str, default: '61x61'
        Grid 'WxH' for 'portrait' and 'sweep'.
    log : bool, default: False
        Log-scaled portrait.
    system : {'original', 'reparam'}, default: 'original'
        Formulation for 'simulate'.
    i1, i2, theta : float, default: None
        Initial datum for 'simulate' and 'classify'.
    t_max : float, default: 100
        Original-time horizon for 'simulate'.
    direction : {'forward', 'backward'}, default: 'forward'
        Time direction.
    out : str, default: None
        Output file; None writes to standard output.
    n_jobs : int, default: 1
        Worker processes for 'sweep' and 'verify'; -1 for all physical cores.
    beta_min, beta_max : float, default: 0.05, 5.0
        Range of the 'verify' beta grid.
    points : int, default: 200
        Number of 'verify' grid points.
    rtol, atol : float, default: None
        Integration tolerances.
    logfile : str, default: None
        Additional log file.

    Returns
    -------
    dict
        The dictionary of input arguments, with the exit status in 'status'.
    """
    if argsDict is None:
        argsDict = dict()
        argsDict["command"] = command
        argsDict["beta"] = beta
        argsDict["samples"] = samples
        argsDict["grid"] = grid
        argsDict["log"] = log
        argsDict["system"] = system
        argsDict["i1"] = i1
        argsDict["i2"] = i2
        argsDict["theta"] = theta
        argsDict["t_max"] = t_max
        argsDict["direction"] = direction
        argsDict["out"] = out
        argsDict["n_jobs"] = n_jobs
        argsDict["beta_min"] = beta_min
        argsDict["beta_max"] = beta_max
        argsDict["points"] = points
        argsDict["rtol"] = rtol
        argsDict["atol"] = atol
        argsDict["logfile"] = logfile
    elif beta is not None or i1 is not None or i2 is not None or theta is not None:
        raise ValueError(
            "ERROR: cannot specify the argsDict and the beta / initial datum arguments at the same time."
        )
    else:
        argsDict = dict(DEFAULTS, **argsDict)

    # start logging
    argsDict = _start_logging(argsDict)

    # check arguments
    argsDict = _check_arguments(argsDict)

    # check packages
    _check_packages()

    # run logspiral
    argsDict["status"] = _do_logspiral(argsDict)

    # return
    return argsDict
