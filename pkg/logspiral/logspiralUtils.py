"""
This module provides the output helpers of the logspiral package: JSON
envelopes, CSV tables with metadata headers, and conversion of results to
plain JSON-compatible values.
"""

# ==============================================================================
# CONSTANTS

SCHEMA_VERSION = 1

FLOAT_FORMAT = "%.17g"

# ==============================================================================
# FUNCTIONS

# ------------------------------------------------------------------------------
# conversion


def to_jsonable(obj):
    """
    Convert a result into values the json module can write.

    Infinite and undefined floats become the strings '+inf', '-inf' and
    'nan'; complex numbers become {'re': ..., 'im': ...}; numpy scalars and
    arrays become Python floats, ints and lists; tuples and sets become
    lists (sets sorted).

    Parameters
    ----------
    obj : object
        Result to convert.

    Returns
    -------
    object
        JSON-compatible copy of `obj`.
    """
    import math

    import numpy as np

    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(value) for value in sorted(obj)]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(value) for value in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "+inf" if value > 0 else "-inf"
        return value
    return obj


def parse_grid(grid):
    """
    Parse a grid string 'WxH' into two positive integers.

    Parameters
    ----------
    grid : str
        Grid string such as '61x61'.

    Returns
    -------
    tuple of int
        (width, height).

    Raises
    ------
    ValueError
        If the string is malformed.
    """
    try:
        width, height = (int(part) for part in str(grid).lower().split("x"))
    except ValueError:
        raise ValueError("ERROR: grid must be given as WxH, got " + repr(grid))
    if width < 1 or height < 1:
        raise ValueError("ERROR: grid dimensions must be positive, got " + repr(grid))
    return width, height


# ------------------------------------------------------------------------------
# writers


def envelope(command, payload, beta=None):
    """
    Wrap a result in the JSON envelope shared by every subcommand.

    Parameters
    ----------
    command : str
        Subcommand name.
    payload : dict
        Result fields.
    beta : float, default: None
        Resolved shape parameter; its band label is added when given.

    Returns
    -------
    dict
        Dictionary with 'schema_version', 'command', 'beta', 'band' and the
        payload fields.
    """
    from .criticality import band_label

    document = dict()
    document["schema_version"] = SCHEMA_VERSION
    document["command"] = command
    document["beta"] = beta
    document["band"] = band_label(beta) if beta is not None else None
    for key, value in payload.items():
        if key not in document:
            document[key] = value
    return to_jsonable(document)


def write_json(document, out=None):
    """
    Write a JSON document to a file or to standard output.

    Floats are written with their shortest round-trip representation, so
    repeated runs give byte-identical files.

    Parameters
    ----------
    document : dict
        JSON-compatible document (see `envelope`).
    out : str, default: None
        Output file; None writes to standard output.
    """
    import json
    import sys

    text = json.dumps(document, indent=2, allow_nan=False) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fp:
            fp.write(text)


def write_csv(frame, metadata=None, out=None):
    """
    Write a table as CSV with '#'-prefixed metadata lines before the header.

    Parameters
    ----------
    frame : pandas.DataFrame
        Table to write.
    metadata : dict, default: None
        Key-value pairs written as '# key: value' lines.
    out : str, default: None
        Output file; None writes to standard output.
    """
    import sys

    lines = []
    for key, value in (metadata or {}).items():
        lines.append("# " + str(key) + ": " + _format_meta(value) + "\n")
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")

    if out is None:
        sys.stdout.write("".join(lines) + body)
    else:
        with open(out, "w", newline="\n") as fp:
            fp.write("".join(lines) + body)


def _format_meta(value):
    import json

    if isinstance(value, str):
        return value
    return json.dumps(to_jsonable(value), sort_keys=True)


# ------------------------------------------------------------------------------
# tables


def kernel_frame(values):
    """Table with columns theta, K, K1, K2 from `eval_kernel` output."""
    import numpy as np
    import pandas as pd

    return pd.DataFrame(
        {key: np.atleast_1d(values[key]) for key in ("theta", "K", "K1", "K2")}
    )


def trajectory_frame(trajectory):
    """
    Table of a trajectory with columns t_or_s, i1_or_r, i2_or_a, theta.

    Original runs fill the columns with t, I1, I2, theta. Reparametrized
    runs fill them with s, R, A = log|R| and theta, and append the
    quadratures L and t.
    """
    import numpy as np
    import pandas as pd

    samples = np.asarray(trajectory["samples"], dtype=float)
    if trajectory["system"] == "original":
        return pd.DataFrame(
            {
                "t_or_s": samples[:, 0],
                "i1_or_r": samples[:, 1],
                "i2_or_a": samples[:, 2],
                "theta": samples[:, 3],
            }
        )

    r = samples[:, 1]
    with np.errstate(divide="ignore"):
        a = np.where(r != 0.0, np.log(np.abs(r)), np.nan)
    return pd.DataFrame(
        {
            "t_or_s": samples[:, 0],
            "i1_or_r": r,
            "i2_or_a": a,
            "theta": samples[:, 2],
            "L": samples[:, 3],
            "t": samples[:, 4],
        }
    )


def portrait_frame(portrait):
    """
    Table of a phase portrait: vector-field rows followed by nullcline rows.

    Columns are kind ('field', 'nullcline_r1' or 'nullcline_r2'), sheet,
    theta, r_or_a, d_r_or_a and d_theta; the derivatives are empty on
    nullcline rows.
    """
    import numpy as np
    import pandas as pd

    field = pd.DataFrame(portrait["field"])
    field.insert(0, "kind", "field")

    frames = [field[["kind", "sheet", "theta", "r_or_a", "d_r_or_a", "d_theta"]]]
    nullclines = portrait["nullclines"]
    for name in ("r1", "r2"):
        trace = pd.DataFrame(
            {
                "kind": "nullcline_" + name,
                "sheet": np.nan,
                "theta": nullclines["theta"],
                "r_or_a": nullclines[name],
                "d_r_or_a": np.nan,
                "d_theta": np.nan,
            }
        )
        frames.append(trace)
    return pd.concat(frames, ignore_index=True)


def sweep_frame(sweep):
    """Table of a basin sweep with columns a_or_r, theta, sheet, destination_id, case_id."""
    import pandas as pd

    return pd.DataFrame(sweep["rows"], columns=sweep["columns"])
