import os
import platform
import re
import sys
from functools import partial
from importlib.metadata import PackageNotFoundError, requires, version
from typing import IO, Callable, Iterable, List, Optional, Tuple

import numpy as np
import psutil

EXTRAS = ("build", "doc", "test", "style")

LABEL_WIDTH = 26


def sys_info(fid: Optional[IO] = None, developer: bool = False):
    """Print the platform, hardware, numerics and dependency versions.

    Parameters
    ----------
    fid : file-like, default=None
        The file to write to, passed to :func:`print`.
        Can be None to use :data:`sys.stdout`.
    developer : bool, default=False
        If True, also list the packages of the optional extras.
    """
    out = partial(print, end="", file=fid)
    package = __package__.split(".")[0]

    _write_rows(out, _platform_rows())

    out("\nNumerics\n")
    _write_rows(out, _numerics_rows())

    out("\nDependencies info\n")
    _write_rows(out, [(package, _version_or_missing(package))])
    _write_rows(out, _dependency_rows(_requirements(package)))

    if developer:
        for key in EXTRAS:
            dependencies = _requirements(package, extra=key)
            if not dependencies:
                continue
            out(f"\nOptional '{key}' info\n")
            _write_rows(out, _dependency_rows(dependencies))


def _platform_rows() -> List[Tuple[str, str]]:
    gib = float(2**30)
    return [
        ("Platform", platform.platform()),
        ("Python", sys.version.replace("\n", " ")),
        ("Executable", sys.executable),
        ("CPU", platform.processor()),
        ("Physical cores", str(psutil.cpu_count(False))),
        ("Logical cores", str(psutil.cpu_count(True))),
        ("RAM", f"{psutil.virtual_memory().total / gib:0.1f} GB"),
        ("SWAP", f"{psutil.swap_memory().total / gib:0.1f} GB"),
    ]


def _numerics_rows() -> List[Tuple[str, str]]:
    finfo = np.finfo(float)
    return [
        ("Float epsilon", repr(float(finfo.eps))),
        ("Float max", repr(float(finfo.max))),
        ("LOGSPIRAL_LOG", os.environ.get("LOGSPIRAL_LOG", "(unset)")),
    ]


def _write_rows(out: Callable, rows: Iterable[Tuple[str, str]]):
    for label, value in rows:
        out(f"{label}:".ljust(LABEL_WIDTH) + value + "\n")


def _requirements(package: str, extra: Optional[str] = None) -> List[str]:
    """Requirement strings of the package, optionally of one extra only."""
    try:
        reqs = requires(package) or []
    except PackageNotFoundError:
        return []
    if extra is None:
        selected = [elt for elt in reqs if "extra" not in elt]
    else:
        markers = (f"extra == '{extra}'", f'extra == "{extra}"')
        selected = [elt for elt in reqs if any(m in elt for m in markers)]
    return [elt.split(";")[0].rstrip() for elt in selected]


def _version_or_missing(name: str) -> str:
    try:
        return version(name)
    except PackageNotFoundError:
        return "Not found."


def _dependency_rows(dependencies: List[str]) -> List[Tuple[str, str]]:
    """Pair each requirement's distribution name with its installed version.

    Parameters
    ----------
    dependencies : List[str]
        requirement strings, possibly with version specifiers or extras

    Returns
    -------
    rows : List[Tuple[str, str]]
        (name, version) pairs; missing packages report 'Not found.'
    """
    rows = []
    for dep in dependencies:
        name = re.split(r"[\[<>=!~ ]", dep, maxsplit=1)[0]
        rows.append((name, _version_or_missing(name)))
    return rows
