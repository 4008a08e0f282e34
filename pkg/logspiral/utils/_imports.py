"""Load optional dependencies on demand."""

import importlib

# Oldest releases the optional code paths are written against.
MIN_VERSIONS = {
    "mpmath": "1.0",
}


def import_optional_dependency(
    name: str,
    extra: str = "",
    raise_error: bool = True,
):
    """Import a package that logspiral only needs for some operations.

    The extended-precision kernel oracle needs mpmath, which is part of the
    'test' extra and not a runtime requirement. A package older than its
    entry in MIN_VERSIONS is treated like a missing one.

    Parameters
    ----------
    name : str
        The module name.
    extra : str, default=""
        Text appended to the error message, typically what the package is
        needed for.
    raise_error : bool, default=True
        If True, a missing or outdated package raises an ImportError; if
        False, None is returned instead.

    Returns
    -------
    module : Optional[ModuleType]
        The imported module, or None when it is unusable and raise_error is
        False.

    Raises
    -------
    ImportError
        If the package is missing or outdated and raise_error is True.
    """
    try:
        module = importlib.import_module(name)
    except ImportError:
        reason = f"Missing optional dependency '{name}'."
    else:
        reason = _version_problem(name, module)
        if reason is None:
            return module

    if not raise_error:
        return None
    raise ImportError(
        f"{reason} {extra} "
        f"Install it with 'pip install {name}' or the 'logspiral[test]' extra."
    )


def _version_problem(name, module):
    from packaging.version import InvalidVersion, Version

    minimum = MIN_VERSIONS.get(name)
    installed = getattr(module, "__version__", None)
    if minimum is None or installed is None:
        return None
    try:
        if Version(installed) >= Version(minimum):
            return None
    except InvalidVersion:
        return None
    return (
        f"Optional dependency '{name}' is version {installed}, "
        f"logspiral needs {minimum} or newer."
    )
