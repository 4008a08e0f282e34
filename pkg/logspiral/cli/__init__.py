"""
logspiral CLI
"""

import sys

from ..logspiralMain import _parse_arguments, run_logspiral
from ..utils._errors import DOMAIN_ERRORS


def _error_document(error):
    from ..logspiralUtils import SCHEMA_VERSION

    document = dict()
    document["schema_version"] = SCHEMA_VERSION
    document["error"] = type(error).__name__
    document["message"] = str(error)
    return document


def main(argv=None):
    """
    Entry point of the 'logspiral' command.

    Parameters
    ----------
    argv : list of str, default: None
        Command-line arguments; None uses sys.argv.

    Returns
    -------
    int
        Exit status: 0 success, 1 failed verification, 2 usage error,
        3 domain error.
    """
    import logging

    from ..logspiralUtils import write_json

    # say hello
    print("", file=sys.stderr)
    print("-----------------------------", file=sys.stderr)
    print("logspiral", file=sys.stderr)
    print("-----------------------------", file=sys.stderr)
    print("", file=sys.stderr)

    # parse arguments
    try:
        argsDict = _parse_arguments(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    if argsDict is None:
        return 0

    # run logspiral
    try:
        argsDict = run_logspiral(argsDict["command"], argsDict=argsDict)
    except DOMAIN_ERRORS as e:
        logging.error(str(e))
        write_json(_error_document(e))
        return 3
    except ValueError as e:
        logging.error(str(e))
        return 2

    return argsDict["status"]
