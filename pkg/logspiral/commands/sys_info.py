import argparse

from .. import sys_info


def run(argv=None):
    """Print platform, numerics and dependency information."""
    parser = argparse.ArgumentParser(
        prog=f"{__package__.split('.')[0]}-sys_info",
        description="platform, hardware, numerics and dependency versions",
    )
    parser.add_argument(
        "--developer",
        help="also list the packages of the optional extras",
        action="store_true",
    )
    parser.add_argument(
        "--out",
        help="write the report to this file instead of standard output",
        default=None,
    )
    args = parser.parse_args(argv)

    if args.out is None:
        sys_info(developer=args.developer)
    else:
        with open(args.out, "w") as fid:
            sys_info(fid=fid, developer=args.developer)
