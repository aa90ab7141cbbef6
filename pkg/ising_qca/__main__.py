# -*- coding: utf-8 -*-

"""The main module for running the Ising QCA simulator."""

import argparse
import logging
import sys

from . import cli
from .exceptions import IsingQCAError
from . import metadata
from . import my
from . import util

my.logger = logging.getLogger(__name__)


def run(argv=None):
    """Run a command of the simulator.

    The simulator uses nested parsers to handle commands and options on the
    command line. Each subparser has a default function, which is how the code
    calls the requested command. The exit status follows the class of any
    error the command raises.
    """
    if argv is None:
        argv = sys.argv[1:]

    # Create the argument parser and set the debug level ASAP
    parser = argparse.ArgumentParser(
        prog="ising-qca",
        description="Dissipative Ising quantum cellular automata.",
        allow_abbrev=False,
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"ising-qca version {util.code_version()}",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        type=str.upper,
        choices=["NOTSET", "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help=("The level of informational output, defaults to " "'%(default)s'"),
    )

    # Parse the first options
    if "-h" not in argv and "--help" not in argv:
        options, _ = parser.parse_known_args(argv)
        logging.basicConfig(level=options.log_level)

    # Now setup the rest of the command-line interface.
    cli.setup(parser)

    my.options = parser.parse_args(argv)
    if "func" not in my.options:
        parser.print_help()
        sys.exit(metadata.exit_codes["configuration"])

    try:
        status = my.options.func()
    except IsingQCAError as e:
        my.logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(e.exit_code)
    except ValueError as e:
        my.logger.error(str(e))
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(metadata.exit_codes["configuration"])
    sys.exit(status)


if __name__ == "__main__":
    run()
