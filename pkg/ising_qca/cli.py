# -*- coding: utf-8 -*-

"""Define the command-line interface for the Ising QCA simulator."""

from . import evolve
from . import hist
from . import oracle_check
from . import phase_diagram
from . import train


def setup(parser):
    """Setup the command-line interface, one subcommand per module.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        The main parser for the application.
    """
    subparser = parser.add_subparsers(title="commands")

    evolve.setup(subparser)
    hist.setup(subparser)
    phase_diagram.setup(subparser)
    train.setup(subparser)
    oracle_check.setup(subparser)
