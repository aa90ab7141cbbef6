# -*- coding: utf-8 -*-

"""Stationary phase diagrams and cuts at fixed V, for both closures."""

import logging

import numpy as np
from tabulate import tabulate

from .configuration import add_config_options, config_from_options
from .correlations import corr_phase_diagram, corr_scan_points
from . import integrator
from .meanfield import PhaseDiagramGrid, axis, phase_diagram, scan_points
from . import metadata
from . import my
from . import util

logger = logging.getLogger(__name__)

# The ODE closures read only kappa from [model] and workers from [numerics].
PHASE_DIAGRAM_UNUSED = (
    "--omega",
    "--v",
    "--dt",
    "--n",
    "--depth",
    "--chi-mps",
    "--chi-mpo",
    "--seed",
    "--samples",
    "--engine",
    "--discarded-weight-warning",
)


def setup(parser):
    """Define the command-line interface for phase diagrams.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        The main parser for the application.
    """
    subparser = parser.add_parser(
        "phase-diagram",
        help="The stationary order parameter |mx| over a grid of (Omega, V).",
        allow_abbrev=False,
    )
    subparser.set_defaults(func=run_phase_diagram)
    subparser.add_argument(
        "--output",
        default="phase_diagram.csv",
        help="The CSV file, defaults to '%(default)s'",
    )
    subparser.add_argument(
        "--cut-v",
        type=float,
        default=None,
        help="Scan only Omega at this V, using --omega-min/--omega-max/--points.",
    )
    add_config_options(
        subparser,
        "model",
        "numerics",
        "phase-diagram",
        exclude=PHASE_DIAGRAM_UNUSED,
    )


def run_phase_diagram():
    my.logger.debug("Entering phase-diagram")
    config = config_from_options(my.options)
    cmd_phase_diagram(config, my.options.output, cut_v=my.options.cut_v)
    return 0


def phase_cut(
    v,
    omega_range,
    points,
    q=2,
    closure="mf",
    kappa=1.0,
    dt_ode=integrator.DEFAULT_DT,
    t_max=integrator.DEFAULT_T_MAX,
    tolerance=integrator.DEFAULT_TOLERANCE,
    workers=None,
):
    """|mx| along Omega at a fixed V.

    Parameters
    ----------
    v : float
        The interaction.
    omega_range : (float, float)
        The ends of the Omega axis, inclusive.
    points : int
        The number of Omega values, >= 2.
    closure : str
        "mf" or "nn".

    Returns
    -------
    PhaseDiagramGrid
        A grid with a single V column.
    """
    if closure not in metadata.closures:
        raise ValueError(f"Unknown closure '{closure}', not one of {metadata.closures}")
    omegas = axis(omega_range, points)
    vs = np.full(omegas.size, float(v))
    scan = scan_points if closure == "mf" else corr_scan_points
    abs_mx, converged = scan(omegas, vs, q, kappa, dt_ode, t_max, tolerance, workers)
    cut = PhaseDiagramGrid(
        omegas,
        np.array([float(v)]),
        abs_mx.reshape(-1, 1),
        converged.reshape(-1, 1),
        closure=closure,
        q=q,
        metadata={"kappa": kappa, "dt_ode": dt_ode, "t_max": t_max, "cut_v": v},
    )
    if cut.n_unconverged > 0:
        logger.warning(
            f"{cut.n_unconverged} of {omegas.size} points of the cut at V={v} did "
            f"not converge by t={t_max}."
        )
    return cut


def ferromagnetic_interval(cut, threshold=1.0e-2):
    """The lowest and highest Omega of a cut with |mx| > threshold, or None."""
    mask = cut.ferromagnetic(threshold)[:, 0]
    if not np.any(mask):
        return None
    omegas = cut.omega[mask]
    return float(omegas.min()), float(omegas.max())


def cmd_phase_diagram(config, output, cut_v=None):
    """Compute a phase diagram, or a cut at V = `cut_v`, and write it as CSV.

    The CSV holds `omega,v,abs_mx`, with a `closure` column for the
    correlation closure. Convergence flags go to the sibling JSON file.
    """
    settings = config["phase-diagram"]
    closure = settings["closure"]
    q = settings["q"]
    kappa = config.get("model", "kappa")
    omega_range = (settings["omega-min"], settings["omega-max"])
    v_range = (settings["v-min"], settings["v-max"])
    options = {
        "kappa": kappa,
        "dt_ode": settings["dt-ode"],
        "t_max": settings["t-max"],
        "workers": config.workers,
    }

    paths = [output, util.metadata_path(output), util.config_path(output)]
    with util.removing_on_error(*paths):
        if cut_v is not None:
            grid = phase_cut(
                cut_v, omega_range, settings["points"], q, closure, **options
            )
        elif closure == "mf":
            grid = phase_diagram(omega_range, v_range, settings["points"], q, **options)
        else:
            grid = corr_phase_diagram(
                omega_range, v_range, settings["points"], q, **options
            )
        grid.write_csv(output)
        config.save(
            util.config_path(output), prolog=f"Resolved configuration of {output}"
        )

    rows = [
        ["closure", closure],
        ["q", q],
        ["points", grid.abs_mx.size],
        ["ferromagnetic", int(np.count_nonzero(grid.ferromagnetic()))],
        ["max |mx|", float(grid.abs_mx.max())],
        ["unconverged", grid.n_unconverged],
    ]
    if cut_v is not None:
        interval = ferromagnetic_interval(grid)
        rows.append(["FM interval in Omega", "none" if interval is None else interval])
    print(tabulate(rows, tablefmt="simple"))
    print(f"Wrote {output}")
    return grid
