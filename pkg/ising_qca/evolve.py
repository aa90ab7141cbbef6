# -*- coding: utf-8 -*-

"""Evolve a Z2-balanced ensemble of product states through the QCA."""

import logging

import numpy as np

from .channel import evolve_ensemble
from .configuration import add_config_options, config_from_options
from . import my
from .sampling import sample_initial_states, write_manifest
from . import util

logger = logging.getLogger(__name__)

TRAJECTORY_HEADER = ["sample_id", "layer", "mx"]


def setup(parser):
    """Define the command-line interface for evolving ensembles.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        The main parser for the application.
    """
    subparser = parser.add_parser(
        "evolve",
        help="Evolve random product states layer by layer.",
        allow_abbrev=False,
    )
    subparser.set_defaults(func=evolve)
    subparser.add_argument(
        "--output",
        default="trajectories.csv",
        help="The trajectory CSV file, defaults to '%(default)s'",
    )
    subparser.add_argument(
        "--manifest",
        default=None,
        help="Also write the initial states to this CSV file.",
    )
    add_config_options(subparser, "model", "jump", "numerics")


def evolve():
    my.logger.debug("Entering evolve")
    config = config_from_options(my.options)
    cmd_evolve(config, my.options.output, my.options.manifest)
    return 0


def trajectory_rows(specs, trajectories):
    for spec, trajectory in zip(specs, trajectories):
        for layer, mx in enumerate(trajectory.mx):
            yield spec.sample_id, layer, mx


def cmd_evolve(config, output, manifest=None):
    """Sample the ensemble, evolve it and write `sample_id,layer,mx`.

    Parameters
    ----------
    config : RunConfig
        The validated configuration.
    output : str or pathlib.Path
        The trajectory file. The metadata and the resolved configuration are
        written beside it.
    manifest : str or pathlib.Path
        Optionally, where to write the initial states.

    Returns
    -------
    [channel.Trajectory]
        The trajectories, in the order of the sample ids.
    """
    params = config.model_params()
    jp = config.jump_params()
    numerics = config["numerics"]
    dense = numerics["engine"] == "dense"
    seed = numerics["seed"]

    specs = sample_initial_states(numerics["samples"] // 2, seed)
    logger.info(
        f"Evolving {len(specs)} states through {params.depth} layers of "
        f"{params.n_sites} sites with the {numerics['engine']} engine."
    )

    paths = [output, util.metadata_path(output), util.config_path(output)]
    if manifest is not None:
        paths.append(manifest)
    with util.removing_on_error(*paths):
        trajectories = evolve_ensemble(
            specs,
            params,
            jp,
            chi_mps=numerics["chi-mps"],
            chi_mpo=numerics["chi-mpo"],
            dense=dense,
            workers=config.workers,
            discarded_weight_warning=numerics["discarded-weight-warning"],
        )
        util.write_csv(output, TRAJECTORY_HEADER, trajectory_rows(specs, trajectories))
        if manifest is not None:
            write_manifest(manifest, specs)

        depth = params.depth
        discarded = np.zeros(depth)
        drifts = np.zeros(depth)
        bonds = np.zeros(depth, dtype=int)
        for trajectory in trajectories:
            discarded = np.maximum(discarded, trajectory.discarded_weights)
            drifts = np.maximum(drifts, trajectory.trace_drifts)
            if len(trajectory.max_bonds) == depth:
                bonds = np.maximum(bonds, trajectory.max_bonds)
        util.write_metadata(
            output,
            {
                "command": "evolve",
                "parameters": dict(config["model"]),
                "jump": {"a": jp.a, "b": jp.b},
                "engine": numerics["engine"],
                "chi_mps": None if dense else numerics["chi-mps"],
                "chi_mpo": None if dense else numerics["chi-mpo"],
                "seed": seed,
                "samples": len(specs),
                "max_discarded_weight_per_layer": discarded,
                "max_trace_drift_per_layer": drifts,
                "max_bond_per_layer": None if dense else bonds,
                "manifest": None if manifest is None else str(manifest),
            },
        )
        config.save(
            util.config_path(output), prolog=f"Resolved configuration of {output}"
        )

    print(f"Wrote {len(specs)} trajectories of {depth} layers to {output}")
    return trajectories
