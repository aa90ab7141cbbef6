# -*- coding: utf-8 -*-

"""Train the jump operator and map the loss landscape."""

import logging

from tabulate import tabulate

from .configuration import add_config_options, config_from_options
from .model import JumpParams
from . import my
from .training import (
    EngineSettings,
    default_training_inputs,
    ensemble_histograms,
    generate_training_data,
    loss_landscape,
    train,
)
from . import util

logger = logging.getLogger(__name__)


def setup(parser):
    """Define the command-line interface for training.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        The main parser for the application.
    """
    subparser = parser.add_parser(
        "train",
        help="Fit J(a, b) to the outputs of a reference QCA.",
        allow_abbrev=False,
    )
    subparser.set_defaults(func=run_train)
    subparser.add_argument(
        "--output",
        default="training.json",
        help="The JSON file of the run, defaults to '%(default)s'",
    )
    add_config_options(subparser, "model", "numerics", "training", "histogram")

    subparser = parser.add_parser(
        "landscape",
        help="The training loss on a grid of (a, b).",
        allow_abbrev=False,
    )
    subparser.set_defaults(func=run_landscape)
    subparser.add_argument(
        "--output",
        default="landscape.csv",
        help="The CSV file, defaults to '%(default)s'",
    )
    add_config_options(subparser, "model", "numerics", "training")


def run_train():
    my.logger.debug("Entering train")
    config = config_from_options(my.options)
    cmd_train(config, my.options.output)
    return 0


def run_landscape():
    my.logger.debug("Entering landscape")
    config = config_from_options(my.options)
    cmd_landscape(config, my.options.output)
    return 0


def engine_settings(config):
    numerics = config["numerics"]
    return EngineSettings(
        chi_mps=numerics["chi-mps"],
        chi_mpo=numerics["chi-mpo"],
        dense=numerics["engine"] == "dense",
    )


def training_data(config):
    """The reference QCA and its training pairs for a configuration."""
    settings = config["training"]
    reference = JumpParams(settings["reference-a"], settings["reference-b"])
    pairs = generate_training_data(
        reference,
        default_training_inputs(),
        config.model_params(),
        engine_settings(config),
    )
    return reference, pairs


def cmd_train(config, output):
    """Run the descent and write it as JSON.

    With ensemble-samples > 0 the output-layer histograms of the untrained
    and trained QCA are added to the run's metadata.
    """
    settings = config["training"]
    params = config.model_params()
    chi = engine_settings(config)
    init = JumpParams(settings["a"], settings["b"])

    with util.removing_on_error(output, util.config_path(output)):
        reference, pairs = training_data(config)
        run = train(
            init,
            pairs,
            params,
            settings["epsilon"],
            settings["repetitions"],
            chi,
            h=settings["h"],
            patience=settings["patience"],
            workers=config.workers,
        )
        run.metadata.update(
            {
                "command": "train",
                **util.provenance(),
                "parameters": dict(config["model"]),
                "reference": {"a": reference.a, "b": reference.b},
                "engine": config.get("numerics", "engine"),
                "pairs": [
                    {"input": pair.input.row(), "target_mx": pair.target_mx}
                    for pair in pairs
                ],
            }
        )

        samples = settings["ensemble-samples"]
        if samples > 0:
            histogram = config["histogram"]
            reports = ensemble_histograms(
                {"untrained": init, "trained": run.final_parameters},
                params,
                chi,
                samples=samples,
                seed=config.get("numerics", "seed"),
                bin_width=histogram["bin-width"],
                coarsen=histogram["coarsen"],
                workers=config.workers,
            )
            run.metadata["histograms"] = {
                name: report.summary() for name, report in reports.items()
            }
            for name, report in reports.items():
                report.print(f"Output layer of the {name} QCA, {samples} samples")

        run.to_json(output)
        config.save(
            util.config_path(output), prolog=f"Resolved configuration of {output}"
        )

    a, b = run.parameters[-1]
    rows = [
        ["initial", init.a, init.b, run.initial_loss],
        ["final", a, b, run.final_loss],
        ["reference", reference.a, reference.b, None],
    ]
    print(tabulate(rows, ["", "a", "b", "loss"], tablefmt="simple"))
    print(f"Wrote {output}")
    return run


def cmd_landscape(config, output):
    """Evaluate the loss on the configured (a, b) window and write `a,b,loss`."""
    settings = config["training"]
    params = config.model_params()
    a_range = (settings["landscape-a-min"], settings["landscape-a-max"])
    b_range = (settings["landscape-b-min"], settings["landscape-b-max"])

    paths = [output, util.metadata_path(output), util.config_path(output)]
    with util.removing_on_error(*paths):
        reference, pairs = training_data(config)
        landscape = loss_landscape(
            a_range,
            b_range,
            settings["landscape-points"],
            pairs,
            params,
            engine_settings(config),
            workers=config.workers,
        )
        landscape.write_csv(output)
        a_min, b_min, loss_min = landscape.minimum()
        extent = landscape.sublevel_extent()
        start = (settings["a"], settings["b"])
        util.write_metadata(
            output,
            {
                "command": "landscape",
                "parameters": dict(config["model"]),
                "reference": {"a": reference.a, "b": reference.b},
                "minimum": {"a": a_min, "b": b_min, "loss": loss_min},
                "sublevel_extent": extent,
                "start": {"a": start[0], "b": start[1]},
                "loss_at_start": landscape.loss_near(*start),
            },
        )
        config.save(
            util.config_path(output), prolog=f"Resolved configuration of {output}"
        )

    rows = [
        ["minimum", a_min, b_min, loss_min],
        ["start", start[0], start[1], landscape.loss_near(*start)],
    ]
    print(tabulate(rows, ["", "a", "b", "loss"], tablefmt="simple"))
    print(
        f"The 2x sublevel set around the minimum spans {extent[0]} x {extent[1]} cells"
    )
    print(f"Wrote {output}")
    return landscape
