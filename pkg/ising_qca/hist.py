# -*- coding: utf-8 -*-

"""Histograms of layer magnetizations and their bimodality."""

from dataclasses import dataclass
import logging
from pathlib import Path

import numpy as np
from tabulate import tabulate

from .configuration import add_config_options, config_from_options
from .exceptions import ConfigurationError
from . import my
from . import util

logger = logging.getLogger(__name__)

RANGE = (-0.5, 0.5)


def histogram(values, bin_width=0.005):
    """Counts of `values` in bins of `bin_width` covering [-1/2, 1/2].

    Returns
    -------
    centers, counts : numpy.ndarray
        The bin centers and the number of values in each bin.
    """
    if bin_width <= 0:
        raise ValueError(f"The bin width must be positive, not {bin_width}.")
    width = RANGE[1] - RANGE[0]
    n_bins = int(round(width / bin_width))
    if n_bins < 1 or abs(n_bins * bin_width - width) > 1e-9:
        raise ValueError(f"The bin width {bin_width} does not divide [-0.5, 0.5].")
    edges = np.linspace(RANGE[0], RANGE[1], n_bins + 1)
    counts, _ = np.histogram(np.clip(values, RANGE[0], RANGE[1]), bins=edges)
    return 0.5 * (edges[:-1] + edges[1:]), counts


def coarsen(centers, counts, factor):
    """Merge groups of `factor` neighbouring bins."""
    if factor < 1 or counts.size % factor != 0:
        raise ValueError(f"Cannot merge {counts.size} bins in groups of {factor}.")
    merged = counts.reshape(-1, factor).sum(axis=1)
    return centers.reshape(-1, factor).mean(axis=1), merged


def local_maxima(counts):
    """Indices of the local maxima of a histogram.

    A run of equal, nonzero counts is a maximum if both neighbouring runs are
    lower, the ends of the histogram counting as lower. The index reported is
    the middle of the run.
    """
    counts = np.asarray(counts)
    starts = np.flatnonzero(np.diff(counts, prepend=np.nan) != 0)
    ends = np.append(starts[1:], counts.size)
    values = counts[starts]
    maxima = []
    for r, (start, end) in enumerate(zip(starts, ends)):
        if values[r] <= 0:
            continue
        left = values[r - 1] if r > 0 else -np.inf
        right = values[r + 1] if r + 1 < values.size else -np.inf
        if values[r] > left and values[r] > right:
            maxima.append((start + end - 1) // 2)
    return maxima


@dataclass
class Bimodality:
    """The two highest peaks of a histogram and the valley between them."""

    maxima: list
    peaks: list
    valley: tuple

    @property
    def is_bimodal(self):
        """Exactly two local maxima, with centers of opposite sign."""
        if len(self.maxima) != 2:
            return False
        (c1, _), (c2, _) = self.maxima
        return c1 * c2 < 0

    def table(self):
        rows = [["peak", c, n] for c, n in self.peaks]
        if self.valley is not None:
            rows.append(["valley", self.valley[0], self.valley[1]])
        return rows


def bimodality(centers, counts):
    """Locate the two highest local maxima and the minimum between them."""
    indices = local_maxima(counts)
    maxima = [(float(centers[i]), int(counts[i])) for i in indices]
    highest = sorted(indices, key=lambda i: (-counts[i], i))[:2]
    highest.sort()
    peaks = [(float(centers[i]), int(counts[i])) for i in highest]
    valley = None
    if len(highest) == 2:
        low, high = highest
        j = low + int(np.argmin(counts[low : high + 1]))
        valley = (float(centers[j]), int(counts[j]))
    return Bimodality(maxima, peaks, valley)


@dataclass
class HistogramReport:
    """A histogram at the requested width and its coarsened version."""

    centers: np.ndarray
    counts: np.ndarray
    fine: Bimodality
    coarse: Bimodality
    coarsen: int

    @property
    def is_bimodal(self):
        return self.coarse.is_bimodal

    def summary(self):
        return {
            "bimodal": self.is_bimodal,
            "coarsen": self.coarsen,
            "maxima": self.fine.maxima,
            "peaks": self.fine.peaks,
            "valley": self.fine.valley,
            "coarse_maxima": self.coarse.maxima,
            "coarse_peaks": self.coarse.peaks,
            "coarse_valley": self.coarse.valley,
        }

    def print(self, title):
        print(title)
        headers = ["", "mx", "count"]
        print(tabulate(self.fine.table(), headers, tablefmt="simple"))
        print(
            f"Coarsened by {self.coarsen}: {len(self.coarse.maxima)} local maxima, "
            f"{'bimodal' if self.is_bimodal else 'not bimodal'}"
        )
        print(tabulate(self.coarse.table(), headers, tablefmt="simple"))


def histogram_report(values, bin_width=0.005, factor=10):
    centers, counts = histogram(values, bin_width)
    coarse_centers, coarse_counts = coarsen(centers, counts, factor)
    return HistogramReport(
        centers,
        counts,
        bimodality(centers, counts),
        bimodality(coarse_centers, coarse_counts),
        factor,
    )


def read_layer(path, layer):
    """The mx values of one layer of a trajectory CSV file."""
    rows = util.read_csv(path, ["sample_id", "layer", "mx"])
    try:
        values = [float(row["mx"]) for row in rows if int(row["layer"]) == layer]
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"The trajectory file '{path}' is malformed: {e}")
    if len(values) == 0:
        raise ConfigurationError(
            f"Layer {layer} is not in the trajectory file '{path}'."
        )
    return np.array(values)


def setup(parser):
    """Define the command-line interface for histograms.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        The main parser for the application.
    """
    subparser = parser.add_parser(
        "hist",
        help="Histogram the magnetizations of one layer of a trajectory file.",
        allow_abbrev=False,
    )
    subparser.set_defaults(func=hist)
    subparser.add_argument("trajectories", help="The CSV file written by 'evolve'.")
    subparser.add_argument(
        "--output",
        default=None,
        help="The histogram CSV file, by default <trajectories>.hist.csv",
    )
    add_config_options(subparser, "histogram")


def hist():
    my.logger.debug("Entering hist")
    config = config_from_options(my.options)
    output = my.options.output
    if output is None:
        path = Path(my.options.trajectories)
        output = path.with_name(path.stem + ".hist.csv")
    cmd_hist(my.options.trajectories, config, output)
    return 0


def cmd_hist(trajectories, config, output):
    """Histogram one layer of a trajectory file.

    Writes `bin_center,count` to `output` with the bimodality report in the
    sibling JSON file, and prints the report.
    """
    settings = config["histogram"]
    layer = settings["layer"]
    bin_width = settings["bin-width"]
    factor = settings["coarsen"]

    values = read_layer(trajectories, layer)
    report = histogram_report(values, bin_width, factor)
    with util.removing_on_error(output, util.metadata_path(output)):
        util.write_csv(
            output, ["bin_center", "count"], zip(report.centers, report.counts)
        )
        util.write_metadata(
            output,
            {
                "trajectories": str(trajectories),
                "layer": layer,
                "bin_width": bin_width,
                "n_values": len(values),
                **report.summary(),
            },
        )
    report.print(f"Layer {layer} of {trajectories}: {len(values)} values")
    return report
