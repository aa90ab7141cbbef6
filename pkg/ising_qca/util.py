# -*- coding: utf-8 -*-

"""Utility methods: provenance, data files and the worker pool."""

import concurrent.futures
import contextlib
import csv
from datetime import datetime, timezone
import importlib.metadata
import json
import logging
import os
from pathlib import Path
import platform

import numpy as np
import scipy

from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

WORKERS_ENVIRONMENT_VARIABLE = "ISING_QCA_WORKERS"


class JSONEncoder(json.JSONEncoder):
    """Class for handling numpy values and paths in JSON."""

    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        elif isinstance(obj, np.bool_):
            return bool(obj)
        elif isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, complex):
            return {"__type__": "complex", "data": [obj.real, obj.imag]}
        elif isinstance(obj, Path):
            return str(obj)
        else:
            return json.JSONEncoder.default(self, obj)


def code_version():
    """The installed version of ising-qca, or 'unknown' from a source tree."""
    try:
        return importlib.metadata.version("ising-qca")
    except importlib.metadata.PackageNotFoundError:
        return "unknown"


def provenance():
    """Versions and time stamp recorded with every output."""
    return {
        "code_version": code_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def format_value(value):
    """Text for a CSV cell, with 17 significant digits for reals."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path, header, rows):
    """Write a CSV file with a fixed header.

    Parameters
    ----------
    path : str or pathlib.Path
        The file to write.
    header : [str]
        The column names.
    rows : iterable
        Sequences of values, one per row.
    """
    path = Path(path)
    with path.open("w", newline="") as fd:
        writer = csv.writer(fd)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])


def read_csv(path, columns):
    """Read a CSV file, checking that it has the given columns.

    Returns
    -------
    [dict(str, str)]
        The rows.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"The file '{path}' does not exist.")
    with path.open(newline="") as fd:
        reader = csv.DictReader(fd)
        if reader.fieldnames is None:
            raise ConfigurationError(f"The file '{path}' is empty.")
        missing = [c for c in columns if c not in reader.fieldnames]
        if len(missing) > 0:
            raise ConfigurationError(
                f"The file '{path}' lacks the column(s) {', '.join(missing)}."
            )
        return list(reader)


def metadata_path(path):
    """The sibling JSON file of an output, e.g. run.csv -> run.json."""
    return Path(path).with_suffix(".json")


def config_path(path):
    """The resolved configuration written next to an output."""
    return Path(path).with_suffix(".config.toml")


def write_metadata(path, data):
    """Write the metadata of the output `path`, with provenance, as JSON.

    Returns
    -------
    pathlib.Path
        The metadata file.
    """
    target = metadata_path(path)
    contents = {"output": Path(path).name, **provenance(), **data}
    target.write_text(json.dumps(contents, indent=4, cls=JSONEncoder) + "\n")
    return target


@contextlib.contextmanager
def removing_on_error(*paths):
    """Delete the listed files if the body raises, then re-raise."""
    try:
        yield
    except BaseException:
        for path in paths:
            path = Path(path)
            if path.exists():
                logger.info(f"Removing the partial output {path}")
                path.unlink()
        raise


def worker_count(requested=None):
    """The number of worker processes.

    Taken from `requested`, else the ISING_QCA_WORKERS environment variable,
    else the number of CPUs.
    """
    if requested is None:
        text = os.environ.get(WORKERS_ENVIRONMENT_VARIABLE)
        if text is not None and text.strip() != "":
            try:
                requested = int(text)
            except ValueError:
                raise ConfigurationError(
                    f"{WORKERS_ENVIRONMENT_VARIABLE}='{text}' is not an integer."
                )
        else:
            requested = os.cpu_count() or 1
    if requested < 1:
        raise ConfigurationError(f"The number of workers must be >= 1: {requested}")
    return requested


def split_evenly(n_items, n_parts):
    """Static division of range(n_items) into at most `n_parts` slices."""
    n_parts = max(1, min(n_parts, n_items))
    bounds = np.linspace(0, n_items, n_parts + 1).round().astype(int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def parallel_map(function, items, workers=None):
    """[function(item) for item in items], using worker processes.

    The results are returned in the order of `items` whatever the order in
    which the workers finish. `function` must be picklable.
    """
    items = list(items)
    n_workers = min(worker_count(workers), len(items))
    if n_workers <= 1:
        return [function(item) for item in items]
    logger.debug(f"Running {len(items)} tasks on {n_workers} processes.")
    with concurrent.futures.ProcessPoolExecutor(max_workers=n_workers) as executor:
        return list(executor.map(function, items))
