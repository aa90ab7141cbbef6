# !/usr/bin/env python
# -*- coding: utf-8 -*-

"""Reading, updating and writing run configuration files.

The `Configuration` class handles a TOML file as text, section by section, so
that comments in the file are preserved when values are changed. The values
themselves are parsed with tomllib. `RunConfig` layers the built-in defaults,
the user's configuration file, a file given with --config and the
command-line options, and validates the result.
"""

import copy
import json
import logging
import math
from pathlib import Path
import tomllib

from platformdirs import user_config_dir

from .exceptions import ConfigurationError
from . import metadata
from . import my
from .model import JumpParams, ModelParams

logger = logging.getLogger(__name__)


def user_config_file():
    """The per-user configuration file, which need not exist."""
    return Path(user_config_dir("ising-qca")) / "ising-qca.toml"


def toml_value(value):
    """The TOML literal for a Python value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"Cannot write {value!r} to a configuration file.")


class Configuration(object):
    def __init__(self, path=None):
        self._path = None

        "A dictionary to save the text of the configuration file."
        self._data = {}

        # Set the path, which reads the file if it exists
        self.path = path

    def __eq__(self, other):
        "Test if this configuration is equal to another in the sense of text."
        return str(self) == str(other)

    def __str__(self):
        """Create the text of the configuration file."""
        return self.to_string()

    @property
    def path(self):
        """The path to the configuration file."""
        return self._path

    @path.setter
    def path(self, value):
        if value is None:
            self._path = None
            self._data = {}
        else:
            new_path = Path(value).expanduser().resolve()
            if new_path != self._path:
                self._path = new_path
                if new_path.exists():
                    self._read()
                else:
                    self._data = {}

    def add_prolog(self, text="", force=False):
        """Add the prolog, the comments before the first section.

        Parameters
        ----------
        text : str = ''
            The body of the prolog, which should be just comments.
        force : bool = False
            Whether to overwrite an existing prolog.
        """
        if "PROLOG" in self._data and not force:
            raise KeyError("The prolog already exists.")
        self._data["PROLOG"] = text.splitlines()

    def add_section(self, name, text="", force=False):
        """Add a new section to the configuration.

        Parameters
        ----------
        name : str
            The name of the section.
        text : str = ''
            The body of the section, which must be valid TOML.
        force : bool = False
            Whether to overwrite an existing section of the same name.
        """
        if self.section_exists(name) and not force:
            raise KeyError(f"Section '{name}' already exists.")
        section = name.lower()
        self._data[section] = [f"[{name}]"]
        lines = text.splitlines()
        if len(lines) > 0:
            tmp = lines[0].strip()
            if len(tmp) > 1 and tmp[0] == "[" and tmp[-1] == "]":
                if tmp[1:-1] != name:
                    raise ValueError(
                        f"Section name doesn't match: '{tmp[1:-1]}' vs '{name}'"
                    )
                lines = lines[1:]
        self._data[section].extend(lines)

    def file_exists(self):
        """Whether the configuration file exists."""
        if self.path is None:
            return False
        else:
            return self.path.exists()

    def from_string(self, text):
        """Replace the contents of the configuration with those from `text`.

        Parameters
        ----------
        text : str
            The configuration data as TOML text.
        """
        self._data = {}
        section = "PROLOG"
        lines = []
        for line in text.splitlines():
            # Look for a section name, like [<name>]
            tmp = line.strip()
            if len(tmp) > 1 and tmp[0] == "[" and tmp[-1] == "]":
                self._data[section] = lines
                section = tmp[1:-1].strip().lower()
                lines = []
            lines.append(line)
        # Put the last section into the data
        self._data[section] = lines
        if len(self._data["PROLOG"]) == 0:
            del self._data["PROLOG"]

    def get_prolog(self):
        """Return the prolog of the file, if any.

        Returns
        -------
        str
            The prolog of the configuration.
        """
        if "PROLOG" in self._data:
            result = "\n".join(self._data["PROLOG"]) + "\n"
        else:
            result = ""
        return result

    def get_values(self, section):
        """Return the values in a section as a dictionary.

        Returns an empty dictionary if the section does not exist, or if it
        does not contain any keys. Use `section_exists` to differentiate.

        Parameters
        ----------
        section : str
            The name of the section to retrieve.

        Returns
        -------
        dict
            The keys and their values, typed as TOML types them.
        """
        if not self.section_exists(section):
            return {}
        text = "\n".join(self._data[section.lower()])
        try:
            parsed = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            source = "" if self.path is None else f" of {self.path}"
            raise ConfigurationError(
                f"Section [{section}]{source} is not valid TOML: {e}"
            ) from e
        for name, values in parsed.items():
            if name.lower() == section.lower() and isinstance(values, dict):
                return values
        return {}

    def _read(self):
        """Read the configuration file and split into sections."""
        self.from_string(self.path.read_text())

    def save(self, path=None):
        """Save the current configuration to disk."""
        if path is not None:
            self._path = Path(path).expanduser().resolve()
        self.path.write_text(str(self))

    def sections(self):
        """Return a list of sections in the configuration, [model] first.

        Returns
        -------
        [str]
            The list of sections.
        """
        result = sorted(self._data.keys())
        if "PROLOG" in result:
            result.remove("PROLOG")
        if "model" in result:
            result.remove("model")
            result.insert(0, "model")
        return result

    def section_exists(self, section):
        """Return whether a section exists in the configuration.

        Parameters
        ----------
        section : str
            The name of the section.

        Returns
        -------
        bool
            True if the section exists; False otherwise.
        """
        return section is not None and section.lower() in self._data

    def set_value(self, section, key, value, strict=False):
        """Set the key in a section.

        Parameters
        ----------
        section : str
            The section to work with.
        key : str
            The key to set in the section.
        value : bool, int, float, str or None
            The value, written as a TOML literal. None comments the key out.
        strict : bool = False
            Raise an error if the key does not already exist.
        """
        lines = self._data[section.lower()]
        text = None if value is None else toml_value(value)
        found = False
        for i, line in enumerate(lines):
            if "=" in line and not line.lstrip().startswith("#"):
                if line.split("=", maxsplit=1)[0].strip() == key:
                    found = True
                    if text is None:
                        lines[i] = f"# {line}"
                    else:
                        lines[i] = f"{key} = {text}"
                    break

        if not found:
            if strict:
                raise KeyError(f"'{key}' not in section {section}.")
            # Maybe it is there but commented...
            for i, line in enumerate(lines):
                stripped = line.lstrip("#").strip()
                if "=" in stripped:
                    if stripped.split("=", maxsplit=1)[0].strip() == key:
                        found = True
                        if text is not None:
                            lines[i] = f"{key} = {text}"
                        break
            if not found:
                if text is None:
                    lines.append(f"# {key} = ")
                else:
                    lines.append(f"{key} = {text}")

    def to_string(self, section=None):
        """Create the text of a section.

        Parameters
        ----------
        section : str
            The name of the section. Defaults to the entire file.
        """
        if section is None:
            result = []
            if "PROLOG" in self._data:
                result.extend(self._data["PROLOG"])
                if len(result) > 0 and result[-1] != "":
                    result.append("")
            for section in self.sections():
                result.extend(self._data[section])
                if result[-1] != "":
                    result.append("")
        else:
            result = self._data[section.lower()]

        return "\n".join(result) + "\n"


class RunConfig(object):
    """The resolved parameters of a run.

    Values are stored per section with the dashed keys of the configuration
    files. Later sources override earlier ones: the built-in defaults, the
    user's configuration file, the --config file, then `override`.
    """

    def __init__(self, values=None):
        self._values = copy.deepcopy(metadata.defaults)
        if values is not None:
            self.update(values, source="arguments")

    def __getitem__(self, section):
        return self._values[section]

    def get(self, section, key):
        return self._values[section][key]

    def sections(self):
        return list(self._values.keys())

    @classmethod
    def load(cls, path=None, user_file=True):
        """Defaults, then the user's file, then `path`.

        Parameters
        ----------
        path : str or pathlib.Path
            A configuration file given explicitly; it must exist.
        user_file : bool or str or pathlib.Path
            True reads the file at the platformdirs location if present,
            False skips it, a path reads that file if present.
        """
        config = cls()
        if user_file is True:
            user_file = user_config_file()
        if user_file:
            user_file = Path(user_file).expanduser()
            if user_file.exists():
                logger.info(f"Reading the user configuration {user_file}")
                config.update_from_file(user_file)
        if path is not None:
            path = Path(path).expanduser()
            if not path.exists():
                raise ConfigurationError(f"The configuration file '{path}' is missing.")
            config.update_from_file(path)
        return config

    def update_from_file(self, path):
        configuration = Configuration(path)
        for section in configuration.sections():
            self.update(
                {section: configuration.get_values(section)}, source=str(path)
            )

    def update(self, values, source="options"):
        """Override values given as {section: {key: value}}.

        Keys may use underscores or dashes. Values of None are ignored, so
        unset command-line options leave the configuration alone.
        """
        for section, items in values.items():
            if section not in self._values:
                raise ConfigurationError(f"Unknown section [{section}] in {source}.")
            known = self._values[section]
            for key, value in items.items():
                if value is None:
                    continue
                key = key.replace("_", "-")
                if key not in known:
                    raise ConfigurationError(
                        f"Unknown key '{key}' in section [{section}] of {source}."
                    )
                default = metadata.defaults[section][key]
                known[key] = self._coerce(section, key, value, default, source)

    @staticmethod
    def _coerce(section, key, value, default, source):
        where = f"[{section}] {key} in {source}"
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise ConfigurationError(f"{where} must be true or false: {value!r}")
            return value
        if isinstance(default, int):
            if isinstance(value, bool) or not isinstance(value, int):
                if isinstance(value, float) and value.is_integer():
                    return int(value)
                raise ConfigurationError(f"{where} must be an integer: {value!r}")
            return value
        if isinstance(default, float):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigurationError(f"{where} must be a number: {value!r}")
            return float(value)
        if not isinstance(value, str):
            raise ConfigurationError(f"{where} must be a string: {value!r}")
        return value

    def validate(self):
        """Check the ranges of all values.

        Raises
        ------
        ConfigurationError
            Naming every invalid value.
        """
        errors = []

        def check(condition, message):
            if not condition:
                errors.append(message)

        for section, items in self._values.items():
            for key, value in items.items():
                if isinstance(value, float):
                    check(math.isfinite(value), f"[{section}] {key} must be finite.")

        model = self["model"]
        check(model["kappa"] > 0, "[model] kappa must be positive.")
        check(model["dt"] > 0, "[model] dt must be positive.")
        check(model["n"] >= 1, "[model] n must be at least 1.")
        check(model["depth"] >= 0, "[model] depth cannot be negative.")

        numerics = self["numerics"]
        check(numerics["chi-mps"] >= 1, "[numerics] chi-mps must be at least 1.")
        check(numerics["chi-mpo"] >= 1, "[numerics] chi-mpo must be at least 1.")
        check(numerics["seed"] >= 0, "[numerics] seed cannot be negative.")
        check(
            numerics["samples"] >= 2 and numerics["samples"] % 2 == 0,
            "[numerics] samples must be even and at least 2.",
        )
        check(numerics["workers"] >= 0, "[numerics] workers cannot be negative.")
        check(
            numerics["discarded-weight-warning"] > 0,
            "[numerics] discarded-weight-warning must be positive.",
        )
        check(
            numerics["engine"] in metadata.engines,
            f"[numerics] engine must be one of {', '.join(metadata.engines)}.",
        )
        if numerics["engine"] == "dense":
            check(model["n"] <= 6, "[model] n must be <= 6 with the dense engine.")

        training = self["training"]
        check(training["repetitions"] >= 1, "[training] repetitions must be >= 1.")
        check(training["epsilon"] >= 0, "[training] epsilon cannot be negative.")
        check(training["h"] > 0, "[training] h must be positive.")
        check(training["patience"] >= 1, "[training] patience must be >= 1.")
        check(
            training["ensemble-samples"] >= 0,
            "[training] ensemble-samples cannot be negative.",
        )
        check(
            training["landscape-points"] >= 2,
            "[training] landscape-points must be at least 2.",
        )
        check(
            training["landscape-a-min"] < training["landscape-a-max"],
            "[training] landscape-a-min must be below landscape-a-max.",
        )
        check(
            training["landscape-b-min"] < training["landscape-b-max"],
            "[training] landscape-b-min must be below landscape-b-max.",
        )

        histogram = self["histogram"]
        width = histogram["bin-width"]
        check(0 < width <= 1.0, "[histogram] bin-width must be in (0, 1].")
        if 0 < width <= 1.0:
            n_bins = 1.0 / width
            check(
                abs(n_bins - round(n_bins)) < 1e-9 * n_bins,
                "[histogram] bin-width must divide the range [-0.5, 0.5] evenly.",
            )
        check(histogram["layer"] >= 0, "[histogram] layer cannot be negative.")
        check(histogram["coarsen"] >= 1, "[histogram] coarsen must be at least 1.")

        phase = self["phase-diagram"]
        check(
            phase["closure"] in metadata.closures,
            f"[phase-diagram] closure must be one of {', '.join(metadata.closures)}.",
        )
        check(phase["points"] >= 2, "[phase-diagram] points must be at least 2.")
        check(phase["q"] >= 1, "[phase-diagram] q must be at least 1.")
        if phase["closure"] == "nn":
            check(phase["q"] >= 2, "[phase-diagram] q must be >= 2 for closure nn.")
        check(phase["dt-ode"] > 0, "[phase-diagram] dt-ode must be positive.")
        check(phase["t-max"] > 0, "[phase-diagram] t-max must be positive.")
        check(
            phase["omega-min"] < phase["omega-max"],
            "[phase-diagram] omega-min must be below omega-max.",
        )
        check(
            phase["v-min"] < phase["v-max"],
            "[phase-diagram] v-min must be below v-max.",
        )

        if len(errors) > 0:
            raise ConfigurationError(
                "Invalid configuration:\n    " + "\n    ".join(errors)
            )
        return self

    def model_params(self):
        model = self["model"]
        return ModelParams(
            omega=model["omega"],
            v=model["v"],
            kappa=model["kappa"],
            dt=model["dt"],
            n_sites=model["n"],
            depth=model["depth"],
        )

    def jump_params(self):
        return JumpParams(self.get("jump", "a"), self.get("jump", "b"))

    @property
    def workers(self):
        """The worker count, None meaning the environment or the CPU count."""
        workers = self.get("numerics", "workers")
        return None if workers == 0 else workers

    def to_configuration(self, prolog=None):
        """The resolved values as a Configuration, one section per group."""
        configuration = Configuration()
        if prolog is not None:
            configuration.add_prolog(
                "\n".join(f"# {line}" for line in prolog.splitlines())
            )
        for section, items in self._values.items():
            configuration.add_section(section)
            for key, value in items.items():
                configuration.set_value(section, key, value)
        return configuration

    def save(self, path, prolog=None):
        """Write the resolved configuration so the run can be repeated."""
        configuration = self.to_configuration(prolog)
        configuration.save(path)
        return configuration


# Command-line flags that override configuration values:
# (flag, section, key, type, help)
OPTIONS = (
    ("--omega", "model", "omega", float, "The transverse field Omega."),
    ("--v", "model", "v", float, "The Ising interaction V."),
    ("--kappa", "model", "kappa", float, "The decay rate kappa."),
    ("--dt", "model", "dt", float, "The time step of one layer."),
    ("--n", "model", "n", int, "The number of sites in a layer."),
    ("--depth", "model", "depth", int, "The number of layers."),
    ("--a", "jump", "a", float, "The coefficient a of the jump operator."),
    ("--b", "jump", "b", float, "The coefficient b of the jump operator."),
    ("--chi-mps", "numerics", "chi-mps", int, "The bond dimension of the layers."),
    ("--chi-mpo", "numerics", "chi-mpo", int, "The bond dimension of the channel."),
    ("--seed", "numerics", "seed", int, "The seed of the random initial states."),
    ("--samples", "numerics", "samples", int, "The number of initial states."),
    (
        "--workers",
        "numerics",
        "workers",
        int,
        "The number of worker processes, 0 for ISING_QCA_WORKERS or all CPUs.",
    ),
    (
        "--discarded-weight-warning",
        "numerics",
        "discarded-weight-warning",
        float,
        "Warn when a trajectory discards more weight than this.",
    ),
    ("--engine", "numerics", "engine", str, "The engine, 'mps' or 'dense'."),
    ("--init-a", "training", "a", float, "The starting value of a."),
    ("--init-b", "training", "b", float, "The starting value of b."),
    ("--epsilon", "training", "epsilon", float, "The learning rate."),
    ("--repetitions", "training", "repetitions", int, "The number of updates."),
    ("--h", "training", "h", float, "The finite-difference step."),
    ("--reference-a", "training", "reference-a", float, "a of the reference QCA."),
    ("--reference-b", "training", "reference-b", float, "b of the reference QCA."),
    (
        "--patience",
        "training",
        "patience",
        int,
        "Stop after this many consecutive increases of the loss.",
    ),
    (
        "--ensemble-samples",
        "training",
        "ensemble-samples",
        int,
        "Histogram an ensemble of this size before and after training.",
    ),
    ("--landscape-a-min", "training", "landscape-a-min", float, "Lowest a."),
    ("--landscape-a-max", "training", "landscape-a-max", float, "Highest a."),
    ("--landscape-b-min", "training", "landscape-b-min", float, "Lowest b."),
    ("--landscape-b-max", "training", "landscape-b-max", float, "Highest b."),
    ("--landscape-points", "training", "landscape-points", int, "Points per axis."),
    ("--layer", "histogram", "layer", int, "The layer to histogram."),
    ("--bin-width", "histogram", "bin-width", float, "The width of the bins."),
    ("--coarsen", "histogram", "coarsen", int, "Bins merged for the coarse check."),
    ("--closure", "phase-diagram", "closure", str, "The closure, 'mf' or 'nn'."),
    ("--omega-min", "phase-diagram", "omega-min", float, "Lowest Omega."),
    ("--omega-max", "phase-diagram", "omega-max", float, "Highest Omega."),
    ("--v-min", "phase-diagram", "v-min", float, "Lowest V."),
    ("--v-max", "phase-diagram", "v-max", float, "Highest V."),
    ("--points", "phase-diagram", "points", int, "Grid points per axis."),
    ("--q", "phase-diagram", "q", int, "The coordination number."),
    ("--dt-ode", "phase-diagram", "dt-ode", float, "The RK4 step."),
    ("--t-max", "phase-diagram", "t-max", float, "The longest relaxation time."),
)


def add_config_options(parser, *sections, exclude=()):
    """Add --config and the flags of the given sections to a subparser.

    The flags default to None so that only the ones given on the command line
    override the configuration files.
    """
    parser.add_argument(
        "--config",
        default=None,
        help="A TOML configuration file, read after the user's file.",
    )
    group = parser.add_argument_group("parameters")
    for flag, section, key, kind, text in OPTIONS:
        if section not in sections or flag in exclude:
            continue
        group.add_argument(
            flag,
            dest=f"{section}:{key}",
            type=kind,
            default=None,
            metavar=key.split("-")[-1].upper(),
            help=text,
        )


def config_from_options(options, user_file=True):
    """The validated RunConfig for parsed command-line options."""
    config = RunConfig.load(getattr(options, "config", None), user_file=user_file)
    values = {}
    for dest, value in vars(options).items():
        if ":" not in dest or value is None:
            continue
        section, key = dest.split(":", 1)
        values.setdefault(section, {})[key] = value
    config.update(values, source="the command line")
    my.configuration = config.validate()
    return my.configuration
