# -*- coding: utf-8 -*-

"""Self-checks of the engines against the dense channel and the Lindbladian.

Five classes of checks are run on a small layer:

gate
    every local gate is unitary
channel
    the dense channel is CPTP with at most 2**N Kraus operators and the MPO
    reproduces its superoperator
symmetry
    the gates and the channel commute with the parity and Z2 partners evolve
    into mirror images
lindblad
    the channel approaches exp(L dt) with an error that shrinks at least
    2.5 times when dt halves
equivalence
    MPS and dense evolution give the same magnetizations
"""

import argparse
from dataclasses import asdict, dataclass
import json
import logging
from pathlib import Path

import numpy as np
from tabulate import tabulate

from .channel import (
    build_channel_mpo,
    build_dense_channel,
    cptp_report,
    evolve_trajectory,
    lindblad_step,
    parity_commutator_norm,
)
from .configuration import add_config_options, config_from_options
from .exceptions import (
    ChannelValidationError,
    ConfigurationError,
    EquivalenceValidationError,
    GateValidationError,
    LindbladValidationError,
    SymmetryValidationError,
    ValidationError,
)
from .model import LocalGate, build_gate_sequence, parity_conjugate
from . import my
from .sampling import ProductStateSpec, to_layer_state
from . import util

logger = logging.getLogger(__name__)

MAX_SITES = 5
TOLERANCE = 1.0e-10
EQUIVALENCE_TOLERANCE = 1.0e-8
MIN_LINDBLAD_RATIO = 2.5
EXACT_MPO_BOND = 16

ERRORS = {
    "gate": GateValidationError,
    "channel": ChannelValidationError,
    "symmetry": SymmetryValidationError,
    "lindblad": LindbladValidationError,
    "equivalence": EquivalenceValidationError,
}


@dataclass
class CheckResult:
    """The outcome of one check.

    An informational result is reported but cannot fail, as for the
    equivalence of deliberately under-truncated engines.
    """

    category: str
    name: str
    value: float
    threshold: float
    passed: bool
    informational: bool = False

    @property
    def failed(self):
        return not self.passed and not self.informational

    def row(self):
        if self.informational:
            status = "info"
        else:
            status = "ok" if self.passed else "FAILED"
        return [self.category, self.name, f"{self.value:.3e}", self.threshold, status]


def _at_most(category, name, value, threshold, informational=False):
    value = float(value)
    return CheckResult(
        category, name, value, threshold, value <= threshold, informational
    )


def check_state():
    """The product state the evolution checks start from."""
    return ProductStateSpec.from_magnetizations(0.4, 0.0, -0.3)


def check_gates(params, jp, inject_gate_error=0.0):
    gates = build_gate_sequence(params, jp)
    if inject_gate_error != 0.0:
        logger.warning(f"Corrupting the first gate by a factor 1 + {inject_gate_error}")
        gates[0] = LocalGate(gates[0].matrix * (1.0 + inject_gate_error), gates[0].site)
    return [
        _at_most("gate", f"unitarity of G_{g.site}", g.unitarity_defect(), TOLERANCE)
        for g in gates
    ]


def check_channel(params, jp, chi_mpo):
    dense = build_dense_channel(params, jp)
    report = cptp_report(dense, TOLERANCE)
    n = params.n_sites
    results = [
        _at_most("channel", "trace preservation", report.trace_defect, TOLERANCE),
        _at_most(
            "channel", "Choi positivity", -report.min_choi_eigenvalue, TOLERANCE
        ),
        _at_most("channel", "Choi hermiticity", report.hermiticity_defect, TOLERANCE),
        _at_most("channel", "Choi rank", report.choi_rank, 2**n),
    ]
    mpo = build_channel_mpo(params, jp, chi_mpo)
    deviation = np.max(np.abs(mpo.to_superoperator() - dense.to_superoperator()))
    results.append(
        _at_most(
            "channel",
            f"MPO vs dense (chi_mpo={chi_mpo})",
            deviation,
            EQUIVALENCE_TOLERANCE,
            informational=chi_mpo < EXACT_MPO_BOND,
        )
    )
    return results


def check_symmetry(params, jp):
    results = []
    for gate in build_gate_sequence(params, jp):
        defect = np.max(np.abs(parity_conjugate(gate.matrix) - gate.matrix))
        results.append(
            _at_most("symmetry", f"parity of G_{gate.site}", defect, TOLERANCE)
        )
    dense = build_dense_channel(params, jp)
    results.append(
        _at_most(
            "symmetry", "[channel, parity]", parity_commutator_norm(dense), TOLERANCE
        )
    )
    spec = check_state()
    n = params.n_sites
    forward = evolve_trajectory(to_layer_state(spec, n, dense=True), params, jp)
    mirror = evolve_trajectory(
        to_layer_state(spec.partner(), n, dense=True), params, jp
    )
    results.append(
        _at_most(
            "symmetry",
            "mx + partner mx",
            np.max(np.abs(forward.mx + mirror.mx)),
            TOLERANCE,
        )
    )
    return results


def lindblad_deviations(params, jp, steps=(1.0, 0.5, 0.25)):
    """||Lambda(dt) - exp(L dt)||_F for dt scaled by each of `steps`."""
    deviations = []
    for scale in steps:
        scaled = params.replace(dt=params.dt * scale)
        collision = build_dense_channel(scaled, jp).to_superoperator()
        exact = lindblad_step(scaled, jp).to_superoperator()
        deviations.append(float(np.linalg.norm(collision - exact)))
    return deviations


def check_lindblad(params, jp):
    n = min(params.n_sites, 3)
    deviations = lindblad_deviations(params.replace(n_sites=n), jp)
    results = []
    for i, (coarse, fine) in enumerate(zip(deviations[:-1], deviations[1:])):
        ratio = coarse / fine if fine > 0 else np.inf
        dt = params.dt / 2**i
        results.append(
            CheckResult(
                "lindblad",
                f"error ratio dt={dt:.4g} -> {dt / 2:.4g} (N={n})",
                float(ratio),
                MIN_LINDBLAD_RATIO,
                bool(ratio >= MIN_LINDBLAD_RATIO),
            )
        )
    return results


def check_equivalence(params, jp, chi_mps, chi_mpo):
    n = params.n_sites
    spec = check_state()
    exact = chi_mps >= 4 ** (n // 2) and chi_mpo >= EXACT_MPO_BOND
    if not exact:
        logger.info(
            f"chi_mps={chi_mps}, chi_mpo={chi_mpo} truncate at N={n}; the "
            "equivalence deviation is reported but not checked."
        )
    dense = evolve_trajectory(to_layer_state(spec, n, dense=True), params, jp)
    mps = evolve_trajectory(
        to_layer_state(spec, n), params, jp, chi_mps=chi_mps, chi_mpo=chi_mpo
    )
    deviation = np.max(np.abs(dense.magnetizations - mps.magnetizations))
    return [
        _at_most(
            "equivalence",
            f"MPS vs dense, {params.depth} layers (chi_mps={chi_mps})",
            deviation,
            EQUIVALENCE_TOLERANCE,
            informational=not exact,
        )
    ]


def run_checks(params, jp, chi_mps=48, chi_mpo=16, inject_gate_error=0.0):
    """Run every check on the layer of `params`.

    Returns
    -------
    [CheckResult]
        All results, grouped by category.
    """
    if params.n_sites > MAX_SITES:
        raise ConfigurationError(
            f"The checks need n <= {MAX_SITES}, not {params.n_sites}."
        )
    results = check_gates(params, jp, inject_gate_error)
    results.extend(check_channel(params, jp, chi_mpo))
    results.extend(check_symmetry(params, jp))
    results.extend(check_lindblad(params, jp))
    results.extend(check_equivalence(params, jp, chi_mps, chi_mpo))
    return results


def raise_on_failure(results):
    """Raise the error of the failed category, or ValidationError for several."""
    failed = [r for r in results if r.failed]
    if len(failed) == 0:
        return
    categories = sorted({r.category for r in failed})
    message = "Failed checks: " + "; ".join(
        f"{r.category}: {r.name} = {r.value:.3e} (limit {r.threshold})" for r in failed
    )
    if len(categories) == 1:
        raise ERRORS[categories[0]](message)
    raise ValidationError(message)


def setup(parser):
    """Define the command-line interface for the self-checks.

    Parameters
    ----------
    parser : argparse.ArgumentParser
        The main parser for the application.
    """
    subparser = parser.add_parser(
        "oracle-check",
        help="Check the engines against the dense channel.",
        allow_abbrev=False,
    )
    subparser.set_defaults(func=oracle_check)
    subparser.add_argument(
        "--n", type=int, default=4, help="The number of sites, defaults to 4"
    )
    subparser.add_argument(
        "--layers", type=int, default=5, help="The layers evolved, defaults to 5"
    )
    subparser.add_argument(
        "--report",
        default="oracle-check.json",
        help="The JSON report, defaults to '%(default)s'",
    )
    subparser.add_argument(
        "--inject-gate-error", type=float, default=0.0, help=argparse.SUPPRESS
    )
    add_config_options(
        subparser,
        "model",
        "jump",
        "numerics",
        exclude=(
            "--n",
            "--depth",
            "--seed",
            "--samples",
            "--workers",
            "--engine",
            "--discarded-weight-warning",
        ),
    )


def oracle_check():
    my.logger.debug("Entering oracle-check")
    config = config_from_options(my.options)
    cmd_oracle_check(
        config,
        my.options.n,
        my.options.layers,
        my.options.report,
        inject_gate_error=my.options.inject_gate_error,
    )
    return 0


def cmd_oracle_check(config, n=4, layers=5, report=None, inject_gate_error=0.0):
    """Run the checks, print the table and write the JSON report.

    Raises
    ------
    ValidationError
        The subclass of the failed category, or ValidationError itself if
        checks of several categories failed.
    """
    if not 1 <= n <= MAX_SITES:
        raise ConfigurationError(f"oracle-check needs 1 <= n <= {MAX_SITES}, not {n}.")
    if layers < 0:
        raise ConfigurationError(f"The number of layers cannot be negative: {layers}")
    params = config.model_params().replace(n_sites=n, depth=layers)
    jp = config.jump_params()
    chi_mps = config.get("numerics", "chi-mps")
    chi_mpo = config.get("numerics", "chi-mpo")

    results = run_checks(params, jp, chi_mps, chi_mpo, inject_gate_error)

    headers = ["Class", "Check", "Value", "Limit", "Status"]
    print(tabulate([r.row() for r in results], headers, tablefmt="fancy_grid"))
    failed = [r for r in results if r.failed]
    if len(failed) == 0:
        print("All checks passed.")
    else:
        print(f"{len(failed)} check(s) failed.")

    if report is not None:
        data = {
            **util.provenance(),
            "parameters": asdict(params),
            "jump": {"a": jp.a, "b": jp.b},
            "chi_mps": chi_mps,
            "chi_mpo": chi_mpo,
            "passed": len(failed) == 0,
            "checks": [asdict(r) for r in results],
        }
        text = json.dumps(data, indent=4, cls=util.JSONEncoder)
        Path(report).write_text(text + "\n")

    raise_on_failure(results)
    return results
