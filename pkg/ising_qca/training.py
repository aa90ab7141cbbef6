# -*- coding: utf-8 -*-

"""Training the jump operator J(a, b) to reproduce target magnetizations.

Targets come from a reference QCA. The loss is the mean squared difference
between the evolved output mx and the targets; the parameters follow steepest
descent with central finite-difference gradients.
"""

from dataclasses import asdict, dataclass, field
import functools
import json
import logging
import math
from pathlib import Path

import numpy as np
import scipy.ndimage

from .channel import (
    build_channel_mpo,
    build_dense_channel,
    evolve_ensemble,
    evolve_trajectory,
)
from .exceptions import DivergenceError
from .hist import histogram_report
from .model import JumpParams
from .sampling import ProductStateSpec, sample_initial_states, to_layer_state
from . import util

logger = logging.getLogger(__name__)

DEFAULT_INPUT_MX = (0.4, 0.25)


@dataclass(frozen=True)
class EngineSettings:
    """How layer states are evolved: bond dimensions, or the dense oracle."""

    chi_mps: int = 48
    chi_mpo: int = 16
    dense: bool = False

    def build_channel(self, params, jp):
        if self.dense:
            return build_dense_channel(params, jp)
        return build_channel_mpo(params, jp, self.chi_mpo)


@dataclass(frozen=True)
class TrainingPair:
    """An input product state and the mx its output layer should have."""

    input: ProductStateSpec
    target_mx: float

    def __post_init__(self):
        if not abs(self.target_mx) <= 0.5 + 1e-9:
            raise ValueError(f"The target {self.target_mx} is outside [-1/2, 1/2].")


@dataclass
class TrainingRun:
    """The history of a descent.

    Attributes
    ----------
    parameters : [(float, float)]
        (a, b) before the first step and after every step.
    losses : [float]
        The loss at each of those parameters.
    epsilon : float
        The learning rate.
    repetitions : int
        The number of update steps requested.
    """

    parameters: list
    losses: list
    epsilon: float
    repetitions: int
    gradient_scheme: str = "central-difference"
    h: float = 1.0e-3
    chi_mps: int = None
    chi_mpo: int = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.parameters) != len(self.losses):
            raise ValueError("Each parameter pair needs its loss.")

    @property
    def initial_loss(self):
        return self.losses[0]

    @property
    def final_loss(self):
        return self.losses[-1]

    @property
    def final_parameters(self):
        a, b = self.parameters[-1]
        return JumpParams(a, b)

    def to_dict(self):
        return asdict(self)

    def to_json(self, path):
        text = json.dumps(self.to_dict(), indent=4, cls=util.JSONEncoder)
        Path(path).write_text(text + "\n")

    @classmethod
    def from_json(cls, path):
        data = json.loads(Path(path).read_text())
        data["parameters"] = [tuple(p) for p in data["parameters"]]
        return cls(**data)


def default_training_inputs():
    """Four Z2-balanced inputs at m0x = +-0.4 and +-0.25 with m0y = 0.

    m0z is the negative root of the Bloch-sphere constraint, so the inputs
    lean towards the vacuum.
    """
    positive = [
        ProductStateSpec.from_magnetizations(mx, 0.0, -math.sqrt(0.25 - mx**2), i)
        for i, mx in enumerate(DEFAULT_INPUT_MX)
    ]
    n = len(positive)
    return positive + [spec.partner(sample_id=n + spec.sample_id) for spec in positive]


def output_magnetizations(jp, specs, params, chi=EngineSettings()):
    """mx of the last layer for each input, all through one channel."""
    channel = chi.build_channel(params, jp)
    values = []
    for spec in specs:
        state = to_layer_state(spec, params.n_sites, dense=chi.dense)
        trajectory = evolve_trajectory(
            state, params, jp, chi_mps=chi.chi_mps, channel=channel
        )
        values.append(trajectory.mx[-1])
    return np.array(values)


def is_degenerate(pairs, min_separation=0.05):
    """Whether the targets fail to separate two classes.

    The data are degenerate unless both signs occur and the targets of each
    sign lie at least `min_separation` from zero on average.
    """
    targets = np.array([pair.target_mx for pair in pairs])
    positive = targets[targets > 0]
    negative = targets[targets < 0]
    if positive.size == 0 or negative.size == 0:
        return True
    return np.mean(positive) < min_separation or -np.mean(negative) < min_separation


def generate_training_data(reference_jp, inputs, params, chi=EngineSettings()):
    """Pairs of each input with the mx its evolution by the reference QCA ends at.

    Returns
    -------
    [TrainingPair]
        One pair per input, in order.
    """
    targets = output_magnetizations(reference_jp, inputs, params, chi)
    pairs = [TrainingPair(spec, float(t)) for spec, t in zip(inputs, targets)]
    if is_degenerate(pairs):
        logger.warning(
            f"The training targets {np.round(targets, 4).tolist()} do not separate "
            "two classes; the reference QCA may not be bimodal at this depth."
        )
    return pairs


def loss(jp, pairs, params, chi=EngineSettings()):
    """(1/P) sum over pairs of (mx(output) - target)**2."""
    if len(pairs) == 0:
        raise ValueError("The loss needs at least one training pair.")
    outputs = output_magnetizations(jp, [pair.input for pair in pairs], params, chi)
    targets = np.array([pair.target_mx for pair in pairs])
    return float(np.mean((outputs - targets) ** 2))


def _loss_at(point, pairs, params, chi):
    return loss(JumpParams(*point), pairs, params, chi)


def losses_at(points, pairs, params, chi=EngineSettings(), workers=None):
    """The loss at each (a, b) in `points`, evaluated in parallel."""
    task = functools.partial(_loss_at, pairs=pairs, params=params, chi=chi)
    return np.array(util.parallel_map(task, [tuple(p) for p in points], workers))


def gradient(jp, pairs, params, chi=EngineSettings(), h=1.0e-3, workers=None):
    """Central finite-difference gradient (dL/da, dL/db)."""
    if h <= 0:
        raise ValueError(f"The finite-difference step must be positive, not {h}.")
    a, b = jp
    points = [(a + h, b), (a - h, b), (a, b + h), (a, b - h)]
    values = losses_at(points, pairs, params, chi, workers)
    return (values[0] - values[1]) / (2 * h), (values[2] - values[3]) / (2 * h)


def train(
    init_jp,
    pairs,
    params,
    epsilon,
    repetitions,
    chi=EngineSettings(),
    h=1.0e-3,
    patience=5,
    workers=None,
):
    """Steepest descent (a, b) <- (a, b) - epsilon grad L.

    Parameters
    ----------
    init_jp : JumpParams
        The starting parameters.
    pairs : [TrainingPair]
        The training data.
    params : ModelParams
        The model; depth is the output layer.
    epsilon : float
        The learning rate.
    repetitions : int
        The number of updates, >= 1.
    chi : EngineSettings
        How the QCA is evolved.
    h : float
        The finite-difference step.
    patience : int
        Abort after this many consecutive increases of the loss.

    Returns
    -------
    TrainingRun
        The parameters and losses of every step.

    Raises
    ------
    DivergenceError
        If the loss increased `patience` times in a row.
    """
    if repetitions < 1:
        raise ValueError(f"At least one repetition is needed, not {repetitions}.")

    jp = init_jp
    current = loss(jp, pairs, params, chi)
    run = TrainingRun(
        [(jp.a, jp.b)],
        [current],
        epsilon,
        repetitions,
        h=h,
        chi_mps=None if chi.dense else chi.chi_mps,
        chi_mpo=None if chi.dense else chi.chi_mpo,
    )
    increases = 0
    for step in range(1, repetitions + 1):
        ga, gb = gradient(jp, pairs, params, chi, h, workers)
        jp = jp.shifted(-epsilon * ga, -epsilon * gb)
        previous = current
        current = loss(jp, pairs, params, chi)
        run.parameters.append((jp.a, jp.b))
        run.losses.append(current)
        logger.info(
            f"Step {step}: (a, b) = ({jp.a:.6f}, {jp.b:.6f}), loss {current:.6g}"
        )

        increases = increases + 1 if current > previous else 0
        if increases >= patience:
            raise DivergenceError(
                f"The loss rose {patience} times in a row to {current:.6g} at step "
                f"{step} (a={jp.a:.6g}, b={jp.b:.6g}); lower epsilon={epsilon}."
            )

    run.metadata["loss_increased"] = bool(run.final_loss > run.initial_loss)
    if run.metadata["loss_increased"]:
        logger.warning(
            f"Training ended above its initial loss: {run.final_loss:.6g} > "
            f"{run.initial_loss:.6g}."
        )
    return run


@dataclass
class LossLandscape:
    """The loss on a regular (a, b) grid, losses[i, j] at (a[i], b[j])."""

    a: np.ndarray
    b: np.ndarray
    losses: np.ndarray

    def minimum(self):
        """(a, b, loss) of the grid minimum."""
        i, j = np.unravel_index(np.argmin(self.losses), self.losses.shape)
        return float(self.a[i]), float(self.b[j]), float(self.losses[i, j])

    def nearest_index(self, a, b):
        return int(np.argmin(np.abs(self.a - a))), int(np.argmin(np.abs(self.b - b)))

    def loss_near(self, a, b):
        """The loss at the grid point closest to (a, b)."""
        return float(self.losses[self.nearest_index(a, b)])

    def sublevel_component(self, factor=2.0, floor=0.0):
        """The connected region around the minimum with loss <= factor * min.

        When the grid hits the reference parameters the minimum is zero up to
        rounding; `floor` then stands in for the minimum.
        """
        i, j = np.unravel_index(np.argmin(self.losses), self.losses.shape)
        threshold = factor * max(self.losses[i, j], floor)
        labels, _ = scipy.ndimage.label(self.losses <= threshold)
        return labels == labels[i, j]

    def sublevel_extent(self, factor=2.0, floor=0.0):
        """The number of grid cells spanned by the sublevel component along a and b."""
        rows, cols = np.nonzero(self.sublevel_component(factor, floor))
        return int(rows.max() - rows.min() + 1), int(cols.max() - cols.min() + 1)

    def rows(self):
        for i, a in enumerate(self.a):
            for j, b in enumerate(self.b):
                yield float(a), float(b), float(self.losses[i, j])

    def write_csv(self, path):
        util.write_csv(path, ["a", "b", "loss"], self.rows())


def loss_landscape(
    a_range, b_range, grid, pairs, params, chi=EngineSettings(), workers=None
):
    """The loss on a regular grid of jump parameters.

    Parameters
    ----------
    a_range, b_range : (float, float)
        The ends of the axes, inclusive.
    grid : int or (int, int)
        Points per axis, >= 2.

    Returns
    -------
    LossLandscape
        The losses, evaluated in parallel over the grid points.
    """
    if np.ndim(grid) == 0:
        grid = (grid, grid)
    if min(grid) < 2:
        raise ValueError(f"The landscape needs >= 2 points per axis, not {grid}.")
    a_values = np.linspace(a_range[0], a_range[1], grid[0])
    b_values = np.linspace(b_range[0], b_range[1], grid[1])
    points = [(a, b) for a in a_values for b in b_values]
    logger.info(f"Evaluating the loss at {len(points)} grid points.")
    losses = losses_at(points, pairs, params, chi, workers)
    return LossLandscape(a_values, b_values, losses.reshape(grid[0], grid[1]))


def ensemble_histograms(
    jumps,
    params,
    chi=EngineSettings(),
    samples=200,
    seed=0,
    bin_width=0.005,
    coarsen=10,
    workers=None,
):
    """Output-layer histograms of a Z2-balanced ensemble for several QCAs.

    Parameters
    ----------
    jumps : dict(str, JumpParams)
        The QCAs to compare, by name.
    samples : int
        The ensemble size, even.

    Returns
    -------
    dict(str, hist.HistogramReport)
        The histogram and its bimodality for each QCA.
    """
    if samples < 2 or samples % 2 != 0:
        raise ValueError(f"A balanced ensemble needs an even size, not {samples}.")
    specs = sample_initial_states(samples // 2, seed)
    reports = {}
    for name, jp in jumps.items():
        trajectories = evolve_ensemble(
            specs,
            params,
            jp,
            chi_mps=chi.chi_mps,
            chi_mpo=chi.chi_mpo,
            dense=chi.dense,
            workers=workers,
        )
        outputs = np.array([t.mx[-1] for t in trajectories])
        reports[name] = histogram_report(outputs, bin_width, coarsen)
    return reports
