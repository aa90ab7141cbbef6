#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for training the jump operator."""

import math

import numpy as np
import pytest

from ising_qca import JumpParams, ModelParams, TrainingPair, TrainingRun
from ising_qca.exceptions import DivergenceError
from ising_qca.sampling import ProductStateSpec
from ising_qca.training import (
    EngineSettings,
    default_training_inputs,
    ensemble_histograms,
    generate_training_data,
    gradient,
    is_degenerate,
    loss,
    loss_landscape,
    output_magnetizations,
    train,
)

DENSE = EngineSettings(dense=True)


@pytest.fixture()
def small_params():
    return ModelParams(omega=3.0, v=15.0, kappa=1.0, dt=0.1, n_sites=3, depth=3)


@pytest.fixture()
def pairs(small_params, reference_jump):
    return generate_training_data(
        reference_jump, default_training_inputs(), small_params, DENSE
    )


def pair(target):
    spec = ProductStateSpec.from_magnetizations(0.4, 0.0, -0.3)
    return TrainingPair(spec, target)


def test_default_training_inputs():
    inputs = default_training_inputs()
    assert [s.m0x for s in inputs] == [0.4, 0.25, -0.4, -0.25]
    assert [s.sample_id for s in inputs] == [0, 1, 2, 3]
    for spec in inputs:
        assert spec.m0y == 0.0
        assert spec.m0z < 0.0
        assert spec.m0x**2 + spec.m0z**2 == pytest.approx(0.25)
    assert inputs[1].m0z == pytest.approx(-math.sqrt(0.25 - 0.0625))


def test_target_range():
    with pytest.raises(ValueError):
        pair(0.6)


def test_is_degenerate():
    assert is_degenerate([pair(0.2), pair(0.1)])
    assert is_degenerate([pair(0.2), pair(-0.01)])
    assert not is_degenerate([pair(0.2), pair(-0.1)])


def test_training_data_is_z2_balanced(pairs):
    targets = np.array([p.target_mx for p in pairs])
    assert len(pairs) == 4
    assert np.allclose(targets[:2], -targets[2:], atol=1e-10)


def test_engines_agree(small_params, reference_jump):
    inputs = default_training_inputs()
    dense = output_magnetizations(reference_jump, inputs, small_params, DENSE)
    mps = output_magnetizations(reference_jump, inputs, small_params, EngineSettings())
    assert np.allclose(dense, mps, atol=1e-8, rtol=0)


def test_loss_vanishes_at_reference(pairs, small_params, reference_jump):
    assert loss(reference_jump, pairs, small_params, DENSE) == 0.0
    assert loss(JumpParams(0.7, -0.3), pairs, small_params, DENSE) > 0.0
    with pytest.raises(ValueError):
        loss(reference_jump, [], small_params, DENSE)


def test_gradient_at_minimum(pairs, small_params, reference_jump):
    ga, gb = gradient(reference_jump, pairs, small_params, DENSE, h=1e-4)
    assert abs(ga) < 1e-4
    assert abs(gb) < 1e-4
    with pytest.raises(ValueError):
        gradient(reference_jump, pairs, small_params, DENSE, h=0.0)


def test_gradient_matches_loss_change(pairs, small_params):
    jp = JumpParams(0.7, -0.3)
    ga, gb = gradient(jp, pairs, small_params, DENSE, h=1e-4)
    step = 1e-3
    forward = loss(jp.shifted(da=step), pairs, small_params, DENSE)
    backward = loss(jp.shifted(da=-step), pairs, small_params, DENSE)
    assert ga == pytest.approx((forward - backward) / (2 * step), rel=1e-3, abs=1e-8)


def test_train_reduces_loss(pairs, small_params):
    init = JumpParams(0.7, -0.3)
    ga, gb = gradient(init, pairs, small_params, DENSE, h=1e-4)
    # steps of about 1e-3 in (a, b)
    epsilon = 1e-3 / max(abs(ga), abs(gb))
    run = train(init, pairs, small_params, epsilon, 3, DENSE, h=1e-4)
    assert len(run.parameters) == 4
    assert len(run.losses) == 4
    assert run.final_loss < run.initial_loss
    assert all(later < earlier for earlier, later in zip(run.losses, run.losses[1:]))
    assert run.chi_mps is None
    assert run.metadata["loss_increased"] is False
    a, b = run.parameters[1]
    assert np.sign(init.a - a) == np.sign(ga)
    assert np.sign(init.b - b) == np.sign(gb)


def test_train_diverges(pairs, small_params):
    init = JumpParams(0.7, -0.3)
    ga, gb = gradient(init, pairs, small_params, DENSE, h=1e-4)
    epsilon = -1e-3 / max(abs(ga), abs(gb))
    with pytest.raises(DivergenceError, match="rose 1 times"):
        train(init, pairs, small_params, epsilon, 2, DENSE, h=1e-4, patience=1)


def test_train_flags_increased_loss(pairs, small_params, caplog):
    init = JumpParams(0.7, -0.3)
    ga, gb = gradient(init, pairs, small_params, DENSE, h=1e-4)
    epsilon = -1e-3 / max(abs(ga), abs(gb))
    run = train(init, pairs, small_params, epsilon, 1, DENSE, h=1e-4, patience=5)
    assert run.final_loss > run.initial_loss
    assert run.metadata["loss_increased"] is True
    assert "ended above its initial loss" in caplog.text


def test_train_needs_repetitions(pairs, small_params, reference_jump):
    with pytest.raises(ValueError):
        train(reference_jump, pairs, small_params, 1.0, 0, DENSE)


def test_training_run_json(tmp_path):
    run = TrainingRun([(0.7, -0.3), (0.6, -0.4)], [0.01, 0.004], 40.0, 1, chi_mps=48)
    run.metadata = {"command": "train"}
    path = tmp_path / "training.json"
    run.to_json(path)
    again = TrainingRun.from_json(path)
    assert again == run
    assert again.final_parameters == JumpParams(0.6, -0.4)
    with pytest.raises(ValueError):
        TrainingRun([(0.7, -0.3)], [], 40.0, 1)


def test_loss_landscape(pairs, small_params, tmp_path):
    landscape = loss_landscape(
        (0.25, 0.75), (-0.75, -0.25), 3, pairs, small_params, DENSE
    )
    assert landscape.losses.shape == (3, 3)
    a, b, value = landscape.minimum()
    assert (a, b, value) == (0.5, -0.5, 0.0)
    assert landscape.loss_near(0.49, -0.51) == 0.0
    assert landscape.sublevel_extent() == (1, 1)
    assert landscape.sublevel_extent(floor=landscape.losses.max()) == (3, 3)
    assert np.all(landscape.losses >= 0.0)

    path = tmp_path / "landscape.csv"
    landscape.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b,loss"
    assert len(lines) == 10

    with pytest.raises(ValueError):
        loss_landscape((0, 1), (0, 1), 1, pairs, small_params, DENSE)


def test_ensemble_histograms(small_params, reference_jump):
    reports = ensemble_histograms(
        {"untrained": JumpParams(0.7, -0.3), "trained": reference_jump},
        small_params,
        DENSE,
        samples=4,
        seed=1,
        bin_width=0.01,
        coarsen=10,
    )
    assert list(reports) == ["untrained", "trained"]
    for report in reports.values():
        assert report.counts.sum() == 4
    with pytest.raises(ValueError):
        ensemble_histograms({"trained": reference_jump}, small_params, DENSE, samples=3)
