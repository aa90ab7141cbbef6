#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the dense and MPO forms of the layer channel."""

import math

import numpy as np
import pytest

from ising_qca import JumpParams, ModelParams
from ising_qca.channel import (
    apply_channel,
    build_channel_mpo,
    build_dense_channel,
    build_lindbladian,
    channel_is_cptp,
    commutes_with_parity,
    cptp_report,
    evolve_ensemble,
    evolve_trajectory,
    lindblad_step,
    parity_superoperator,
)
from ising_qca.mps import DenseLayerState, VectorizedLayerState
from ising_qca.sampling import (
    ProductStateSpec,
    sample_initial_states,
    to_layer_state,
)


@pytest.fixture()
def product_spec():
    return ProductStateSpec.from_magnetizations(0.4, 0.0, -0.3)


def test_dense_channel_is_cptp(reference_params, reference_jump):
    channel = build_dense_channel(reference_params, reference_jump)
    assert channel.kraus.shape == (16, 16, 16)
    report = cptp_report(channel)
    assert report.ok
    assert report.choi_rank <= 2**reference_params.n_sites
    assert channel_is_cptp(channel)


def test_non_sigma_minus_jump_is_cptp(reference_params):
    params = reference_params.replace(n_sites=3)
    channel = build_dense_channel(params, JumpParams(0.8, 0.3))
    assert channel_is_cptp(channel)


def test_dense_channel_size_limit(reference_jump):
    with pytest.raises(ValueError):
        build_dense_channel(ModelParams(n_sites=7, depth=1), reference_jump)


def test_mpo_matches_dense(reference_params, reference_jump):
    dense = build_dense_channel(reference_params, reference_jump)
    mpo = build_channel_mpo(reference_params, reference_jump, chi_mpo=16)
    assert mpo.n_sites == 4
    assert max(mpo.bond_dimensions) <= 16
    assert mpo.discarded_weight < 1e-12
    deviation = np.max(np.abs(mpo.to_superoperator() - dense.to_superoperator()))
    assert deviation <= 1e-8


def test_truncated_mpo_discards_weight(reference_params, reference_jump):
    mpo = build_channel_mpo(reference_params, reference_jump, chi_mpo=2)
    assert max(mpo.bond_dimensions) <= 2
    assert mpo.discarded_weight > 0.0


def test_mpo_bad_bond(reference_params, reference_jump):
    with pytest.raises(ValueError):
        build_channel_mpo(reference_params, reference_jump, chi_mpo=0)


def test_single_site_channel(reference_jump):
    params = ModelParams(omega=3.0, v=15.0, dt=0.1, n_sites=1, depth=1)
    dense = build_dense_channel(params, reference_jump)
    mpo = build_channel_mpo(params, reference_jump)
    assert mpo.bond_dimensions == []
    assert np.allclose(mpo.to_superoperator(), dense.to_superoperator(), atol=1e-12)
    assert channel_is_cptp(dense)


def test_single_site_decay(reference_jump):
    """Without a field the coherence of |+> shrinks by cos(sqrt(kappa dt))."""
    dt = 0.1
    params = ModelParams(omega=0.0, v=15.0, kappa=1.0, dt=dt, n_sites=1, depth=1)
    spec = ProductStateSpec.from_magnetizations(0.5, 0.0, 0.0)
    state = to_layer_state(spec, 1, dense=True)
    output = apply_channel(state, build_dense_channel(params, reference_jump))
    expected = 0.5 * math.cos(math.sqrt(dt))
    assert output.magnetization("x") == pytest.approx(expected, abs=1e-12)
    # and the Lindblad decay to O(dt**2)
    assert output.magnetization("x") == pytest.approx(
        0.5 * math.exp(-0.5 * dt), abs=0.01 * dt
    )


def test_channel_commutes_with_parity(reference_params, reference_jump):
    channel = build_dense_channel(reference_params, reference_jump)
    assert commutes_with_parity(channel)
    other = build_dense_channel(reference_params, JumpParams(0.3, 0.9))
    assert commutes_with_parity(other)


def test_parity_superoperator():
    diagonal = parity_superoperator(2)
    assert diagonal.shape == (16,)
    assert np.all(np.abs(diagonal) == 1.0)
    # |00><00| is even, |00><01| is odd
    assert diagonal[0] == 1.0
    assert diagonal[1] == -1.0


def test_lindbladian_trace_preserving(reference_params, reference_jump):
    params = reference_params.replace(n_sites=2)
    generator = build_lindbladian(params, reference_jump)
    identity = np.eye(4).reshape(16)
    assert np.allclose(identity @ generator, 0.0, atol=1e-12)
    assert channel_is_cptp(lindblad_step(params, reference_jump))


def test_lindblad_limit(reference_params, reference_jump):
    """The per-step error shrinks at least 2.5 times when dt halves."""
    deviations = []
    for dt in (0.1, 0.05, 0.025):
        params = reference_params.replace(n_sites=3, dt=dt)
        collision = build_dense_channel(params, reference_jump).to_superoperator()
        exact = lindblad_step(params, reference_jump).to_superoperator()
        deviations.append(np.linalg.norm(collision - exact))
    assert deviations[0] / deviations[1] >= 2.5
    assert deviations[1] / deviations[2] >= 2.5


def test_apply_channel_type_errors(reference_params, reference_jump, product_spec):
    dense = build_dense_channel(reference_params, reference_jump)
    mpo = build_channel_mpo(reference_params, reference_jump)
    with pytest.raises(TypeError):
        apply_channel(to_layer_state(product_spec, 4, dense=True), mpo)
    with pytest.raises(TypeError):
        apply_channel(to_layer_state(product_spec, 4), dense)
    with pytest.raises(TypeError):
        apply_channel(np.eye(16), dense)


def test_apply_channel_site_mismatch(reference_params, reference_jump, product_spec):
    mpo = build_channel_mpo(reference_params, reference_jump)
    with pytest.raises(ValueError):
        apply_channel(to_layer_state(product_spec, 3), mpo)


def test_apply_channel_logs_step(reference_params, reference_jump, product_spec):
    mpo = build_channel_mpo(reference_params, reference_jump)
    state = apply_channel(to_layer_state(product_spec, 4), mpo, chi_mps=48)
    assert isinstance(state, VectorizedLayerState)
    assert len(state.discarded_weights) == 1
    assert len(state.trace_drifts) == 1
    assert state.trace() == pytest.approx(1.0)
    assert state.hermiticity_defect() < 1e-10


def test_mps_matches_dense(reference_params, reference_jump, product_spec):
    dense = evolve_trajectory(
        to_layer_state(product_spec, 4, dense=True), reference_params, reference_jump
    )
    mps = evolve_trajectory(
        to_layer_state(product_spec, 4),
        reference_params,
        reference_jump,
        chi_mps=48,
        chi_mpo=16,
    )
    assert dense.magnetizations.shape == (6, 3)
    assert np.allclose(dense.magnetizations, mps.magnetizations, atol=1e-8, rtol=0)
    assert np.all(mps.discarded_weights < 1e-10)
    assert len(mps.max_bonds) == 5
    assert max(mps.max_bonds) <= 16
    assert dense.max_bonds == []


def test_trajectory_depth_zero(reference_params, reference_jump, product_spec):
    params = reference_params.replace(depth=0)
    state = to_layer_state(product_spec, 4)
    trajectory = evolve_trajectory(state, params, reference_jump)
    assert trajectory.depth == 0
    assert trajectory.mx == pytest.approx([0.4])
    assert trajectory.discarded_weights.size == 0


def test_z2_partners_mirror(reference_params, reference_jump, product_spec):
    forward = evolve_trajectory(
        to_layer_state(product_spec, 4, dense=True), reference_params, reference_jump
    )
    mirror = evolve_trajectory(
        to_layer_state(product_spec.partner(), 4, dense=True),
        reference_params,
        reference_jump,
    )
    assert np.allclose(forward.mx, -mirror.mx, atol=1e-10)
    assert np.allclose(
        forward.magnetizations[:, 2], mirror.magnetizations[:, 2], atol=1e-10
    )


def test_truncation_warning(reference_params, reference_jump, product_spec, caplog):
    evolve_trajectory(
        to_layer_state(product_spec, 4),
        reference_params,
        reference_jump,
        chi_mps=1,
        discarded_weight_warning=0.0,
    )
    assert "consider a larger chi_mps" in caplog.text


def test_ensemble_order_independent_of_workers(reference_params, reference_jump):
    params = reference_params.replace(depth=2)
    specs = sample_initial_states(3, seed=5)
    serial = evolve_ensemble(specs, params, reference_jump, dense=True, workers=1)
    parallel = evolve_ensemble(specs, params, reference_jump, dense=True, workers=2)
    assert len(serial) == 6
    for one, two in zip(serial, parallel):
        assert np.allclose(one.magnetizations, two.magnetizations, atol=1e-14)
    # partners mirror each other
    for i in range(3):
        assert np.allclose(serial[i].mx, -serial[i + 3].mx, atol=1e-10)


def test_mps_partners_mirror(reference_params, reference_jump):
    params = reference_params.replace(n_sites=5)
    specs = sample_initial_states(4, seed=12345)
    trajectories = evolve_ensemble(specs, params, reference_jump, chi_mps=48)
    for trajectory, partner in zip(trajectories[:4], trajectories[4:]):
        assert np.max(np.abs(trajectory.mx + partner.mx)) <= 1e-10
        mz = trajectory.magnetizations[:, 2]
        assert np.allclose(mz, partner.magnetizations[:, 2])
        assert np.all(trajectory.discarded_weights < 1e-10)


def test_dense_apply_accepts_matrix(reference_params, reference_jump, product_spec):
    channel = build_dense_channel(reference_params, reference_jump)
    state = to_layer_state(product_spec, 4, dense=True)
    output = channel.apply(state)
    assert isinstance(output, DenseLayerState)
    assert np.allclose(channel.apply(state.matrix), output.matrix)
