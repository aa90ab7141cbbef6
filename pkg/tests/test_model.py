#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the parameters, operators and local gates."""

import numpy as np
import pytest

from ising_qca.model import (
    JumpParams,
    ModelParams,
    build_gate_sequence,
    build_jump_operator,
    build_local_gate,
    build_local_hamiltonian,
    parity_conjugate,
)
from ising_qca.tensor_core import (
    IDENTITY,
    SIGMA_MINUS,
    SIGMA_X,
    SIGMA_Z,
    kron,
    operator_on_sites,
)


def test_default_parameters():
    params = ModelParams()
    assert (params.omega, params.v, params.kappa, params.dt) == (3.0, 15.0, 1.0, 0.1)
    assert (params.n_sites, params.depth) == (10, 10)


@pytest.mark.parametrize(
    "changes",
    [
        {"kappa": 0.0},
        {"dt": -0.1},
        {"n_sites": 0},
        {"depth": -1},
        {"omega": float("nan")},
        {"v": float("inf")},
    ],
)
def test_invalid_parameters(changes):
    with pytest.raises(ValueError):
        ModelParams(**changes)


def test_replace():
    params = ModelParams().replace(n_sites=4, dt=0.05)
    assert params.n_sites == 4
    assert params.dt == 0.05
    assert params.omega == 3.0


def test_jump_params():
    jp = JumpParams(0.5, -0.5)
    assert tuple(jp) == (0.5, -0.5)
    assert jp.shifted(0.1, 0.2) == JumpParams(0.6, -0.3)
    with pytest.raises(ValueError):
        JumpParams(float("nan"), 0.0)


def test_jump_operator_decay():
    """(1/2, -1/2) is pure decay."""
    assert np.allclose(build_jump_operator(JumpParams(0.5, -0.5)), SIGMA_MINUS)
    jump = build_jump_operator(JumpParams(0.5, -0.5), kappa=4.0)
    assert np.allclose(jump, 2.0 * SIGMA_MINUS)


def test_hamiltonian_sum():
    """The local Hamiltonians add up to the open-boundary Ising Hamiltonian."""
    params = ModelParams(omega=1.3, v=2.1, n_sites=3)
    n = params.n_sites
    total = kron(build_local_hamiltonian(params, 0), IDENTITY) + kron(
        IDENTITY, build_local_hamiltonian(params, 1)
    )
    expected = sum(0.5 * 1.3 * operator_on_sites(SIGMA_Z, k, n) for k in range(n))
    expected = expected - 0.25 * 2.1 * (
        kron(SIGMA_X, SIGMA_X, IDENTITY) + kron(IDENTITY, SIGMA_X, SIGMA_X)
    )
    assert np.allclose(total, expected)
    assert np.allclose(build_local_hamiltonian(params, n - 1), 0.0)


def test_single_site_hamiltonian():
    params = ModelParams(omega=2.0, n_sites=1)
    assert np.allclose(build_local_hamiltonian(params, 0), SIGMA_Z)


def test_site_range():
    with pytest.raises(IndexError):
        build_local_hamiltonian(ModelParams(n_sites=3), 3)


def test_gates_unitary(reference_params, reference_jump):
    gates = build_gate_sequence(reference_params, reference_jump)
    assert [g.site for g in gates] == [0, 1, 2, 3]
    assert [g.n_legs for g in gates] == [3, 3, 3, 2]
    for gate in gates:
        assert gate.is_unitary(1e-12)


@pytest.mark.parametrize("jp", [JumpParams(0.5, -0.5), JumpParams(-0.15, -1.0)])
def test_gate_parity_invariance(reference_params, jp):
    """sigma^z on every leg of a gate leaves it unchanged."""
    for gate in build_gate_sequence(reference_params, jp):
        assert np.allclose(parity_conjugate(gate.matrix), gate.matrix, atol=1e-14)


def test_gate_without_coupling_swaps():
    """With no Hamiltonian and no jump the gate is the bare SWAP."""
    params = ModelParams(omega=0.0, v=0.0, n_sites=3)
    gate = build_local_gate(params, JumpParams(0.0, 0.0), 0)
    vacuum = np.array([[1.0], [0.0]])
    excited = np.array([[0.0], [1.0]])
    swapped = gate.matrix @ kron(excited, vacuum, vacuum)
    assert np.allclose(swapped, kron(vacuum, vacuum, excited))


def test_decay_only_gate():
    """Under pure decay an excitation survives with probability cos^2(sqrt(dt))."""
    params = ModelParams(omega=0.0, v=0.0, kappa=1.0, dt=0.1, n_sites=1)
    gate = build_local_gate(params, JumpParams(0.5, -0.5), 0)
    # old site excited, fresh site vacuum: |1, 0>
    psi = gate.matrix @ np.array([0, 0, 1, 0], dtype=complex)
    # after the SWAP the old excitation sits on leg 1
    p_stay = abs(psi[1]) ** 2
    assert p_stay == pytest.approx(np.cos(np.sqrt(0.1)) ** 2)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
