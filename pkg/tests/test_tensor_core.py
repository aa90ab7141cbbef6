#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""Tests for the dense linear algebra primitives."""

import numpy as np
import pytest

from ising_qca.exceptions import TruncationError
from ising_qca.tensor_core import (
    IDENTITY,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    apply_operator,
    kron,
    matrix_exponential,
    operator_on_sites,
    superoperator,
    swap_operator,
    truncated_svd,
)


def test_pauli_algebra():
    assert np.allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z)
    assert np.allclose(SIGMA_MINUS, 0.5 * (SIGMA_X - 1j * SIGMA_Y))
    assert np.allclose(SIGMA_PLUS, SIGMA_MINUS.T)
    # The vacuum |0> is the sigma^z = -1 eigenstate
    assert SIGMA_Z[0, 0] == -1


def test_kron_order():
    """Leg 0 is the most significant factor."""
    product = kron(SIGMA_Z, IDENTITY)
    assert np.allclose(np.diag(product), [-1, -1, 1, 1])
    assert kron(SIGMA_X).shape == (2, 2)


def test_kron_limits():
    with pytest.raises(ValueError):
        kron()
    with pytest.raises(ValueError, match="beyond the maximum"):
        kron(*([IDENTITY] * 15))


def test_matrix_exponential():
    theta = 0.3
    result = matrix_exponential(-1j * theta * SIGMA_X)
    expected = np.cos(theta) * IDENTITY - 1j * np.sin(theta) * SIGMA_X
    assert np.allclose(result, expected, atol=1e-14)
    with pytest.raises(ValueError):
        matrix_exponential(np.ones((2, 3)))


def test_truncated_svd_exact():
    rng = np.random.default_rng(1)
    matrix = rng.normal(size=(6, 5)) + 1j * rng.normal(size=(6, 5))
    result = truncated_svd(matrix)
    assert result.rank == 5
    assert result.discarded_weight == 0.0
    assert np.allclose(result.reconstruct(), matrix)


def test_truncated_svd_weight():
    matrix = np.diag([3.0, 2.0, 1.0, 0.5])
    result = truncated_svd(matrix, chi=2)
    assert result.rank == 2
    assert np.allclose(result.singular_values, [3.0, 2.0])
    assert result.discarded_weight == pytest.approx(np.sqrt(1.25))


def test_truncated_svd_cutoff():
    matrix = np.diag([1.0, 1e-3, 1e-12])
    result = truncated_svd(matrix, cutoff=1e-9)
    assert result.rank == 2
    assert result.discarded_weight == pytest.approx(1e-12)


def test_truncated_svd_errors():
    with pytest.raises(ValueError):
        truncated_svd(np.eye(2), chi=0)
    with pytest.raises(TruncationError):
        truncated_svd(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_operator_on_sites():
    op = operator_on_sites(SIGMA_Z, 2, 3)
    assert np.allclose(op, kron(IDENTITY, IDENTITY, SIGMA_Z))
    with pytest.raises(IndexError):
        operator_on_sites(SIGMA_Z, 3, 3)


def test_swap_operator():
    swap = swap_operator(3, 0, 2)
    a, b, c = SIGMA_X, SIGMA_Z, SIGMA_Y
    assert np.allclose(swap @ kron(a, b, c) @ swap.T, kron(c, b, a))
    assert np.allclose(swap @ swap, np.eye(8))


def test_apply_operator():
    rng = np.random.default_rng(2)
    psi = rng.normal(size=(2, 2, 2)) + 0j
    op = kron(SIGMA_X, SIGMA_Z)
    result = apply_operator(psi, op, [2, 0])
    expected = kron(SIGMA_Z, IDENTITY, SIGMA_X) @ psi.reshape(-1)
    assert np.allclose(result.reshape(-1), expected)


def test_superoperator():
    """The vectorized map equals rho -> O rho O^dagger."""
    rng = np.random.default_rng(3)
    op = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    s = superoperator(op, 2)
    assert s.shape == (4, 4, 4, 4)

    # rho[(k0, k1), (b0, b1)] -> legs (2*k0 + b0, 2*k1 + b1)
    vector = rho.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    result = np.einsum("abcd,cd->ab", s, vector)
    expected = (op @ rho @ op.conj().T).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
    assert np.allclose(result, expected.reshape(4, 4))
