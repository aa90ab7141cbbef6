# -*- coding: utf-8 -*-

"""Dense complex linear algebra used by the gate builders and the engines.

Conventions
-----------
The computational basis of a qubit is (|0>, |1>) where |0> is the vacuum and
the sigma^z = -1 eigenstate. Multi-qubit operators use a fixed ordering in
which leg 0 is the most significant factor of the Kronecker product.
"""

from dataclasses import dataclass
import functools
import logging

import numpy as np
import scipy.linalg

from .exceptions import TruncationError

logger = logging.getLogger(__name__)

# Largest matrix dimension accepted by `kron`. The dense oracle needs at most
# 4**6 for a six-site superoperator.
MAX_DIMENSION = 2**14

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
# sigma^- = (sigma^x - i sigma^y)/2 takes |1> to the vacuum |0>.
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
# The normalized raising operator |1><0|, used on the fresh qubit.
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


@dataclass(frozen=True)
class SVDResult:
    """A (possibly truncated) singular value decomposition A ~ U diag(s) Vh.

    Attributes
    ----------
    left : numpy.ndarray
        The left singular vectors, one per column.
    singular_values : numpy.ndarray
        The kept singular values, non-negative and descending.
    right : numpy.ndarray
        The right singular vectors, one per row.
    discarded_weight : float
        sqrt of the sum of the squared discarded singular values.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray
    discarded_weight: float

    @property
    def rank(self):
        """The number of kept singular values."""
        return self.singular_values.size

    def reconstruct(self):
        """Return U diag(s) Vh."""
        return (self.left * self.singular_values) @ self.right


def kron(*matrices):
    """Kronecker product of one or more matrices, the first most significant.

    Parameters
    ----------
    matrices : numpy.ndarray
        The factors.

    Returns
    -------
    numpy.ndarray
        The product, with dimensions the products of the factors' dimensions.
    """
    if len(matrices) == 0:
        raise ValueError("kron needs at least one matrix.")
    rows = 1
    cols = 1
    for matrix in matrices:
        rows *= matrix.shape[0]
        cols *= matrix.shape[1]
    if rows > MAX_DIMENSION or cols > MAX_DIMENSION:
        raise ValueError(
            f"The Kronecker product would be {rows}x{cols}, beyond the maximum "
            f"dimension {MAX_DIMENSION}."
        )
    return functools.reduce(np.kron, (np.asarray(m, dtype=complex) for m in matrices))


def matrix_exponential(matrix):
    """exp(A) by Pade scaling and squaring.

    Parameters
    ----------
    matrix : numpy.ndarray
        A square matrix.

    Returns
    -------
    numpy.ndarray
        The matrix exponential.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Cannot exponentiate a matrix of shape {matrix.shape}.")
    return scipy.linalg.expm(matrix)


def truncated_svd(matrix, chi=None, cutoff=0.0):
    """Singular value decomposition keeping at most `chi` singular values.

    Parameters
    ----------
    matrix : numpy.ndarray
        The matrix to decompose.
    chi : int or None
        The maximum number of singular values kept. None keeps all of them.
    cutoff : float
        Singular values at or below `cutoff` times the largest one are dropped
        as well. They still count towards the discarded weight.

    Returns
    -------
    SVDResult
        The truncated decomposition.
    """
    if chi is not None and chi < 1:
        raise ValueError(f"The bond dimension chi must be >= 1, not {chi}.")

    try:
        u, s, vh = scipy.linalg.svd(
            matrix, full_matrices=False, lapack_driver="gesdd", check_finite=True
        )
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        logger.debug("gesdd did not converge, retrying with gesvd.")
        try:
            u, s, vh = scipy.linalg.svd(
                matrix, full_matrices=False, lapack_driver="gesvd"
            )
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            raise TruncationError(
                f"SVD of a {matrix.shape[0]}x{matrix.shape[1]} matrix failed: {e}"
            ) from e
    except ValueError as e:
        raise TruncationError(f"SVD of a matrix with non-finite entries: {e}") from e

    keep = s.size
    if chi is not None:
        keep = min(keep, chi)
    if cutoff > 0.0 and s.size > 0:
        keep = min(keep, int(np.count_nonzero(s > cutoff * s[0])))
    keep = max(keep, 1)

    discarded = float(np.sqrt(np.sum(s[keep:] ** 2)))
    return SVDResult(u[:, :keep], s[:keep], vh[:keep, :], discarded)


def operator_on_sites(operator, site, n_sites):
    """Embed a single-qubit operator acting on `site` of an n-qubit register."""
    if not 0 <= site < n_sites:
        raise IndexError(f"Site {site} is not in a register of {n_sites} qubits.")
    factors = [IDENTITY] * n_sites
    factors[site] = operator
    return kron(*factors)


def swap_operator(n_legs, first, second):
    """The permutation matrix exchanging two qubit legs of an n-leg register."""
    dimension = 2**n_legs
    order = list(range(n_legs))
    order[first], order[second] = order[second], order[first]
    permutation = np.arange(dimension).reshape((2,) * n_legs).transpose(order)
    return np.eye(dimension, dtype=complex)[permutation.reshape(-1)]


def apply_operator(tensor, operator, axes):
    """Apply a multi-qubit operator to the given qubit axes of a tensor.

    Parameters
    ----------
    tensor : numpy.ndarray
        A tensor whose listed axes all have dimension 2.
    operator : numpy.ndarray
        A (2**m, 2**m) matrix, leg 0 being the most significant.
    axes : sequence of int
        The m tensor axes the operator acts on, in leg order.

    Returns
    -------
    numpy.ndarray
        The tensor with the operator applied, axes in their original order.
    """
    m = len(axes)
    gate = operator.reshape((2,) * (2 * m))
    result = np.tensordot(gate, tensor, axes=(list(range(m, 2 * m)), list(axes)))
    return np.moveaxis(result, list(range(m)), list(axes))


def superoperator(operator, n_legs):
    """The map rho -> O rho O^dagger as a tensor on vectorized qubit legs.

    Each qubit's density-matrix index pair (ket, bra) is merged into one leg of
    dimension 4 with index 2*ket + bra.

    Returns
    -------
    numpy.ndarray
        Shape (4,)*(2*n_legs): output legs first, then input legs.
    """
    m = n_legs
    gate = operator.reshape((2,) * (2 * m))
    outer = np.multiply.outer(gate, gate.conj())
    order = []
    for leg in range(m):
        order.extend([leg, 2 * m + leg])
    for leg in range(m):
        order.extend([m + leg, 3 * m + leg])
    return outer.transpose(order).reshape((4,) * (2 * m))
