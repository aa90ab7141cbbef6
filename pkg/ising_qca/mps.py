# -*- coding: utf-8 -*-

"""Layer density matrices, dense and as vectorized matrix product states.

In the vectorized form each qubit's density-matrix indices (ket, bra) are
merged into one physical index 2*ket + bra of dimension 4. Site tensors have
the shape (chi_left, 4, chi_right), with chi = 1 at both ends of the chain.
"""

import logging
import math

import numpy as np

from .tensor_core import PAULI, SIGMA_Z, kron, truncated_svd

logger = logging.getLogger(__name__)

MAX_DENSE_SITES = 6
# Contracting a site tensor's physical index with this gives its trace.
TRACE_VECTOR = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex)
# sigma^z rho sigma^z on one vectorized site.
PARITY_DIAGONAL = np.array([1.0, -1.0, -1.0, 1.0])


def expectation_vector(operator):
    """The row vector e with e . vec(rho) = Tr(operator rho)."""
    return np.asarray(operator, dtype=complex).T.reshape(4)


def _check_axis(axis):
    if axis not in PAULI:
        raise ValueError(f"The magnetization axis must be x, y or z, not '{axis}'.")


class DenseLayerState(object):
    """The density matrix of a layer of at most six qubits."""

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"A density matrix must be square, not {matrix.shape}.")
        n_sites = int(round(math.log2(matrix.shape[0])))
        if 2**n_sites != matrix.shape[0]:
            raise ValueError(f"{matrix.shape[0]} is not a power of two.")
        if n_sites > MAX_DENSE_SITES:
            raise ValueError(
                f"A dense layer state is limited to {MAX_DENSE_SITES} sites, not "
                f"{n_sites}."
            )
        self.matrix = matrix
        self.n_sites = n_sites

    def __repr__(self):
        return f"DenseLayerState(n_sites={self.n_sites})"

    @classmethod
    def product(cls, site_matrices, n_sites=None):
        """The tensor product of single-site density matrices.

        Parameters
        ----------
        site_matrices : numpy.ndarray or [numpy.ndarray]
            One 2x2 matrix used on every site, or one per site.
        n_sites : int
            The number of sites when a single matrix is given.
        """
        if isinstance(site_matrices, np.ndarray) and site_matrices.ndim == 2:
            site_matrices = [site_matrices] * n_sites
        return cls(kron(*site_matrices))

    def copy(self):
        return DenseLayerState(self.matrix.copy())

    def trace(self):
        return complex(np.trace(self.matrix))

    def expectation(self, operator, site):
        """Tr(O_site rho) for a single-qubit operator on one site."""
        reduced = self.single_site_density(site)
        return complex(np.trace(operator @ reduced))

    def single_site_density(self, site):
        n = self.n_sites
        if not 0 <= site < n:
            raise IndexError(f"Site {site} is not in a layer of {n}.")
        before = 2**site
        after = 2 ** (n - site - 1)
        blocks = self.matrix.reshape(before, 2, after, before, 2, after)
        return np.einsum("aibajb->ij", blocks)

    def magnetization(self, axis="x"):
        """(1/2N) sum_k <sigma^axis_k>."""
        _check_axis(axis)
        n = self.n_sites
        operator = PAULI[axis]
        total = sum(self.expectation(operator, k).real for k in range(n))
        return total / (2.0 * n * self.trace().real)

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self):
        hermitian = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.min(np.linalg.eigvalsh(hermitian)))

    def is_valid(self, tol=1e-12, psd_tol=1e-10):
        """Hermitian, unit trace and positive semidefinite within tolerances."""
        return (
            self.hermiticity_defect() <= tol
            and abs(self.trace() - 1) <= tol
            and self.min_eigenvalue() >= -psd_tol
        )

    def z2_partner(self):
        parity = np.diag(kron(*([SIGMA_Z] * self.n_sites))).real
        return DenseLayerState(parity[:, None] * self.matrix * parity[None, :])

    def to_vectorized(self, chi=None):
        return VectorizedLayerState.from_dense(self.matrix, chi=chi)


class VectorizedLayerState(object):
    """A layer density matrix as a matrix product state of local dimension 4.

    Attributes
    ----------
    tensors : [numpy.ndarray]
        The site tensors, (chi_left, 4, chi_right).
    discarded_weights : [float]
        The discarded weight of every channel application, in order.
    trace_drifts : [float]
        |trace - 1| before the renormalization of every application.
    """

    def __init__(self, tensors, discarded_weights=None, trace_drifts=None):
        tensors = [np.asarray(t, dtype=complex) for t in tensors]
        if len(tensors) == 0:
            raise ValueError("A layer state needs at least one site.")
        for k, tensor in enumerate(tensors):
            if tensor.ndim != 3 or tensor.shape[1] != 4:
                raise ValueError(f"Site tensor {k} has shape {tensor.shape}.")
            if k > 0 and tensors[k - 1].shape[2] != tensor.shape[0]:
                raise ValueError(f"The bond between sites {k - 1} and {k} mismatches.")
        if tensors[0].shape[0] != 1 or tensors[-1].shape[2] != 1:
            raise ValueError("The outer bonds of a layer state must have dimension 1.")
        self.tensors = tensors
        self.discarded_weights = list(discarded_weights or [])
        self.trace_drifts = list(trace_drifts or [])

    def __repr__(self):
        return (
            f"VectorizedLayerState(n_sites={self.n_sites}, "
            f"bonds={self.bond_dimensions})"
        )

    @classmethod
    def product(cls, site_matrices, n_sites=None):
        """A bond-dimension-1 state from single-site density matrices.

        Parameters
        ----------
        site_matrices : numpy.ndarray or [numpy.ndarray]
            One 2x2 matrix used on every site, or one per site.
        n_sites : int
            The number of sites when a single matrix is given.
        """
        if isinstance(site_matrices, np.ndarray) and site_matrices.ndim == 2:
            if n_sites is None or n_sites < 1:
                raise ValueError("n_sites >= 1 is needed with a single site matrix.")
            site_matrices = [site_matrices] * n_sites
        tensors = [
            np.asarray(rho, dtype=complex).reshape(1, 4, 1) for rho in site_matrices
        ]
        return cls(tensors)

    @classmethod
    def from_dense(cls, matrix, chi=None):
        """Factor a dense density matrix by sequential SVDs."""
        matrix = np.asarray(matrix, dtype=complex)
        n = int(round(math.log2(matrix.shape[0])))
        order = [axis for k in range(n) for axis in (k, n + k)]
        vector = matrix.reshape((2,) * (2 * n)).transpose(order).reshape(-1)

        tensors = []
        rest = vector.reshape(1, -1)
        for k in range(n - 1):
            chi_left = rest.shape[0]
            svd = truncated_svd(rest.reshape(chi_left * 4, -1), chi=chi)
            tensors.append(svd.left.reshape(chi_left, 4, svd.rank))
            rest = svd.singular_values[:, None] * svd.right
        tensors.append(rest.reshape(rest.shape[0], 4, 1))
        return cls(tensors)

    @property
    def n_sites(self):
        return len(self.tensors)

    @property
    def bond_dimensions(self):
        return [t.shape[2] for t in self.tensors[:-1]]

    @property
    def max_bond(self):
        return max(self.bond_dimensions, default=1)

    def copy(self):
        return VectorizedLayerState(
            [t.copy() for t in self.tensors], self.discarded_weights, self.trace_drifts
        )

    def _traced(self):
        return [np.einsum("apb,p->ab", t, TRACE_VECTOR) for t in self.tensors]

    def _environments(self):
        """Left and right partial traces: left[k] ends before site k."""
        traced = self._traced()
        n = self.n_sites
        left = [np.ones(1, dtype=complex)]
        for k in range(n - 1):
            left.append(left[-1] @ traced[k])
        right = [np.ones(1, dtype=complex)]
        for k in range(n - 1, 0, -1):
            right.append(traced[k] @ right[-1])
        right.reverse()
        return left, right

    def trace(self):
        result = np.ones(1, dtype=complex)
        for traced in self._traced():
            result = result @ traced
        return complex(result[0])

    def normalize(self):
        """Scale to unit trace in place; returns the trace before scaling."""
        trace = self.trace()
        if trace == 0:
            raise ValueError("Cannot normalize a layer state with zero trace.")
        self.tensors[0] = self.tensors[0] / trace
        return trace

    def local_expectations(self, operator):
        """Tr(O_k rho) / Tr(rho) for every site k."""
        e = expectation_vector(operator)
        left, right = self._environments()
        values = np.empty(self.n_sites, dtype=complex)
        for k, tensor in enumerate(self.tensors):
            local = np.einsum("apb,p->ab", tensor, e)
            values[k] = left[k] @ local @ right[k]
        return values / self.trace()

    def magnetization(self, axis="x"):
        """(1/2N) sum_k <sigma^axis_k>."""
        _check_axis(axis)
        return float(np.mean(self.local_expectations(PAULI[axis]).real) / 2.0)

    def single_site_density(self, site):
        """The reduced 2x2 density matrix of one site."""
        if not 0 <= site < self.n_sites:
            raise IndexError(f"Site {site} is not in a layer of {self.n_sites}.")
        left, right = self._environments()
        vector = np.einsum("a,apb,b->p", left[site], self.tensors[site], right[site])
        return vector.reshape(2, 2) / self.trace()

    def hermiticity_defect(self):
        """Largest |rho - rho^dagger| over the single-site reduced states."""
        defects = []
        for k in range(self.n_sites):
            rho = self.single_site_density(k)
            defects.append(np.max(np.abs(rho - rho.conj().T)))
        return float(max(defects))

    def z2_partner(self):
        """Conjugate every site by sigma^z; mx and my change sign."""
        tensors = [t * PARITY_DIAGONAL[None, :, None] for t in self.tensors]
        return VectorizedLayerState(tensors, self.discarded_weights, self.trace_drifts)

    def left_canonicalize(self):
        """QR sweep from the left, in place; all but the last site become
        left-orthonormal and the norm moves into the last tensor."""
        for k in range(self.n_sites - 1):
            tensor = self.tensors[k]
            chi_left, _, chi_right = tensor.shape
            q, r = np.linalg.qr(tensor.reshape(chi_left * 4, chi_right))
            self.tensors[k] = q.reshape(chi_left, 4, q.shape[1])
            self.tensors[k + 1] = np.tensordot(r, self.tensors[k + 1], axes=(1, 0))

    def compress(self, chi=None, cutoff=0.0):
        """Right-to-left sweep of truncated SVDs, in place.

        The truncation is optimal when the state is left-canonical on entry.

        Returns
        -------
        float
            The sum of the squared discarded singular values.
        """
        discarded_squared = 0.0
        for k in range(self.n_sites - 1, 0, -1):
            tensor = self.tensors[k]
            chi_left, _, chi_right = tensor.shape
            svd = truncated_svd(tensor.reshape(chi_left, 4 * chi_right), chi, cutoff)
            discarded_squared += svd.discarded_weight**2
            self.tensors[k] = svd.right.reshape(svd.rank, 4, chi_right)
            weight = svd.left * svd.singular_values[None, :]
            self.tensors[k - 1] = np.tensordot(self.tensors[k - 1], weight, axes=(2, 0))
        return discarded_squared

    def to_dense(self):
        """The 2**N x 2**N density matrix, for N <= 6."""
        n = self.n_sites
        if n > MAX_DENSE_SITES:
            raise ValueError(f"Refusing to densify a layer of {n} sites.")
        result = self.tensors[0]
        for tensor in self.tensors[1:]:
            result = np.tensordot(result, tensor, axes=(-1, 0))
        result = result.reshape((2,) * (2 * n))
        order = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
        return result.transpose(order).reshape(2**n, 2**n)
