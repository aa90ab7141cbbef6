# -*- coding: utf-8 -*-

"""The layer-to-layer channel of the QCA.

One step prepares the next layer in the vacuum, applies the gates G_0 ...
G_{N-1} in ascending order and traces out the old layer:

    Lambda[rho] = Tr_old( G (rho x |0..0><0..0|) G^dagger ).

The channel is available densely for N <= 6, where it serves as the oracle,
and as a matrix product operator for the tensor-network engine.
"""

from dataclasses import dataclass, field
import functools
import logging

import numpy as np

from .exceptions import TruncationError
from .model import build_gate_sequence, build_jump_operator
from .mps import (
    MAX_DENSE_SITES,
    TRACE_VECTOR,
    DenseLayerState,
    VectorizedLayerState,
)
from .sampling import to_layer_state
from . import util
from .tensor_core import (
    IDENTITY,
    SIGMA_X,
    SIGMA_Z,
    apply_operator,
    kron,
    matrix_exponential,
    operator_on_sites,
    superoperator,
    truncated_svd,
)

logger = logging.getLogger(__name__)

# The vectorized |0><0| of a fresh qubit.
VACUUM_VECTOR = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
# Exceeding this with truncation disabled is an overflow.
MAX_BOND_DIMENSION = 4096
DEFAULT_DISCARDED_WEIGHT_WARNING = 1.0e-3


def _check_dense_size(n_sites):
    if n_sites > MAX_DENSE_SITES:
        raise ValueError(
            f"The dense channel is limited to {MAX_DENSE_SITES} sites, not {n_sites}."
        )


class ChannelOperator(object):
    """Base class of the two forms of the one-layer channel.

    Attributes
    ----------
    params : ModelParams
        The model the channel was built from.
    jump : JumpParams
        The jump-operator parameters.
    """

    def __init__(self, params=None, jump=None):
        self.params = params
        self.jump = jump

    @property
    def n_sites(self):
        raise NotImplementedError()

    def to_superoperator(self):
        """The dense 4**N x 4**N superoperator on row-major vectorized rho."""
        raise NotImplementedError()


class DenseChannel(ChannelOperator):
    """The channel as a dense superoperator, optionally with its Kraus form."""

    def __init__(self, superoperator_matrix, kraus=None, params=None, jump=None):
        super().__init__(params, jump)
        self.superoperator = np.asarray(superoperator_matrix, dtype=complex)
        self.kraus = kraus
        dimension = int(round(np.sqrt(self.superoperator.shape[0])))
        self.dimension = dimension
        self._n_sites = int(round(np.log2(dimension)))

    def __repr__(self):
        return f"DenseChannel(n_sites={self.n_sites})"

    @classmethod
    def from_kraus(cls, kraus, params=None, jump=None):
        """S = sum_i K_i x conj(K_i)."""
        kraus = np.asarray(kraus, dtype=complex)
        d = kraus.shape[1]
        matrix = np.einsum("iab,icd->acbd", kraus, kraus.conj()).reshape(d * d, d * d)
        return cls(matrix, kraus=kraus, params=params, jump=jump)

    @property
    def n_sites(self):
        return self._n_sites

    def to_superoperator(self):
        return self.superoperator

    def choi(self):
        """The Choi matrix C[(a, b), (c, d)] = S[(a, c), (b, d)]."""
        d = self.dimension
        return (
            self.superoperator.reshape(d, d, d, d)
            .transpose(0, 2, 1, 3)
            .reshape(d * d, d * d)
        )

    def apply(self, rho):
        """Lambda[rho] for a dense state or a density matrix."""
        if isinstance(rho, DenseLayerState):
            return DenseLayerState(self.apply(rho.matrix))
        rho = np.asarray(rho, dtype=complex)
        d = self.dimension
        return (self.superoperator @ rho.reshape(d * d)).reshape(d, d)


@dataclass
class MPOChannel(ChannelOperator):
    """The channel as an MPO with site tensors (chi_left, out, in, chi_right).

    `out` and `in` are the vectorized indices 2*ket + bra of the new and old
    layer site.
    """

    tensors: list
    params: object = None
    jump: object = None
    discarded_weights: list = field(default_factory=list)

    @property
    def n_sites(self):
        return len(self.tensors)

    @property
    def bond_dimensions(self):
        return [t.shape[3] for t in self.tensors[:-1]]

    @property
    def discarded_weight(self):
        return float(np.sqrt(np.sum(np.square(self.discarded_weights))))

    def to_superoperator(self):
        n = self.n_sites
        _check_dense_size(n)
        result = self.tensors[0]
        for tensor in self.tensors[1:]:
            result = np.tensordot(result, tensor, axes=(-1, 0))
        # (out_0, in_0, out_1, in_1, ...) with out and in split into (ket, bra)
        result = result.reshape((2,) * (4 * n))
        ket_out = [4 * k for k in range(n)]
        bra_out = [4 * k + 1 for k in range(n)]
        ket_in = [4 * k + 2 for k in range(n)]
        bra_in = [4 * k + 3 for k in range(n)]
        order = ket_out + bra_out + ket_in + bra_in
        return result.transpose(order).reshape(4**n, 4**n)


def build_dense_channel(params, jp):
    """The channel of one layer step as Kraus operators and a superoperator.

    The old and new layers are held as one tensor with axes (old 0..N-1,
    new 0..N-1, input). Applying the gates to the isometry "old layer = input,
    new layer = vacuum" gives V, and the Kraus operators are its slices
    K_i = <i|_old V.

    Parameters
    ----------
    params : ModelParams
        The model, N <= 6.
    jp : JumpParams
        The jump-operator parameters.

    Returns
    -------
    DenseChannel
        The channel with 2**N Kraus operators.
    """
    n = params.n_sites
    _check_dense_size(n)
    d = 2**n

    tensor = np.zeros((2,) * (2 * n) + (d,), dtype=complex)
    tensor[(slice(None),) * n + (0,) * n] = np.eye(d).reshape((2,) * n + (d,))

    for gate in build_gate_sequence(params, jp):
        k = gate.site
        if gate.n_legs == 3:
            axes = (k, k + 1, n + k)
        else:
            axes = (k, n + k)
        tensor = apply_operator(tensor, gate.matrix, axes)

    kraus = tensor.reshape(d, d, d)
    logger.debug(f"Built the dense channel for N={n}.")
    return DenseChannel.from_kraus(kraus, params=params, jump=jp)


def _reduced_gate(gate):
    """Gate superoperator with the fresh qubit in the vacuum and old k traced.

    Returns R[o_c, o_b, i_a, i_b] for a bond gate or T[o_c, i_a] for the
    boundary gate, where a, b, c are old k, old k+1 and new k.
    """
    s = superoperator(gate.matrix, gate.n_legs)
    if gate.n_legs == 3:
        # s[o_a, o_b, o_c, i_a, i_b, i_c]
        return np.einsum("abcdef,a,f->cbde", s, TRACE_VECTOR, VACUUM_VECTOR)
    return np.einsum("acdf,a,f->cd", s, TRACE_VECTOR, VACUUM_VECTOR)


def build_channel_mpo(params, jp, chi_mpo=16, cutoff=0.0):
    """The channel as an MPO compressed to bond dimension `chi_mpo`.

    The reduced gate superoperators are absorbed site by site in ascending
    order. The output of gate k on old site k+1 is carried into gate k+1 and
    split off by a truncated SVD after each absorption. The exact MPO has bond
    dimension at most 16.

    Parameters
    ----------
    params : ModelParams
        The model.
    jp : JumpParams
        The jump-operator parameters.
    chi_mpo : int or None
        The largest MPO bond dimension. None keeps everything.
    cutoff : float
        Relative singular-value cutoff passed to `truncated_svd`.

    Returns
    -------
    MPOChannel
        The MPO and the discarded weight of each bond.
    """
    if chi_mpo is not None and chi_mpo < 1:
        raise ValueError(f"The MPO bond dimension must be >= 1, not {chi_mpo}.")
    n = params.n_sites
    gates = build_gate_sequence(params, jp)
    boundary = _reduced_gate(gates[-1])

    if n == 1:
        return MPOChannel([boundary.reshape(1, 4, 4, 1)], params, jp, [])

    tensors = []
    discarded = []
    carry = None
    for k in range(n - 1):
        reduced = _reduced_gate(gates[k])
        if carry is None:
            # rows (o_c, i_a), columns (i_b, o_b)
            matrix = reduced.transpose(0, 2, 3, 1).reshape(16, 16)
            chi_left = 1
        else:
            chi_left = carry.shape[0]
            # carry[l, in_k, mid] with mid = i_a of this gate
            block = np.einsum("lpm,cbmd->lcpdb", carry, reduced)
            matrix = block.reshape(chi_left * 16, 16)
        svd = truncated_svd(matrix, chi_mpo, cutoff)
        discarded.append(svd.discarded_weight)
        tensors.append(svd.left.reshape(chi_left, 4, 4, svd.rank))
        carry = (svd.singular_values[:, None] * svd.right).reshape(svd.rank, 4, 4)

    last = np.einsum("lpm,cm->lcp", carry, boundary)
    tensors.append(last.reshape(carry.shape[0], 4, 4, 1))

    channel = MPOChannel(tensors, params, jp, discarded)
    logger.debug(
        f"Built the channel MPO for N={n}: bonds {channel.bond_dimensions}, "
        f"discarded weight {channel.discarded_weight:.3g}"
    )
    return channel


def _apply_mpo(state, channel, chi_mps, cutoff=0.0):
    """Contract the MPO into the state exactly, then compress.

    The product has bonds chi_w * chi_b. It is brought into left-canonical
    form by QR and truncated only in the right-to-left SVD sweep, where every
    cut sees orthonormal environments.
    """
    if state.n_sites != channel.n_sites:
        raise ValueError(
            f"The state has {state.n_sites} sites but the channel {channel.n_sites}."
        )
    tensors = []
    for tensor, operator in zip(state.tensors, channel.tensors):
        # A[a, p, b] x W[w, o, p, w'] -> M[(a, w), o, (b, w')]
        block = np.einsum("apb,wopv->awobv", tensor, operator)
        chi_a, chi_w, _, chi_b, chi_v = block.shape
        tensors.append(block.reshape(chi_a * chi_w, 4, chi_b * chi_v))

    result = VectorizedLayerState(tensors, state.discarded_weights, state.trace_drifts)
    result.left_canonicalize()
    discarded_squared = result.compress(chi_mps, cutoff)
    if chi_mps is None and result.max_bond > MAX_BOND_DIMENSION:
        raise TruncationError(
            f"The bond dimension grew to {result.max_bond} with truncation "
            f"disabled, beyond {MAX_BOND_DIMENSION}."
        )
    trace = result.normalize()
    result.discarded_weights.append(float(np.sqrt(discarded_squared)))
    result.trace_drifts.append(float(abs(trace - 1.0)))
    return result


def apply_channel(state, ch, chi_mps=None, cutoff=0.0):
    """One layer step: Lambda applied to `state`, renormalized to unit trace.

    Parameters
    ----------
    state : VectorizedLayerState or DenseLayerState
        The input layer. MPS states need an MPOChannel, dense states a
        DenseChannel.
    ch : ChannelOperator
        The channel.
    chi_mps : int or None
        The largest MPS bond dimension kept. None disables truncation.
    cutoff : float
        Relative singular-value cutoff.

    Returns
    -------
    VectorizedLayerState or DenseLayerState
        The output layer. An MPS output carries the discarded weight and the
        trace drift of this step appended to the input's logs.
    """
    if isinstance(state, VectorizedLayerState):
        if not isinstance(ch, MPOChannel):
            raise TypeError("A vectorized layer state needs an MPO channel.")
        return _apply_mpo(state, ch, chi_mps, cutoff)
    if isinstance(state, DenseLayerState):
        if not isinstance(ch, DenseChannel):
            raise TypeError("A dense layer state needs a dense channel.")
        output = ch.apply(state)
        trace = output.trace()
        output.matrix = output.matrix / trace
        return output
    raise TypeError(f"Cannot apply a channel to {type(state).__name__}.")


def magnetization(state, axis="x"):
    """(1/2N) sum_k <sigma^axis_k> of a dense or vectorized layer state."""
    return state.magnetization(axis)


@dataclass
class Trajectory:
    """Layer magnetizations of one evolution, layer 0 being the input.

    Attributes
    ----------
    magnetizations : numpy.ndarray
        (L+1, 3) array of (mx, my, mz) per layer.
    discarded_weights : numpy.ndarray
        The discarded weight of each step, length L.
    trace_drifts : numpy.ndarray
        |trace - 1| of each step before renormalization.
    max_bonds : list
        The largest MPS bond dimension after each step; empty for dense runs.
    """

    magnetizations: np.ndarray
    discarded_weights: np.ndarray
    trace_drifts: np.ndarray
    max_bonds: list = field(default_factory=list)

    @property
    def mx(self):
        return self.magnetizations[:, 0]

    @property
    def depth(self):
        return self.magnetizations.shape[0] - 1

    @property
    def cumulative_discarded_weight(self):
        return np.sqrt(np.cumsum(np.square(self.discarded_weights)))


def _measure(state):
    return [state.magnetization(axis) for axis in ("x", "y", "z")]


def evolve_trajectory(
    state0,
    params,
    jp,
    chi_mps=48,
    chi_mpo=16,
    channel=None,
    discarded_weight_warning=DEFAULT_DISCARDED_WEIGHT_WARNING,
):
    """Evolve a layer state through `params.depth` layers.

    Parameters
    ----------
    state0 : VectorizedLayerState or DenseLayerState
        The input layer.
    params : ModelParams
        The model and depth L.
    jp : JumpParams
        The jump-operator parameters.
    chi_mps, chi_mpo : int or None
        Bond dimensions; None disables truncation.
    channel : ChannelOperator
        A prebuilt channel, so an ensemble shares one construction.
    discarded_weight_warning : float
        Steps discarding more than this are logged as warnings.

    Returns
    -------
    Trajectory
        The magnetizations of every layer.
    """
    dense = isinstance(state0, DenseLayerState)
    if channel is None:
        if dense:
            channel = build_dense_channel(params, jp)
        else:
            channel = build_channel_mpo(params, jp, chi_mpo)

    state = state0
    magnetizations = [_measure(state)]
    discarded = []
    drifts = []
    bonds = []
    for layer in range(1, params.depth + 1):
        if dense:
            state = channel.apply(state)
            trace = state.trace()
            drifts.append(float(abs(trace - 1.0)))
            state.matrix = state.matrix / trace
            discarded.append(0.0)
        else:
            state = apply_channel(state, channel, chi_mps)
            discarded.append(state.discarded_weights[-1])
            drifts.append(state.trace_drifts[-1])
            bonds.append(state.max_bond)
            logger.debug(
                f"Layer {layer}: discarded weight {discarded[-1]:.3g}, max bond "
                f"{bonds[-1]}, trace drift {drifts[-1]:.3g}"
            )
            if discarded[-1] > discarded_weight_warning:
                logger.warning(
                    f"Layer {layer} discarded a weight of {discarded[-1]:.3g}, above "
                    f"{discarded_weight_warning:.3g}; consider a larger chi_mps."
                )
        magnetizations.append(_measure(state))

    return Trajectory(
        np.array(magnetizations), np.array(discarded), np.array(drifts), bonds
    )


def _evolve_chunk(specs, params, jp, chi_mps, channel, dense, warning):
    return [
        evolve_trajectory(
            to_layer_state(spec, params.n_sites, dense=dense),
            params,
            jp,
            chi_mps=chi_mps,
            channel=channel,
            discarded_weight_warning=warning,
        )
        for spec in specs
    ]


def evolve_ensemble(
    specs,
    params,
    jp,
    chi_mps=48,
    chi_mpo=16,
    dense=False,
    workers=None,
    discarded_weight_warning=DEFAULT_DISCARDED_WEIGHT_WARNING,
):
    """Evolve every product state of an ensemble through the same channel.

    The channel is built once. The specs are divided statically into one
    contiguous chunk per worker and the trajectories come back in the order
    of `specs`.

    Returns
    -------
    [Trajectory]
        One trajectory per spec.
    """
    specs = list(specs)
    if dense:
        channel = build_dense_channel(params, jp)
    else:
        channel = build_channel_mpo(params, jp, chi_mpo)

    n_workers = util.worker_count(workers)
    chunks = util.split_evenly(len(specs), n_workers)
    task = functools.partial(
        _evolve_chunk,
        params=params,
        jp=jp,
        chi_mps=chi_mps,
        channel=channel,
        dense=dense,
        warning=discarded_weight_warning,
    )
    logger.info(f"Evolving {len(specs)} states through {params.depth} layers.")
    results = util.parallel_map(task, [specs[s] for s in chunks], workers=n_workers)
    return [trajectory for chunk in results for trajectory in chunk]


def build_lindbladian(params, jp):
    """The dense Lindblad generator on row-major vectorized layer states.

    L = -i (H x 1 - 1 x H^T)
        + sum_k (J_k x J_k^* - 1/2 J_k^dagger J_k x 1 - 1/2 1 x (J_k^dagger J_k)^T)

    with H = (Omega/2) sum_k sigma^z_k - (V/4) sum_k sigma^x_k sigma^x_{k+1}
    (open boundaries) and the jump operator J(a, b) on every site.
    """
    n = params.n_sites
    _check_dense_size(n)
    d = 2**n
    identity = np.eye(d, dtype=complex)

    hamiltonian = np.zeros((d, d), dtype=complex)
    for k in range(n):
        hamiltonian += 0.5 * params.omega * operator_on_sites(SIGMA_Z, k, n)
    for k in range(n - 1):
        factors = [IDENTITY] * n
        factors[k] = SIGMA_X
        factors[k + 1] = SIGMA_X
        hamiltonian -= 0.25 * params.v * kron(*factors)

    generator = -1j * (
        np.kron(hamiltonian, identity) - np.kron(identity, hamiltonian.T)
    )
    jump = build_jump_operator(jp, params.kappa)
    for k in range(n):
        j = operator_on_sites(jump, k, n)
        jdj = j.conj().T @ j
        generator += (
            np.kron(j, j.conj())
            - 0.5 * np.kron(jdj, identity)
            - 0.5 * np.kron(identity, jdj.T)
        )
    return generator


def lindblad_step(params, jp):
    """exp(L dt) as a dense channel."""
    generator = build_lindbladian(params, jp)
    return DenseChannel(
        matrix_exponential(generator * params.dt), params=params, jump=jp
    )


@dataclass
class CPTPReport:
    """Diagnostics of complete positivity and trace preservation."""

    trace_defect: float
    min_choi_eigenvalue: float
    hermiticity_defect: float
    choi_rank: int
    tolerance: float

    @property
    def trace_preserving(self):
        return self.trace_defect <= self.tolerance

    @property
    def completely_positive(self):
        return self.min_choi_eigenvalue >= -self.tolerance

    @property
    def ok(self):
        return (
            self.trace_preserving
            and self.completely_positive
            and self.hermiticity_defect <= self.tolerance
        )


def cptp_report(ch, tol=1e-10):
    """Trace preservation, Choi spectrum and Hermiticity of a dense channel."""
    d = ch.dimension
    s = ch.superoperator.reshape(d, d, d, d)
    partial_trace = np.einsum("aabd->bd", s)
    trace_defect = float(np.max(np.abs(partial_trace - np.eye(d))))

    choi = ch.choi()
    hermiticity = float(np.max(np.abs(choi - choi.conj().T)))
    eigenvalues = np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    rank = int(np.count_nonzero(eigenvalues > 1e-10 * scale))
    return CPTPReport(
        trace_defect, float(np.min(eigenvalues)), hermiticity, rank, tol
    )


def channel_is_cptp(ch, tol=1e-10):
    """Whether a dense channel is completely positive and trace preserving."""
    return cptp_report(ch, tol).ok


def parity_superoperator(n_sites):
    """Conjugation by prod_k sigma^z_k on row-major vectorized states."""
    parity = np.diag(kron(*([SIGMA_Z] * n_sites))).real
    return np.kron(parity, parity)


def parity_commutator_norm(ch):
    """||S P - P S||_F for the parity conjugation P."""
    diagonal = parity_superoperator(ch.n_sites)
    s = ch.to_superoperator()
    commutator = s * diagonal[None, :] - diagonal[:, None] * s
    return float(np.linalg.norm(commutator))


def commutes_with_parity(ch, tol=1e-10):
    """Whether the channel has the weak Z2 symmetry."""
    return parity_commutator_norm(ch) <= tol
