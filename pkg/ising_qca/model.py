# -*- coding: utf-8 -*-

"""Physical parameters, operators and the local gates of the Ising QCA.

A gate G_k acts on old-layer sites k and k+1 and on the fresh new-layer site
k. Gates are applied in ascending k. The last site of a layer has a two-leg
gate on (old N-1, new N-1) since it has no right neighbour; the field of that
site is folded into the gate of the last bond.
"""

from dataclasses import dataclass
import math

import numpy as np

from .tensor_core import (
    IDENTITY,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    kron,
    matrix_exponential,
    swap_operator,
)


@dataclass(frozen=True)
class ModelParams:
    """Couplings, time step and lattice size of the QCA.

    Attributes
    ----------
    omega : float
        The transverse field, in units of kappa.
    v : float
        The nearest-neighbour interaction, in units of kappa.
    kappa : float
        The decay rate; 1 sets the unit system.
    dt : float
        The time step delta t of one layer.
    n_sites : int
        The width N of a layer.
    depth : int
        The number of layers L.
    """

    omega: float = 3.0
    v: float = 15.0
    kappa: float = 1.0
    dt: float = 0.1
    n_sites: int = 10
    depth: int = 10

    def __post_init__(self):
        for name in ("omega", "v", "kappa", "dt"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, not {getattr(self, name)}.")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, not {self.kappa}.")
        if self.dt <= 0:
            raise ValueError(f"The time step dt must be positive, not {self.dt}.")
        if self.n_sites < 1:
            raise ValueError(f"A layer needs at least one site, not {self.n_sites}.")
        if self.depth < 0:
            raise ValueError(f"The depth cannot be negative: {self.depth}.")

    def replace(self, **changes):
        """A copy with some fields changed."""
        values = {**self.__dict__, **changes}
        return ModelParams(**values)


@dataclass(frozen=True)
class JumpParams:
    """The trainable parameters of J(a, b) = sqrt(kappa) (a sigma^x + i b sigma^y)."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"Jump parameters must be finite: ({self.a}, {self.b}).")

    def __iter__(self):
        yield self.a
        yield self.b

    def shifted(self, da=0.0, db=0.0):
        return JumpParams(self.a + da, self.b + db)


@dataclass(frozen=True)
class LocalGate:
    """A local gate and the site it is applied at.

    `matrix` is 8x8 on (old k, old k+1, new k) for the bond gates, or 4x4 on
    (old k, new k) for the boundary gate of the last site.
    """

    matrix: np.ndarray
    site: int

    @property
    def n_legs(self):
        return int(round(math.log2(self.matrix.shape[0])))

    def unitarity_defect(self):
        """max |G G^dagger - 1|."""
        product = self.matrix @ self.matrix.conj().T
        return float(np.max(np.abs(product - np.eye(product.shape[0]))))

    def is_unitary(self, tol=1e-12):
        return self.unitarity_defect() < tol


def _check_site(params, k):
    if not 0 <= k < params.n_sites:
        raise IndexError(f"Site {k} is not in a layer of {params.n_sites} sites.")


def build_local_hamiltonian(params, k):
    """The local Hamiltonian H_k of gate k.

    For a bond 0 <= k <= N-2 this is the 4x4 operator on old sites (k, k+1)

        H_k = (Omega/2) sigma^z_k - (V/4) sigma^x_k sigma^x_{k+1},

    with the field of site N-1 added to the last bond. For k = N-1 the result
    is the 2x2 single-site remainder, which is nonzero only for N = 1.

    Parameters
    ----------
    params : ModelParams
        The model.
    k : int
        The 0-based site index.

    Returns
    -------
    numpy.ndarray
        The Hermitian local Hamiltonian.
    """
    _check_site(params, k)
    n = params.n_sites
    field = 0.5 * params.omega

    if k == n - 1:
        if n == 1:
            return field * SIGMA_Z.copy()
        return np.zeros((2, 2), dtype=complex)

    hamiltonian = field * kron(SIGMA_Z, IDENTITY) - 0.25 * params.v * kron(
        SIGMA_X, SIGMA_X
    )
    if k == n - 2:
        hamiltonian = hamiltonian + field * kron(IDENTITY, SIGMA_Z)
    return hamiltonian


def build_jump_operator(jp, kappa=1.0):
    """J(a, b) = sqrt(kappa) (a sigma^x + i b sigma^y).

    (a, b) = (1/2, -1/2) gives sqrt(kappa) sigma^-, pure decay to the vacuum.
    """
    return math.sqrt(kappa) * (jp.a * SIGMA_X + 1j * jp.b * SIGMA_Y)


def build_local_gate(params, jp, k):
    """G_k = SWAP_k exp(-i sqrt(dt) (J_k s^+ + h.c.)) exp(-i dt H_k).

    Parameters
    ----------
    params : ModelParams
        The model.
    jp : JumpParams
        The jump-operator parameters.
    k : int
        The 0-based site index.

    Returns
    -------
    LocalGate
        The gate. Its leg 0 is old site k and its last leg new site k.
    """
    _check_site(params, k)
    hamiltonian = build_local_hamiltonian(params, k)
    jump = build_jump_operator(jp, params.kappa)

    if hamiltonian.shape[0] == 4:
        n_legs = 3
        jump_term = kron(jump, IDENTITY, SIGMA_PLUS)
    else:
        n_legs = 2
        jump_term = kron(jump, SIGMA_PLUS)
    coupling = jump_term + jump_term.conj().T

    coherent = matrix_exponential(-1j * params.dt * kron(hamiltonian, IDENTITY))
    collision = matrix_exponential(-1j * math.sqrt(params.dt) * coupling)
    swap = swap_operator(n_legs, 0, n_legs - 1)

    return LocalGate(swap @ collision @ coherent, k)


def build_gate_sequence(params, jp):
    """All gates of one layer step, in the order they are applied."""
    return [build_local_gate(params, jp, k) for k in range(params.n_sites)]


def parity_conjugate(matrix):
    """Conjugate an operator on qubit legs by sigma^z on every leg."""
    n_legs = int(round(math.log2(matrix.shape[0])))
    parity = np.diag(kron(*([SIGMA_Z] * n_legs)))
    return parity[:, None] * matrix * parity[None, :]
