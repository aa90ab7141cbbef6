# -*- coding: utf-8 -*-

"""Random product initial states with uniformly distributed mx, and their Z2
partners.

Every sample i draws from its own generator seeded with (seed, i), so an
ensemble does not depend on the order in which workers evaluate it.
"""

from dataclasses import dataclass
import math

import numpy as np

from .mps import DenseLayerState, VectorizedLayerState
from . import util

MANIFEST_HEADER = ["sample_id", "m0x", "m0y", "m0z", "theta", "phi", "is_partner"]


def bloch_azimuth(x, y):
    """The azimuth of (x, y) in (-pi, pi].

    Unlike numpy.arctan2, a negative x with y = -0.0 gives +pi, and the origin
    gives 0.
    """
    if x > 0:
        return math.atan(y / x)
    if x < 0:
        if y >= 0:
            return math.atan(y / x) + math.pi
        return math.atan(y / x) - math.pi
    if y > 0:
        return 0.5 * math.pi
    if y < 0:
        return -0.5 * math.pi
    return 0.0


@dataclass(frozen=True)
class ProductStateSpec:
    """A single-qubit pure state repeated over the layer.

    |psi> = cos(theta/2)|1> + exp(i phi) sin(theta/2)|0>, with the Bloch
    magnetizations (m0x, m0y, m0z) = (sin theta cos phi, sin theta sin phi,
    cos theta) / 2.
    """

    theta: float
    phi: float
    m0x: float
    m0y: float
    m0z: float
    sample_id: int = 0
    is_partner: bool = False

    @classmethod
    def from_magnetizations(cls, m0x, m0y, m0z, sample_id=0, is_partner=False):
        """The spec of a point on the Bloch sphere of radius 1/2."""
        radius = m0x**2 + m0y**2 + m0z**2
        if abs(radius - 0.25) > 1e-12:
            raise ValueError(
                f"({m0x}, {m0y}, {m0z}) is not on the Bloch sphere: |m|^2 = {radius}"
            )
        theta = math.acos(max(-1.0, min(1.0, 2.0 * m0z)))
        phi = bloch_azimuth(m0x, m0y)
        return cls(theta, phi, m0x, m0y, m0z, sample_id, is_partner)

    def state_vector(self):
        """(<0|psi>, <1|psi>)."""
        return np.array(
            [
                np.exp(1j * self.phi) * math.sin(0.5 * self.theta),
                math.cos(0.5 * self.theta),
            ]
        )

    def density_matrix(self):
        psi = self.state_vector()
        return np.outer(psi, psi.conj())

    def partner(self, sample_id=None):
        """The Z2 partner, with m0x and m0y negated."""
        return ProductStateSpec.from_magnetizations(
            -self.m0x,
            -self.m0y,
            self.m0z,
            sample_id=self.sample_id if sample_id is None else sample_id,
            is_partner=not self.is_partner,
        )

    def row(self):
        return [
            self.sample_id,
            self.m0x,
            self.m0y,
            self.m0z,
            self.theta,
            self.phi,
            self.is_partner,
        ]


def sample_initial_states(n, seed):
    """`n` random product states followed by their `n` Z2 partners.

    m0x is uniform on [0, 1/2] and the remaining magnetization lies at a
    uniform angle alpha on the circle of radius R = sqrt(1/4 - m0x**2):
    m0y = R sin(alpha), m0z = R cos(alpha). Sample i has id i and its
    partner id n + i.

    Parameters
    ----------
    n : int
        The number of samples, >= 1.
    seed : int
        The non-negative base seed.

    Returns
    -------
    [ProductStateSpec]
        2n specs.
    """
    if n < 1:
        raise ValueError(f"At least one sample is needed, not {n}.")
    if seed < 0:
        raise ValueError(f"The seed must be non-negative, not {seed}.")

    samples = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        m0x = rng.uniform(0.0, 0.5)
        alpha = rng.uniform(0.0, 2.0 * math.pi)
        radius = math.sqrt(max(0.0, 0.25 - m0x**2))
        m0y = radius * math.sin(alpha)
        m0z = radius * math.cos(alpha)
        theta = math.acos(max(-1.0, min(1.0, 2.0 * m0z)))
        phi = bloch_azimuth(m0x, m0y)
        samples.append(ProductStateSpec(theta, phi, m0x, m0y, m0z, i, False))
    partners = [spec.partner(sample_id=n + spec.sample_id) for spec in samples]
    return samples + partners


def to_layer_state(spec, n_sites, dense=False):
    """The layer in which every site holds the state of `spec`.

    A bond-dimension-1 VectorizedLayerState, or a DenseLayerState when
    `dense` is true.
    """
    rho = spec.density_matrix()
    if dense:
        return DenseLayerState.product(rho, n_sites)
    return VectorizedLayerState.product(rho, n_sites)


def z2_partner(state):
    """Conjugate every site of a layer state by sigma^z."""
    return state.z2_partner()


def write_manifest(path, specs):
    """Write the ensemble as CSV: sample_id,m0x,m0y,m0z,theta,phi,is_partner."""
    util.write_csv(path, MANIFEST_HEADER, (spec.row() for spec in specs))
