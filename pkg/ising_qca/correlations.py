# -*- coding: utf-8 -*-

"""The nearest-neighbour correlation closure.

A single bond <a, b> is treated exactly and its q - 1 other neighbours in mean
field. The state is the three magnetizations m^mu plus the nine two-point
moments m^{mu nu} = <sigma^mu_a sigma^nu_b> / 4, stored in the order

    [mx, my, mz, xx, xy, xz, yx, yy, yz, zx, zy, zz].
"""

from dataclasses import dataclass
import functools
import logging

import numpy as np

from .exceptions import ConvergenceError
from . import integrator
from .meanfield import (
    MagnetizationVector,
    MagnetizationTrajectory,
    PhaseDiagramGrid,
    _grid_points,
    relax_points,
    seed_state,
    sweep,
)

logger = logging.getLogger(__name__)

N_MOMENTS = 12
# Components that change sign under the Z2 conjugation.
Z2_ODD = (0, 1, 5, 9, 8, 10)
Z2_SIGNS = np.array([-1.0 if i in Z2_ODD else 1.0 for i in range(N_MOMENTS)])


@dataclass(frozen=True)
class CorrelatedMoments:
    """Magnetizations and the 3x3 matrix c[mu, nu] = m^{mu nu}."""

    m: MagnetizationVector
    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (3, 3):
            raise ValueError(f"The two-point moments must be 3x3, not {c.shape}.")
        object.__setattr__(self, "c", c)

    @classmethod
    def from_array(cls, values):
        values = np.asarray(values, dtype=float)
        return cls(MagnetizationVector.from_array(values[:3]), values[3:].reshape(3, 3))

    @classmethod
    def product(cls, m):
        """The uncorrelated state c = m^mu m^nu."""
        return cls(m, np.outer(m.as_array(), m.as_array()))

    @classmethod
    def all_down(cls):
        """The vacuum: mz = -1/2, m^{zz} = 1/4, everything else 0."""
        return cls.product(MagnetizationVector(0.0, 0.0, -0.5))

    def as_array(self):
        return np.concatenate([self.m.as_array(), self.c.ravel()])

    def z2_partner(self):
        return CorrelatedMoments.from_array(Z2_SIGNS * self.as_array())

    def within_bounds(self, tol=1e-12):
        """|m^mu| <= 1/2 and |m^{mu nu}| <= 1/4, within `tol`."""
        return bool(
            np.all(np.abs(self.m.as_array()) <= 0.5 + tol)
            and np.all(np.abs(self.c) <= 0.25 + tol)
        )


def product_moments(m):
    """Twelve-component array of the product state for magnetizations `m`.

    `m` may be (3,) or (3, batch).
    """
    m = np.asarray(m, dtype=float)
    c = m[:, None] * m[None, :]
    return np.concatenate([m, c.reshape((9,) + m.shape[1:])])


def _corr_rhs_array(y, omega, v, kappa, q):
    mx, my, mz = y[0], y[1], y[2]
    xx, xy, xz, yx, yy, yz, zx, zy, zz = y[3:12]
    vq = v * (q - 1)
    quarter_v = 0.25 * v
    return np.stack(
        [
            -omega * my - 0.5 * kappa * mx,
            omega * mx + vq * mx * mz + v * zx - 0.5 * kappa * my,
            -vq * mx * my - v * yx - kappa * (0.5 + mz),
            -omega * (yx + xy) - 2.0 * kappa * xx,
            -omega * (yy - xx) + vq * mx * zx + quarter_v * mz - 2.0 * kappa * xy,
            -omega * yz
            - vq * mx * xy
            - quarter_v * my
            - 2.0 * kappa * xz
            - 0.5 * kappa * mx,
            omega * (xx - yy) + vq * mx * zx + quarter_v * mz - 2.0 * kappa * yx,
            omega * (xy + yx) + vq * mx * (yz + zy) - 2.0 * kappa * yy,
            omega * xz - vq * mx * (yy - zz) - 2.0 * kappa * yz - 0.5 * kappa * my,
            -omega * zy
            - vq * mx * yx
            - quarter_v * my
            - 2.0 * kappa * zx
            - 0.5 * kappa * mx,
            omega * zx + vq * mx * (zz - yy) - 2.0 * kappa * zy - 0.5 * kappa * my,
            -vq * mx * (zy + yz) - kappa * (mz + 2.0 * zz),
        ]
    )


def corr_rhs(s, params, q=2):
    """The time derivative of the twelve moments.

    Parameters
    ----------
    s : CorrelatedMoments or array_like
        The moments, or an array (12,) or (12, batch).
    params : ModelParams
        Omega, V and kappa are used.
    q : int
        The coordination number, >= 2.

    Returns
    -------
    CorrelatedMoments or numpy.ndarray
        The derivative, of the same kind as `s`.
    """
    if q < 2:
        raise ValueError(f"The correlation closure needs q >= 2, not {q}.")
    if isinstance(s, CorrelatedMoments):
        values = _corr_rhs_array(s.as_array(), params.omega, params.v, params.kappa, q)
        return CorrelatedMoments.from_array(values)
    y = np.asarray(s, dtype=float)
    return _corr_rhs_array(y, params.omega, params.v, params.kappa, q)


@dataclass
class MomentTrajectory(MagnetizationTrajectory):
    def __getitem__(self, index):
        return CorrelatedMoments.from_array(self.states[index])

    def magnetization(self, index):
        return MagnetizationVector.from_array(self.states[index, :3])


def corr_integrate(s0, params, q=2, t_final=50.0, dt_ode=integrator.DEFAULT_DT):
    """Integrate the closure with fixed-step RK4.

    A MagnetizationVector as `s0` starts from the product moments.
    """
    if q < 2:
        raise ValueError(f"The correlation closure needs q >= 2, not {q}.")
    if isinstance(s0, MagnetizationVector):
        s0 = CorrelatedMoments.product(s0)
    y0 = s0.as_array() if isinstance(s0, CorrelatedMoments) else s0
    times, states = integrator.integrate_fixed_step(
        _corr_rhs_array,
        y0,
        t_final,
        dt=dt_ode,
        coefficients=(params.omega, params.v, params.kappa, q),
    )
    return MomentTrajectory(times, states)


def corr_stationary_order_parameter(
    params,
    q=2,
    seed_sign=1,
    dt_ode=integrator.DEFAULT_DT,
    t_max=integrator.DEFAULT_T_MAX,
    tolerance=integrator.DEFAULT_TOLERANCE,
):
    """|mx| at the fixed point of the closure reached from the broken seed.

    Raises
    ------
    ConvergenceError
        If the moments are still moving at `t_max`.
    """
    values, converged = relax_points(
        _corr_rhs_array,
        product_moments(seed_state(seed_sign)),
        params.omega,
        params.v,
        params.kappa,
        q,
        dt_ode,
        t_max,
        tolerance,
    )
    value = float(values[0])
    if not converged[0]:
        raise ConvergenceError(
            f"The correlation closure at Omega={params.omega}, V={params.v} did not "
            f"converge by t={t_max}: |mx|={value:.6g}",
            value=value,
            time=t_max,
        )
    return value


def _corr_chunk(chunk, kappa, q, dt_ode, t_max, tolerance):
    omega, v = chunk
    return relax_points(
        _corr_rhs_array,
        product_moments(seed_state(1, omega.size)),
        omega,
        v,
        kappa,
        q,
        dt_ode,
        t_max,
        tolerance,
    )


def corr_scan_points(
    omega,
    v,
    q=2,
    kappa=1.0,
    dt_ode=integrator.DEFAULT_DT,
    t_max=integrator.DEFAULT_T_MAX,
    tolerance=integrator.DEFAULT_TOLERANCE,
    workers=None,
):
    """Stationary |mx| of the closure at each of the paired (omega[i], v[i])."""
    if q < 2:
        raise ValueError(f"The correlation closure needs q >= 2, not {q}.")
    chunk_function = functools.partial(
        _corr_chunk, kappa=kappa, q=q, dt_ode=dt_ode, t_max=t_max, tolerance=tolerance
    )
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    return sweep(chunk_function, omega, v, workers)


def corr_phase_diagram(
    omega_range,
    v_range,
    grid_size,
    q=2,
    kappa=1.0,
    dt_ode=integrator.DEFAULT_DT,
    t_max=integrator.DEFAULT_T_MAX,
    tolerance=integrator.DEFAULT_TOLERANCE,
    workers=None,
):
    """The stationary |mx| of the closure on a regular (Omega, V) grid.

    See `meanfield.phase_diagram` for the parameters.
    """
    if q < 2:
        raise ValueError(f"The correlation closure needs q >= 2, not {q}.")
    omegas, vs, flat_omega, flat_v = _grid_points(omega_range, v_range, grid_size)
    abs_mx, converged = corr_scan_points(
        flat_omega, flat_v, q, kappa, dt_ode, t_max, tolerance, workers
    )
    grid = PhaseDiagramGrid(
        omegas,
        vs,
        abs_mx.reshape(omegas.size, vs.size),
        converged.reshape(omegas.size, vs.size),
        closure="nn",
        q=q,
        metadata={"kappa": kappa, "dt_ode": dt_ode, "t_max": t_max},
    )
    if grid.n_unconverged > 0:
        logger.warning(
            f"{grid.n_unconverged} of {abs_mx.size} correlation-closure points did "
            f"not converge by t={t_max}."
        )
    return grid
