# -*- coding: utf-8 -*-

"""Mean-field dynamics of the dissipative Ising chain and its phase diagram.

The three magnetizations obey

    dmx/dt = -Omega my - kappa/2 mx
    dmy/dt = Omega mx + V q mx mz - kappa/2 my
    dmz/dt = -V q mx my - kappa (mz + 1/2)

with q the coordination number (2 in one dimension). The paramagnetic point
(0, 0, -1/2) is always stationary, so order parameters are obtained by
relaxing from a symmetry-broken seed.
"""

from dataclasses import dataclass, field
import functools
import logging
import math

import numpy as np

from .exceptions import ConvergenceError
from . import integrator
from . import util

logger = logging.getLogger(__name__)

SEED_MX = 0.1
SEED_MZ = -0.4
# |mx| below this at a converged point is the paramagnet.
ZERO_SNAP = 1.0e-8


@dataclass(frozen=True)
class MagnetizationVector:
    """The single-site magnetizations (mx, my, mz), each in [-1/2, 1/2]."""

    mx: float
    my: float
    mz: float

    @classmethod
    def from_array(cls, values):
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def as_array(self):
        return np.array([self.mx, self.my, self.mz])

    def bloch_norm_squared(self):
        return self.mx**2 + self.my**2 + self.mz**2

    def in_bloch_ball(self, tol=1e-12):
        """mx**2 + my**2 + mz**2 <= 1/4 within `tol`."""
        return self.bloch_norm_squared() <= 0.25 + tol

    def z2_partner(self):
        return MagnetizationVector(-self.mx, -self.my, self.mz)


@dataclass
class PhaseDiagramGrid:
    """The stationary order parameter |mx| on an (Omega, V) grid.

    Attributes
    ----------
    omega : numpy.ndarray
        The Omega axis.
    v : numpy.ndarray
        The V axis.
    abs_mx : numpy.ndarray
        |mx| at the end of the relaxation, shape (len(omega), len(v)).
    converged : numpy.ndarray
        Whether each point reached the convergence threshold.
    closure : str
        "mf" for mean field, "nn" for the nearest-neighbour closure.
    q : int
        The coordination number.
    """

    omega: np.ndarray
    v: np.ndarray
    abs_mx: np.ndarray
    converged: np.ndarray = None
    closure: str = "mf"
    q: int = 2
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.abs_mx = np.asarray(self.abs_mx, dtype=float)
        expected = (self.omega.size, self.v.size)
        if self.abs_mx.shape != expected:
            raise ValueError(
                f"The order parameter has shape {self.abs_mx.shape}, but the axes "
                f"need {expected}."
            )
        if np.any(self.abs_mx < 0):
            raise ValueError("The order parameter |mx| cannot be negative.")
        if self.converged is None:
            self.converged = np.ones(expected, dtype=bool)
        else:
            self.converged = np.asarray(self.converged, dtype=bool)

    @property
    def n_unconverged(self):
        return int(np.count_nonzero(~self.converged))

    def ferromagnetic(self, threshold=1.0e-2):
        """Mask of the points whose order parameter exceeds `threshold`."""
        return self.abs_mx > threshold

    def rows(self):
        """(omega, v, |mx|) per point, Omega varying slowest."""
        for i, omega in enumerate(self.omega):
            for j, v in enumerate(self.v):
                yield float(omega), float(v), float(self.abs_mx[i, j])

    def write_csv(self, path):
        """Write the grid as CSV, with a sibling metadata JSON file."""
        if self.closure == "mf":
            header = ["omega", "v", "abs_mx"]
            rows = self.rows()
        else:
            header = ["omega", "v", "abs_mx", "closure"]
            rows = (row + (self.closure,) for row in self.rows())
        util.write_csv(path, header, rows)

        unconverged = [
            [float(self.omega[i]), float(self.v[j])]
            for i, j in zip(*np.nonzero(~self.converged))
        ]
        util.write_metadata(
            path,
            {
                "closure": self.closure,
                "q": self.q,
                "shape": list(self.abs_mx.shape),
                "n_unconverged": self.n_unconverged,
                "unconverged_points": unconverged,
                **self.metadata,
            },
        )


def _mf_rhs_array(y, omega, v, kappa, q):
    mx, my, mz = y[0], y[1], y[2]
    vq = v * q
    return np.stack(
        [
            -omega * my - 0.5 * kappa * mx,
            omega * mx + vq * mx * mz - 0.5 * kappa * my,
            -vq * mx * my - kappa * (mz + 0.5),
        ]
    )


def mf_rhs(m, params, q=2):
    """The time derivative of the magnetizations.

    Parameters
    ----------
    m : MagnetizationVector or array_like
        The magnetizations, or an array (3,) or (3, batch).
    params : ModelParams
        Omega, V and kappa are used.
    q : int
        The coordination number, >= 1.

    Returns
    -------
    MagnetizationVector or numpy.ndarray
        The derivative, of the same kind as `m`.
    """
    if q < 1:
        raise ValueError(f"The coordination number must be >= 1, not {q}.")
    if isinstance(m, MagnetizationVector):
        values = _mf_rhs_array(m.as_array(), params.omega, params.v, params.kappa, q)
        return MagnetizationVector.from_array(values)
    y = np.asarray(m, dtype=float)
    return _mf_rhs_array(y, params.omega, params.v, params.kappa, q)


@dataclass
class MagnetizationTrajectory:
    """Magnetizations sampled at fixed times."""

    times: np.ndarray
    states: np.ndarray

    def __len__(self):
        return self.times.size

    def __getitem__(self, index):
        return MagnetizationVector.from_array(self.states[index])

    @property
    def final(self):
        return self[-1]


def integrate(m0, params, q=2, t_final=50.0, dt_ode=integrator.DEFAULT_DT):
    """Integrate the mean-field equations with fixed-step RK4.

    Returns
    -------
    MagnetizationTrajectory
        The state at every step, starting with `m0`.
    """
    if q < 1:
        raise ValueError(f"The coordination number must be >= 1, not {q}.")
    y0 = m0.as_array() if isinstance(m0, MagnetizationVector) else m0
    times, states = integrator.integrate_fixed_step(
        _mf_rhs_array,
        y0,
        t_final,
        dt=dt_ode,
        coefficients=(params.omega, params.v, params.kappa, q),
    )
    return MagnetizationTrajectory(times, states)


def seed_state(seed_sign=1, batch=None):
    """The symmetry-broken starting point (sign 0.1, 0, -0.4)."""
    sign = 1.0 if seed_sign >= 0 else -1.0
    seed = np.array([sign * SEED_MX, 0.0, SEED_MZ])
    if batch is None:
        return seed
    return np.repeat(seed[:, None], batch, axis=1)


def _order_parameter(result):
    values = np.abs(result.state[0])
    values[result.converged & (values < ZERO_SNAP)] = 0.0
    return values


def stationary_order_parameter(
    params,
    q=2,
    seed_sign=1,
    dt_ode=integrator.DEFAULT_DT,
    t_max=integrator.DEFAULT_T_MAX,
    tolerance=integrator.DEFAULT_TOLERANCE,
):
    """|mx| at the fixed point reached from the symmetry-broken seed.

    Raises
    ------
    ConvergenceError
        If ||dm/dt|| is still above `tolerance` at `t_max`. The exception
        carries |mx| and the time at which the integration stopped.
    """
    result = integrator.relax(
        _mf_rhs_array,
        seed_state(seed_sign),
        coefficients=(params.omega, params.v, params.kappa, q),
        dt=dt_ode,
        t_max=t_max,
        tolerance=tolerance,
    )
    value = float(_order_parameter(result)[0])
    if not result.converged[0]:
        raise ConvergenceError(
            f"Mean field at Omega={params.omega}, V={params.v} did not converge by "
            f"t={t_max}: |mx|={value:.6g}, ||dm/dt||={result.residual[0]:.3g}",
            value=value,
            time=float(result.time[0]),
        )
    return value


def relax_points(rhs, initial, omega, v, kappa, q, dt_ode, t_max, tolerance):
    """Relax a batch of (Omega, V) points; returns (|mx|, converged)."""
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    result = integrator.relax(
        rhs,
        initial,
        coefficients=(omega, v, kappa, q),
        dt=dt_ode,
        t_max=t_max,
        tolerance=tolerance,
    )
    return _order_parameter(result), result.converged


def _mf_chunk(chunk, kappa, q, dt_ode, t_max, tolerance):
    omega, v = chunk
    return relax_points(
        _mf_rhs_array,
        seed_state(1, omega.size),
        omega,
        v,
        kappa,
        q,
        dt_ode,
        t_max,
        tolerance,
    )


def sweep(chunk_function, omega, v, workers=None):
    """Evaluate flat arrays of (Omega, V) points, split statically over workers."""
    n_workers = util.worker_count(workers)
    chunks = util.split_evenly(len(omega), n_workers)
    results = util.parallel_map(
        chunk_function,
        [(omega[s], v[s]) for s in chunks],
        workers=n_workers,
    )
    abs_mx = np.empty(len(omega))
    converged = np.empty(len(omega), dtype=bool)
    for s, (values, flags) in zip(chunks, results):
        abs_mx[s] = values
        converged[s] = flags
    return abs_mx, converged


def scan_points(
    omega,
    v,
    q=2,
    kappa=1.0,
    dt_ode=integrator.DEFAULT_DT,
    t_max=integrator.DEFAULT_T_MAX,
    tolerance=integrator.DEFAULT_TOLERANCE,
    workers=None,
):
    """Stationary mean-field |mx| at each of the paired (omega[i], v[i]).

    Returns
    -------
    abs_mx, converged : numpy.ndarray
        The order parameter and the convergence flag per point.
    """
    chunk_function = functools.partial(
        _mf_chunk, kappa=kappa, q=q, dt_ode=dt_ode, t_max=t_max, tolerance=tolerance
    )
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    return sweep(chunk_function, omega, v, workers)


def axis(value_range, points):
    """Evenly spaced axis values including both ends."""
    if points < 2:
        raise ValueError(f"A phase-diagram axis needs >= 2 points, not {points}.")
    low, high = value_range
    return np.linspace(low, high, points)


def _grid_points(omega_range, v_range, grid_size):
    if np.ndim(grid_size) == 0:
        grid_size = (grid_size, grid_size)
    omegas = axis(omega_range, grid_size[0])
    vs = axis(v_range, grid_size[1])
    mesh_omega, mesh_v = np.meshgrid(omegas, vs, indexing="ij")
    return omegas, vs, mesh_omega.ravel(), mesh_v.ravel()


def phase_diagram(
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
    """The stationary mean-field |mx| on a regular (Omega, V) grid.

    Parameters
    ----------
    omega_range, v_range : (float, float)
        The ends of the axes, inclusive.
    grid_size : int or (int, int)
        Points per axis, >= 2.
    q : int
        The coordination number.
    kappa : float
        The decay rate.
    workers : int or None
        Parallel processes; see `util.worker_count`.

    Returns
    -------
    PhaseDiagramGrid
        The order parameter and a convergence mask. Points that did not relax
        keep their last |mx| and are logged.
    """
    if q < 1:
        raise ValueError(f"The coordination number must be >= 1, not {q}.")
    omegas, vs, flat_omega, flat_v = _grid_points(omega_range, v_range, grid_size)
    abs_mx, converged = scan_points(
        flat_omega, flat_v, q, kappa, dt_ode, t_max, tolerance, workers
    )
    grid = PhaseDiagramGrid(
        omegas,
        vs,
        abs_mx.reshape(omegas.size, vs.size),
        converged.reshape(omegas.size, vs.size),
        closure="mf",
        q=q,
        metadata={"kappa": kappa, "dt_ode": dt_ode, "t_max": t_max},
    )
    if grid.n_unconverged > 0:
        logger.warning(
            f"{grid.n_unconverged} of {abs_mx.size} mean-field points did not "
            f"converge by t={t_max}."
        )
    return grid


def critical_interaction(omega, kappa=1.0, q=2):
    """V_c = (4 Omega**2 + kappa**2) / (2 Omega q), the onset of ferromagnetism."""
    if omega == 0:
        return math.inf
    return (4.0 * omega**2 + kappa**2) / (2.0 * omega * q)


def analytic_fixed_point(params, q=2):
    """The symmetry-broken fixed point with mx > 0, or None in the paramagnet.

    mz* = -(4 Omega**2 + kappa**2) / (4 Omega V q),
    mx*^2 = 2 Omega (mz* + 1/2) / (V q),
    my* = -kappa mx* / (2 Omega).
    The partner branch is `analytic_fixed_point(...).z2_partner()`.
    """
    omega, v, kappa = params.omega, params.v, params.kappa
    if omega == 0 or v == 0:
        return None
    vq = v * q
    mz = -(4.0 * omega**2 + kappa**2) / (4.0 * omega * vq)
    if not -0.5 < mz <= 0.5:
        return None
    mx_squared = 2.0 * omega * (mz + 0.5) / vq
    if mx_squared <= 0:
        return None
    mx = math.sqrt(mx_squared)
    return MagnetizationVector(mx, -kappa * mx / (2.0 * omega), mz)
