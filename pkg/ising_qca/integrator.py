# -*- coding: utf-8 -*-

"""Fixed-step RK4 integration shared by the mean-field and correlation closures.

States are stored components first, with shape (d,) for a single point or
(d, batch) for many grid points integrated together. A right-hand side is a
function ``rhs(y, *coefficients)`` where every coefficient is either a scalar
or an array broadcastable against the batch axis.
"""

from dataclasses import dataclass
import logging

import numpy as np

from .exceptions import DivergenceError

logger = logging.getLogger(__name__)

DEFAULT_DT = 1.0e-3
DEFAULT_T_MAX = 200.0
DEFAULT_TOLERANCE = 1.0e-10
CHECK_EVERY = 10


@dataclass
class RelaxationResult:
    """The end point of a relaxation towards a fixed point.

    Attributes
    ----------
    state : numpy.ndarray
        The final state, (d, batch).
    converged : numpy.ndarray
        Whether ||dy/dt|| fell below the tolerance, per batch point.
    time : numpy.ndarray
        The time at which each point stopped.
    residual : numpy.ndarray
        ||dy/dt|| at the final state.
    """

    state: np.ndarray
    converged: np.ndarray
    time: np.ndarray
    residual: np.ndarray


def rk4_step(rhs, y, dt, coefficients=()):
    """One classical fourth-order Runge-Kutta step."""
    k1 = rhs(y, *coefficients)
    k2 = rhs(y + 0.5 * dt * k1, *coefficients)
    k3 = rhs(y + 0.5 * dt * k2, *coefficients)
    k4 = rhs(y + dt * k3, *coefficients)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_fixed_step(rhs, y0, t_final, dt=DEFAULT_DT, coefficients=()):
    """Integrate from t=0 to `t_final`, recording every step.

    Parameters
    ----------
    rhs : callable
        The right-hand side ``rhs(y, *coefficients)``.
    y0 : array_like
        The initial state.
    t_final : float
        The final time. The last step is shortened to land on it exactly.
    dt : float
        The step size.
    coefficients : tuple
        Extra arguments of the right-hand side.

    Returns
    -------
    times : numpy.ndarray
        The sample times, starting at 0.
    states : numpy.ndarray
        The states at those times, shape (n_times,) + y0.shape.
    """
    if dt <= 0:
        raise ValueError(f"The ODE step dt must be positive, not {dt}.")
    if t_final < 0:
        raise ValueError(f"The final time cannot be negative: {t_final}.")

    y = np.array(y0, dtype=float)
    n_full = int(np.floor(t_final / dt + 1e-9))
    remainder = t_final - n_full * dt
    steps = [dt] * n_full
    if remainder > 1e-12 * max(1.0, t_final):
        steps.append(remainder)

    times = np.empty(len(steps) + 1)
    states = np.empty((len(steps) + 1,) + y.shape)
    times[0] = 0.0
    states[0] = y
    t = 0.0
    for i, h in enumerate(steps, start=1):
        y = rk4_step(rhs, y, h, coefficients)
        t += h
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"The integration became non-finite at t={t:.6g}.")
        times[i] = t
        states[i] = y
    return times, states


def _subset(coefficient, index):
    if np.ndim(coefficient) == 0:
        return coefficient
    return np.asarray(coefficient)[..., index]


def relax(
    rhs,
    y0,
    coefficients=(),
    dt=DEFAULT_DT,
    t_max=DEFAULT_T_MAX,
    tolerance=DEFAULT_TOLERANCE,
):
    """Integrate a batch of points until each one stops moving.

    Every `CHECK_EVERY` steps the norm of dy/dt is evaluated per point; points
    below `tolerance` are frozen and dropped from the active set so the rest
    integrate faster.

    Parameters
    ----------
    rhs : callable
        The right-hand side ``rhs(y, *coefficients)``.
    y0 : array_like
        The initial states, (d,) or (d, batch).
    coefficients : tuple
        Scalars or arrays of shape (batch,).
    dt : float
        The RK4 step.
    t_max : float
        Points still moving at this time are reported as not converged.
    tolerance : float
        The threshold on ||dy/dt||.

    Returns
    -------
    RelaxationResult
        Always batched, (d, batch), even for a single point.
    """
    if dt <= 0:
        raise ValueError(f"The ODE step dt must be positive, not {dt}.")

    y = np.array(y0, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    coefficients = tuple(
        c if np.ndim(c) == 0 else np.broadcast_to(c, y.shape[1:]).copy()
        for c in coefficients
    )

    n_points = y.shape[1]
    final = y.copy()
    converged = np.zeros(n_points, dtype=bool)
    stopped_at = np.full(n_points, t_max)
    residual = np.full(n_points, np.inf)

    active = np.arange(n_points)
    current = coefficients
    t = 0.0
    step = 0
    while active.size > 0:
        if step % CHECK_EVERY == 0:
            derivative = rhs(y, *current)
            norm = np.sqrt(np.sum(derivative**2, axis=0))
            if not np.all(np.isfinite(norm)):
                raise DivergenceError(
                    f"The relaxation became non-finite at t={t:.6g}."
                )
            done = norm < tolerance
            if t >= t_max:
                done = np.ones_like(done)
            if np.any(done):
                index = active[done]
                final[:, index] = y[:, done]
                residual[index] = norm[done]
                converged[index] = norm[done] < tolerance
                stopped_at[index] = t
                keep = ~done
                y = y[:, keep]
                active = active[keep]
                current = tuple(_subset(c, keep) for c in current)
                if active.size == 0:
                    break
        y = rk4_step(rhs, y, dt, current)
        t += dt
        step += 1

    n_failed = int(np.count_nonzero(~converged))
    if n_failed > 0:
        logger.debug(f"{n_failed} of {n_points} points did not relax by t={t_max}.")
    else:
        logger.debug(f"All {n_points} points relaxed by t={np.max(stopped_at):.4g}.")
    return RelaxationResult(final, converged, stopped_at, residual)
