# -*- coding: utf-8 -*-

"""Exceptions raised by the QCA simulator.

Each class carries the exit code the command-line interface returns when the
exception escapes a command.
"""


class IsingQCAError(Exception):
    """Base class for all errors raised by ising_qca."""

    exit_code = 1


class ConfigurationError(IsingQCAError, ValueError):
    """A run configuration or command-line value is invalid."""

    exit_code = 2


class NumericalError(IsingQCAError, RuntimeError):
    """A numerical engine failed."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """An ODE relaxation did not reach its fixed point within the time limit.

    Parameters
    ----------
    message : str
        The description of the failure.
    value : float
        The order parameter |mx| when the integration stopped.
    time : float
        The time reached.
    """

    def __init__(self, message, value=None, time=None):
        super().__init__(message)
        self.value = value
        self.time = time


class DivergenceError(NumericalError):
    """An integration produced non-finite values, or training diverged."""


class TruncationError(NumericalError):
    """A singular value decomposition failed or a bond dimension overflowed."""


class ValidationError(IsingQCAError, AssertionError):
    """A self-consistency check of the engines failed."""

    exit_code = 4


class GateValidationError(ValidationError):
    exit_code = 5


class ChannelValidationError(ValidationError):
    exit_code = 6


class SymmetryValidationError(ValidationError):
    exit_code = 7


class LindbladValidationError(ValidationError):
    exit_code = 8


class EquivalenceValidationError(ValidationError):
    exit_code = 9
