# -*- coding: utf-8 -*-

"""
ising_qca
Dissipative Ising quantum cellular automata: mean-field and correlation
closures, matrix-product-state evolution of the layer channel, and training
of the jump operator.
"""

# Bring up the main classes so that they appear to be directly in
# the ising_qca package.

from ising_qca.channel import DenseChannel, MPOChannel, Trajectory  # noqa: F401
from ising_qca.configuration import Configuration, RunConfig  # noqa: F401
from ising_qca.correlations import CorrelatedMoments  # noqa: F401
from ising_qca.exceptions import IsingQCAError  # noqa: F401
from ising_qca.meanfield import MagnetizationVector, PhaseDiagramGrid  # noqa: F401
from ising_qca.model import JumpParams, LocalGate, ModelParams  # noqa: F401
from ising_qca.mps import DenseLayerState, VectorizedLayerState  # noqa: F401
from ising_qca.sampling import ProductStateSpec  # noqa: F401
from ising_qca.training import TrainingPair, TrainingRun  # noqa: F401
from .util import code_version

__author__ = """The ising-qca developers"""
__version__ = code_version()
del code_version
