"""Steady-state optics of a driven three-level emitter coupled to a waveguide."""
from .errors import (
    DivisionByZero,
    GridTooNarrow,
    NonPositiveAmplitude,
    ScenarioError,
    SingularSystem,
    UndefinedCoefficient,
    UndefinedPhase,
    UnsupportedTopology,
    WaveguideError,
)
from .model import DriveSet, EmitterSystem, RateSet, Topology, build_system, classical_drive_system, initial_state
from .dynamics import StateVector, correlators, evolve, steady_state, trajectory

__version__ = "0.1.0"
