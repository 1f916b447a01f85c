"""Exception types raised by the solvers and observables."""


class WaveguideError(Exception):
    """Base class for all errors raised by this package."""


class SingularSystem(WaveguideError):
    """The evolution matrix has an undamped subspace and cannot be inverted."""


class UndefinedCoefficient(WaveguideError):
    """A quantity divides by a vanishing Rabi frequency or decay rate."""


class UnsupportedTopology(WaveguideError):
    """The requested observable does not exist for this emitter type."""


class UndefinedPhase(WaveguideError):
    """The transmission amplitude is exactly zero, so its phase is undefined."""


class DivisionByZero(WaveguideError, ZeroDivisionError):
    """Raised by closed forms that divide by a vanishing transmission."""


class GridTooNarrow(WaveguideError):
    """The sampled response has not decayed at the ends of the grid."""


class NonPositiveAmplitude(WaveguideError):
    """A transmission magnitude at or below the floor was passed without permission to clamp."""


class ScenarioError(WaveguideError):
    """A run configuration is malformed or asks for something impossible."""
