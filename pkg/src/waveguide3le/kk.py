"""Kramers-Kronig transforms between log-amplitude and phase on a uniform grid."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooNarrow, NonPositiveAmplitude
from .kerr import ResponseCurve
from .model import RateSet

__all__ = [
    "AMPLITUDE_FLOOR",
    "KKGrid",
    "principal_value_transform",
    "kk_phase_from_amplitude",
    "kk_amplitude_from_phase",
]

AMPLITUDE_FLOOR = 1e-12
MIN_POINTS = 4001
MIN_WIDTH_FACTOR = 200.0
DECAY_RTOL = 1e-3


@dataclass(frozen=True, eq=False)
class KKGrid:
    """Uniform, symmetric probe-detuning grid with an odd number of nodes."""

    half_width: float
    n_points: int = MIN_POINTS

    def __post_init__(self):
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValueError("n_points must be odd and at least 3")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @classmethod
    def for_rates(cls, rates: RateSet, n_points=MIN_POINTS, factor=MIN_WIDTH_FACTOR) -> "KKGrid":
        """Smallest compliant grid for the given emitter."""
        return cls(factor * rates.max_width(), n_points)

    @property
    def delta_grid(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.n_points)

    def check(self, rates: RateSet):
        """Raise :class:`GridTooNarrow` unless the grid is wide and dense enough for ``rates``."""
        if self.half_width < MIN_WIDTH_FACTOR * rates.max_width():
            raise GridTooNarrow(
                f"half width {self.half_width:g} is below {MIN_WIDTH_FACTOR:g} linewidths "
                f"({MIN_WIDTH_FACTOR * rates.max_width():g})"
            )
        if self.n_points < MIN_POINTS:
            raise GridTooNarrow(f"{self.n_points} points; at least {MIN_POINTS} are needed")


def _uniform(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 3:
        raise ValueError("need a 1-D grid of at least 3 points")
    step = np.diff(grid)
    if np.any(step <= 0) or np.ptp(step) > 1e-9 * abs(step[0]) * len(grid):
        raise ValueError("the detuning grid must be uniform and ascending")
    return grid


def principal_value_transform(grid, f) -> np.ndarray:
    """``PV int f(x') / (x' - x) dx'`` over the grid, evaluated at every node.

    The pole is removed by subtracting ``f(x)``; the subtracted part is
    integrated exactly and the smooth remainder by the trapezoidal rule.
    """
    x = _uniform(grid)
    f = np.asarray(f, dtype=float)
    a, b = x[0], x[-1]
    h = x[1] - x[0]
    w = np.full(len(x), h)
    w[0] = w[-1] = h / 2
    out = np.empty(len(x))
    n = len(x)
    for i, xi in enumerate(x):
        dx = x - xi
        dx[i] = 1.0
        g = (f - f[i]) / dx
        g[i] = _removable_value(g, i, n, f, h)
        out[i] = np.dot(w, g)
        if 0 < i < n - 1:
            out[i] += f[i] * np.log((b - xi) / (xi - a))
    # endpoints carry a log divergence of the subtracted part; report the regular part only
    return out


# symmetric interpolation weights for the centre node from neighbours at 1..m
_CENTRE_WEIGHTS = {
    3: np.array([0.75, -0.3, 0.05]),
    2: np.array([2.0 / 3.0, -1.0 / 6.0]),
    1: np.array([0.5]),
}


def _removable_value(g, i, n, f, h):
    # the regularised integrand at its own node is f'(x_i); interpolating it
    # from the exact neighbouring values is far more accurate than differencing f
    m = min(i, n - 1 - i, 3)
    if m == 0:
        return (f[1] - f[0]) / h if i == 0 else (f[-1] - f[-2]) / h
    k = np.arange(1, m + 1)
    return float(np.dot(_CENTRE_WEIGHTS[m], g[i - k] + g[i + k]))


def _check_decay(values, what):
    peak = np.max(np.abs(values))
    if peak == 0:
        return
    if max(abs(values[0]), abs(values[-1])) >= DECAY_RTOL * peak:
        raise GridTooNarrow(f"{what} has not decayed at the grid ends; widen the grid")


def kk_phase_from_amplitude(curve: ResponseCurve, allow_floor=False) -> ResponseCurve:
    """Phase reconstructed from ``|t|`` alone.

    Amplitudes at or below ``AMPLITUDE_FLOOR`` raise
    :class:`NonPositiveAmplitude` unless ``allow_floor`` is set, in which case
    they are raised to the floor and flagged in ``clamped``.
    """
    amp = np.asarray(curve.amplitude, dtype=float)
    low = amp <= AMPLITUDE_FLOOR
    if np.any(low) and not allow_floor:
        raise NonPositiveAmplitude(f"{int(low.sum())} samples have |t| <= {AMPLITUDE_FLOOR:g}")
    log_amp = np.log(np.maximum(amp, AMPLITUDE_FLOOR))
    _check_decay(log_amp, "log|t|")
    phi = -principal_value_transform(curve.delta_grid, log_amp) / np.pi
    return ResponseCurve(curve.delta_grid, amp, phi, unwrapped=True, clamped=low | curve.clamped)


def kk_amplitude_from_phase(curve: ResponseCurve) -> ResponseCurve:
    """``|t|`` reconstructed from the phase alone."""
    phi = np.asarray(curve.phase, dtype=float)
    _check_decay(phi, "phase")
    log_amp = principal_value_transform(curve.delta_grid, phi) / np.pi
    return ResponseCurve(curve.delta_grid, np.exp(log_amp), phi, unwrapped=curve.unwrapped, clamped=curve.clamped)
