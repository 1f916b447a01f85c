"""Probe transmission amplitude, phase response and cross-Kerr coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import StateVector, steady_states
from .errors import UndefinedCoefficient, UndefinedPhase, UnsupportedTopology
from .model import DriveSet, RateSet, Topology

__all__ = [
    "ComplexTransmission",
    "ResponseCurve",
    "KerrShift",
    "transmission_amplitude",
    "exact_susceptibility",
    "phase",
    "response_curve",
    "cross_kerr_shift",
    "linear_susceptibility",
    "approx_susceptibility",
    "modified_phase_shift",
    "kerr_coefficient",
    "phase_shift_slope",
    "max_phase_shift",
]

# slot holding <zeta^+> in each frame
_ZETA_DAG_SLOT = {Topology.LAMBDA: 2, Topology.V: 6, Topology.LADDER: 6}


@dataclass(frozen=True)
class ComplexTransmission:
    """Coherent probe transmission ``amplitude = 1 + 2i chi``."""

    amplitude: complex
    chi: complex

    @property
    def phase(self) -> float:
        return phase(self.chi)


@dataclass(frozen=True, eq=False)
class ResponseCurve:
    """Amplitude and phase sampled on a probe-detuning grid.

    ``phase`` is unwrapped along the grid when ``unwrapped`` is true.
    ``clamped`` marks samples whose amplitude was raised to a floor.
    """

    delta_grid: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    unwrapped: bool = True
    clamped: np.ndarray = None

    def __post_init__(self):
        grid = np.asarray(self.delta_grid, dtype=float)
        object.__setattr__(self, "delta_grid", grid)
        object.__setattr__(self, "amplitude", np.asarray(self.amplitude, dtype=float))
        object.__setattr__(self, "phase", np.asarray(self.phase, dtype=float))
        clamped = np.zeros(grid.shape, bool) if self.clamped is None else np.asarray(self.clamped, bool)
        object.__setattr__(self, "clamped", clamped)


@dataclass(frozen=True, eq=False)
class KerrShift:
    """Drive-induced change of the probe response.

    ``delta_amplitude`` is ``|t|`` with drive minus ``|t|`` without;
    ``delta_phase`` the corresponding phase difference in radians.
    """

    delta_grid: np.ndarray
    delta_amplitude: np.ndarray
    delta_phase: np.ndarray
    driven: ResponseCurve
    undriven: ResponseCurve


def _chi_from_slots(topology, rates: RateSet, omega_p, slots):
    if np.any(np.asarray(omega_p) <= 0):
        raise UndefinedCoefficient("the probe Rabi frequency must be positive")
    return rates.gamma_p / np.asarray(omega_p) * slots[..., _ZETA_DAG_SLOT[topology]]


def transmission_amplitude(topology, rates: RateSet, drives: DriveSet, state: StateVector) -> ComplexTransmission:
    """Coherent transmission amplitude of the probe for the given emitter state."""
    topology = Topology.parse(topology)
    chi = complex(_chi_from_slots(topology, rates, drives.omega_p, state.slots))
    return ComplexTransmission(1.0 + 2j * chi, chi)


def exact_susceptibility(topology, rates: RateSet, omega_p, omega_d, delta_p, delta_d=0.0) -> np.ndarray:
    """Steady-state susceptibility for array-valued beam parameters."""
    topology = Topology.parse(topology)
    slots = steady_states(topology, rates, omega_p, omega_d, delta_p, delta_d)
    return _chi_from_slots(topology, rates, np.broadcast_to(omega_p, slots.shape[:-1]), slots)


def phase(chi) -> float:
    """Phase of ``1 + 2i chi``, on the full ``(-pi, pi]`` branch."""
    re, im = 2.0 * np.real(chi), 1.0 - 2.0 * np.imag(chi)
    if np.any((re == 0) & (im == 0)):
        raise UndefinedPhase("the transmission amplitude vanishes")
    out = np.arctan2(re, im)
    return float(out) if np.ndim(out) == 0 else out


def _curve_from_t(grid, t):
    return ResponseCurve(grid, np.abs(t), np.unwrap(np.angle(t)))


def response_curve(topology, rates: RateSet, drives: DriveSet, delta_grid) -> ResponseCurve:
    """Exact ``|t|`` and unwrapped phase over the probe detunings in ``delta_grid``.

    The detuning stored in ``drives`` is ignored.
    """
    grid = np.asarray(delta_grid, dtype=float)
    chi = exact_susceptibility(topology, rates, drives.omega_p, drives.omega_d, grid, drives.delta_d)
    return _curve_from_t(grid, 1.0 + 2j * chi)


def _phase_difference(t_num, t_den):
    # the ratio avoids picking up unrelated 2 pi offsets of the two curves
    return np.unwrap(np.angle(t_num / t_den))


def cross_kerr_shift(topology, rates: RateSet, drives: DriveSet, delta_grid) -> KerrShift:
    """Change of amplitude and phase when the drive is switched on."""
    grid = np.asarray(delta_grid, dtype=float)
    chi_on = exact_susceptibility(topology, rates, drives.omega_p, drives.omega_d, grid, drives.delta_d)
    chi_off = exact_susceptibility(topology, rates, drives.omega_p, 0.0, grid, drives.delta_d)
    t_on, t_off = 1.0 + 2j * chi_on, 1.0 + 2j * chi_off
    return KerrShift(
        grid,
        np.abs(t_on) - np.abs(t_off),
        _phase_difference(t_on, t_off),
        _curve_from_t(grid, t_on),
        _curve_from_t(grid, t_off),
    )


def linear_susceptibility(topology, rates: RateSet, drives: DriveSet, delta_p):
    """Weak-beam susceptibility; the Lambda form depends on the intensity ratio of the beams."""
    topology = Topology.parse(topology)
    d = np.asarray(delta_p, dtype=float)
    gp = rates.gamma_p
    if topology is Topology.LAMBDA:
        g31, g32 = rates.width_31, rates.width_32
        if drives.omega_d == 0:
            ratio = np.inf
        else:
            ratio = drives.omega_p**2 * rates.gamma_d / (drives.omega_d**2 * gp)
        if np.isinf(ratio):
            bracket = 0.0
        else:
            bracket = 1.0 - g31 * g32 * ratio / (g32**2 + g31 * g32 * ratio + d**2)
        return -gp / (d + 1j * g32) * bracket
    return -gp / (d + 1j * rates.width_21_primed)


def approx_susceptibility(topology, rates: RateSet, drives: DriveSet, delta_p):
    """Susceptibility in the limit of a vanishing probe, any drive strength."""
    topology = Topology.parse(topology)
    d = np.asarray(delta_p, dtype=float)
    od2, gp, gd = drives.omega_d**2, rates.gamma_p, rates.gamma_d
    if topology is Topology.LAMBDA:
        g21, g32 = rates.width_21, rates.width_32
        return -gp / (d + 1j * g32) * (1.0 - od2 / (od2 - (d + 1j * g21) * (d + 1j * g32)))
    g21, g31, g32 = rates.width_21_primed, rates.width_31_primed, rates.width_32_primed
    chi_l = -gp / (d + 1j * g21)
    if topology is Topology.LADDER:
        return chi_l * (1.0 - od2 / (od2 - (d + 1j * g21) * (d + 1j * g31)))
    num = od2 * ((d + 1j * g21 + 2j * gd) * (d + 1j * g32) - 2 * od2)
    den = 2 * (od2 + gd * g31) * (od2 - (d + 1j * g21) * (d + 1j * g32))
    # the drive-induced correction enters with a plus sign; this is what the
    # weak-probe limit of the equations of motion gives
    return chi_l * (1.0 + num / den)


def modified_phase_shift(topology, rates: RateSet, drives: DriveSet, delta_grid) -> ResponseCurve:
    """Phase of the driven response relative to the weak-beam linear response.

    ``amplitude`` holds ``|t|`` minus ``|t_linear|``.
    """
    topology = Topology.parse(topology)
    if topology is Topology.V:
        raise UnsupportedTopology("the linear-reference phase shift is defined for lambda and ladder emitters")
    grid = np.asarray(delta_grid, dtype=float)
    chi = exact_susceptibility(topology, rates, drives.omega_p, drives.omega_d, grid, drives.delta_d)
    t_exact = 1.0 + 2j * chi
    t_lin = 1.0 + 2j * linear_susceptibility(topology, rates, drives, grid)
    return ResponseCurve(grid, np.abs(t_exact) - np.abs(t_lin), _phase_difference(t_exact, t_lin))


def kerr_coefficient(topology, rates: RateSet, delta_p):
    """Small-drive slope ``k`` in ``phase shift = k * omega_d**2``.

    For a Lambda emitter the shift is measured against the linear response.
    """
    topology = Topology.parse(topology)
    d = np.asarray(delta_p, dtype=float)
    gp, gd = rates.gamma_p, rates.gamma_d
    if topology is Topology.LAMBDA:
        g21, g32 = rates.width_21, rates.width_32
        num = 2 * gp * d * (g21 * g32 + (g21 + g32) * (g32 - 2 * gp) - d**2)
        return num / ((g21**2 + d**2) * (g32**2 + d**2) * ((g32 - 2 * gp) ** 2 + d**2))
    g21, g31 = rates.width_21_primed, rates.width_31_primed
    if topology is Topology.V:
        num = gp * d * (g21**2 + 4 * gd * (g21 - gp) + d**2)
        return num / (g31 * gd * (g21**2 + d**2) * ((g21 - 2 * gp) ** 2 + d**2))
    num = 2 * gp * d * (g21 * g31 + (g21 + g31) * (g21 - 2 * gp) - d**2)
    return num / ((g21**2 + d**2) * (g31**2 + d**2) * ((g21 - 2 * gp) ** 2 + d**2))


def _shift(topology, rates, drives, grid, kind):
    if kind == "cross":
        return cross_kerr_shift(topology, rates, drives, grid).delta_phase
    if kind == "modified":
        return modified_phase_shift(topology, rates, drives, grid).phase
    raise ValueError(f"unknown phase-shift kind {kind!r}")


def phase_shift_slope(topology, rates: RateSet, delta_p, omega_d=None, omega_p=None):
    """Finite-difference ``d(phase shift)/d(omega_d**2)`` at a small drive.

    Lambda uses the linear-reference shift, V and ladder the on/off shift.
    Defaults keep both beams far below every rate.
    """
    topology = Topology.parse(topology)
    smallest = min(r for r in (rates.gamma_p, rates.gamma_d, rates.gamma_l2 or np.inf, rates.gamma_l3 or np.inf))
    omega_d = 2e-3 * smallest if omega_d is None else omega_d
    omega_p = 1e-2 * omega_d if omega_p is None else omega_p
    kind = "modified" if topology is Topology.LAMBDA else "cross"
    grid = np.atleast_1d(np.asarray(delta_p, dtype=float))
    shift = _shift(topology, rates, DriveSet(omega_p, omega_d), grid, kind)
    # evaluate pointwise: unwrapping across a sparse grid is meaningless
    shift = np.angle(np.exp(1j * shift))
    out = shift / omega_d**2
    return out if np.ndim(delta_p) else float(out[0])


def max_phase_shift(topology, rates: RateSet, drives: DriveSet, kind="cross", n_scan=2001, window=20.0):
    """Probe detuning maximising ``|phase shift|`` and the signed shift there.

    A scan over ``+-window`` times the largest linewidth is refined by a
    bounded scalar search between the neighbours of the best sample.
    """
    topology = Topology.parse(topology)
    half = window * rates.max_width()
    grid = np.linspace(-half, half, n_scan)
    values = _shift(topology, rates, drives, grid, kind)
    values = np.angle(np.exp(1j * values))
    k = int(np.argmax(np.abs(values)))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, n_scan - 1)]

    def neg(x):
        v = _shift(topology, rates, drives, np.array([x]), kind)[0]
        return -abs(np.angle(np.exp(1j * v)))

    res = minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * max(half, 1e-300)})
    best_x = res.x if -res.fun >= abs(values[k]) else grid[k]
    signed = float(np.angle(np.exp(1j * _shift(topology, rates, drives, np.array([best_x]), kind)[0])))
    return float(best_x), signed
