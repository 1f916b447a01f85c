"""Steady states, time evolution and two-time correlators of the emitter."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import linalg
from .errors import SingularSystem
from .integrate import integrate_linear
from .model import CONJUGATE_PAIRS, FRAMES, SLOT_LABELS, EmitterSystem, Frame, RateSet, Topology, assemble
from .operators import MU, SIGMA, SLOT_OPERATORS, OperatorExpr, expectation, reduce_product

__all__ = [
    "StateVector",
    "CorrelatorSet",
    "probe_operator",
    "steady_state",
    "steady_states",
    "evolve",
    "trajectory",
    "correlators",
    "default_tau_grid",
]

RESIDUAL_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class StateVector:
    """The eight tracked expectations of one topology, in its rotating frame."""

    slots: np.ndarray
    topology: Topology

    def __post_init__(self):
        s = np.array(self.slots, dtype=complex).reshape(8)
        s.setflags(write=False)
        object.__setattr__(self, "slots", s)
        object.__setattr__(self, "topology", Topology.parse(self.topology))

    @property
    def frame(self) -> Frame:
        return FRAMES[self.topology]

    @property
    def labels(self):
        return SLOT_LABELS[self.topology]

    def __getitem__(self, key):
        if isinstance(key, str):
            key = self.labels.index(key)
        return self.slots[key]

    def population(self, level: int) -> float:
        p1, p3 = self.slots[4].real, self.slots[3].real
        return {1: p1, 2: 1.0 - p1 - p3, 3: p3}[level]

    def conjugate_asymmetry(self) -> float:
        """Largest violation of the pairing between conjugate slots."""
        s = self.slots
        pairs = max(abs(s[a] - np.conj(s[b])) for a, b in CONJUGATE_PAIRS)
        return max(pairs, abs(s[3].imag), abs(s[4].imag))

    def expect(self, expr: OperatorExpr) -> complex:
        return complex(expectation(expr, self.slots))


def probe_operator(topology) -> OperatorExpr:
    """Emitter lowering operator radiating into the probe polarisation."""
    return MU if Topology.parse(topology) is Topology.LAMBDA else SIGMA


def _refined_solve(R, rhs):
    factors = linalg.lu_factor(R)
    x = linalg.lu_solve(factors, rhs)
    # two rounds of refinement keep the residual at the rounding floor
    for _ in range(2):
        r = rhs - np.einsum("...ij,...j->...i", R, x)
        x = x + linalg.lu_solve(factors, r)
    return x


def steady_state(system: EmitterSystem) -> StateVector:
    """Long-time fixed point ``M = -R^{-1} Omega``."""
    M = _refined_solve(system.r_matrix, -system.drive_vector)
    return StateVector(M, system.topology)


def steady_states(topology, rates: RateSet, omega_p, omega_d, delta_p, delta_d) -> np.ndarray:
    """Steady states for array-valued beam parameters; returns ``(*batch, 8)``."""
    R, W = assemble(topology, rates, omega_p, omega_d, delta_p, delta_d)
    return _refined_solve(R, -W)


def _closed_form(R, w, y0, times):
    # exponentiate the augmented generator [[R, w], [0, 0]]; no linear solve,
    # so this path stays independent of the steady-state solver
    n = R.shape[0]
    cols = 1 if y0.ndim == 1 else y0.shape[1]
    w = w.reshape(n, -1)
    if w.shape[1] == 1 and cols > 1:
        w = np.repeat(w, cols, axis=1)
    aug = np.zeros((n + cols, n + cols), dtype=complex)
    aug[:n, :n] = R
    aug[:n, n:] = w
    start = np.vstack([y0.reshape(n, cols), np.eye(cols)])
    out = np.empty((len(times),) + y0.shape, dtype=complex)
    for k, t in enumerate(times):
        out[k] = (expm(aug * t) @ start)[:n].reshape(y0.shape)
    return out


def trajectory(system: EmitterSystem, state0, times, method="rk45", rtol=1e-10, atol=1e-13) -> np.ndarray:
    """Slots at each of the ascending ``times``; shape ``(len(times), 8)``.

    ``method`` is ``"rk45"`` (adaptive Dormand-Prince stepping) or ``"expm"``
    (matrix exponential; raises :class:`SingularSystem` if ``R`` is singular).
    """
    y0 = state0.slots if isinstance(state0, StateVector) else np.asarray(state0, dtype=complex)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError("evolution times must be non-negative")
    if method == "rk45":
        return integrate_linear(system.r_matrix, system.drive_vector, y0, times, rtol=rtol, atol=atol)
    if method == "expm":
        return _closed_form(system.r_matrix, system.drive_vector, y0, times)
    raise ValueError(f"unknown method {method!r}")


def evolve(system: EmitterSystem, state0: StateVector, t: float, method="rk45", **kwargs) -> StateVector:
    """Solve ``dM/dt = R M + Omega`` for a duration ``t`` starting from ``state0``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return StateVector(state0.slots, system.topology)
    return StateVector(trajectory(system, state0, [t], method, **kwargs)[0], system.topology)


def default_tau_grid(rates: RateSet, n=400) -> np.ndarray:
    nonzero = [r for r in (rates.gamma_p, rates.gamma_d, rates.gamma_nr, rates.gamma_l2, rates.gamma_l3) if r > 0]
    if not nonzero:
        raise SingularSystem("all rates vanish; there is no relaxation time scale")
    tau_max = 20.0 / min(nonzero)
    return np.concatenate([[0.0], np.geomspace(tau_max * 1e-6, tau_max, n - 1)])


@dataclass(frozen=True, eq=False)
class CorrelatorSet:
    """Two-time correlators of the probe operator ``zeta`` with the tracked vector.

    Rows are delays, columns slots:

    * ``zdag_v[n, k]   = <zeta^+(t) V_k(t + tau_n)>``
    * ``zdag_v_z[n, k] = <zeta^+(t) V_k(t + tau_n) zeta(t)>``
    * ``v_z[n, k]      = <V_k(t + tau_n) zeta(t)>``

    ``norms`` holds the equal-time factors ``<zeta^+>``, ``<zeta^+ zeta>`` and
    ``<zeta>`` that multiply the inhomogeneous term of each regression equation.
    """

    tau_grid: np.ndarray
    zdag_v: np.ndarray
    zdag_v_z: np.ndarray
    v_z: np.ndarray
    norms: tuple[complex, complex, complex]
    zeta: OperatorExpr

    def later(self, expr: OperatorExpr, which: str) -> np.ndarray:
        """Evaluate ``expr`` at the later time inside one of the correlators."""
        table = {"zdag_v": 0, "zdag_v_z": 1, "v_z": 2}[which]
        data = (self.zdag_v, self.zdag_v_z, self.v_z)[table]
        return expectation(expr, data.T, norm=self.norms[table])


def correlators(system: EmitterSystem, steady: StateVector, tau_grid=None, method="expm") -> CorrelatorSet:
    """Integrate the regression equations from their equal-time values.

    ``steady`` is the state at the earlier time (normally the steady state).
    """
    tau = default_tau_grid(system.rates) if tau_grid is None else np.asarray(tau_grid, dtype=float)
    if np.any(tau < 0) or np.any(np.diff(tau) < 0):
        raise ValueError("delays must be non-negative and ascending")
    zeta = probe_operator(system.topology)
    zdag = zeta.dag
    initial = np.empty((8, 3), dtype=complex)
    for k, v in enumerate(SLOT_OPERATORS):
        initial[k, 0] = steady.expect(reduce_product([zdag, v]))
        initial[k, 1] = steady.expect(reduce_product([zdag, v, zeta]))
        initial[k, 2] = steady.expect(reduce_product([v, zeta]))
    norms = (steady.expect(zdag), steady.expect(zdag @ zeta), steady.expect(zeta))
    w = np.outer(system.drive_vector, norms)
    R = system.r_matrix
    if method == "rk45":
        out = integrate_linear(R, w, initial, tau)
    elif method == "expm":
        out = _closed_form(R, w, initial, tau)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CorrelatorSet(tau, out[:, :, 0], out[:, :, 1], out[:, :, 2], norms, zeta)
