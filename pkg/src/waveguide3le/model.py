"""Physical parameters and the linear equations of motion of the emitter.

Every topology tracks the same eight emitter operators, in the same order::

    slot  0     1    2     3      4      5    6     7
    op    nu^+  sig  mu^+  nu nu^+ sig sig^+ mu  sig^+  nu

with ``sig = |1><2|``, ``mu = |2><3|`` and ``nu = |3><1|``.  Slot 3 is the
population of level 3, slot 4 the population of level 1; the population of
level 2 is eliminated through completeness.  Each coherence slot is written in
a rotating frame, see :class:`Frame`.

Rates and frequencies are dimensionless (in units of a reference transition
frequency) and no unit conversion is performed anywhere.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "Topology",
    "RateSet",
    "DriveSet",
    "Frame",
    "EmitterSystem",
    "SLOT_LABELS",
    "FRAMES",
    "assemble",
    "build_system",
    "classical_drive_system",
    "initial_state",
]


class Topology(str, enum.Enum):
    """Which transitions the probe and the drive beams address."""

    LAMBDA = "lambda"
    V = "v"
    LADDER = "ladder"

    @classmethod
    def parse(cls, value: "Topology | str") -> "Topology":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"l": "lambda", "λ": "lambda", "v": "v", "xi": "ladder", "ξ": "ladder", "x": "ladder"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown topology {value!r}; expected lambda, v or ladder") from None


@dataclass(frozen=True)
class RateSet:
    """Decay and dephasing rates of the emitter.

    ``gamma_p`` and ``gamma_d`` are the per-direction radiative rates into the
    probe and drive polarisations, ``gamma_nr`` the non-radiative decay on the
    third transition, ``gamma_l2`` and ``gamma_l3`` pure dephasing of levels 2
    and 3.
    """

    gamma_p: float
    gamma_d: float
    gamma_nr: float = 0.0
    gamma_l2: float = 0.0
    gamma_l3: float = 0.0

    def __post_init__(self):
        for name in ("gamma_p", "gamma_d", "gamma_nr", "gamma_l2", "gamma_l3"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative rate, got {value!r}")

    @property
    def gamma_tilde(self) -> float:
        """Total radiative width ``2 (gamma_p + gamma_d)``."""
        return 2.0 * (self.gamma_p + self.gamma_d)

    @property
    def gamma_t(self) -> float:
        return self.gamma_tilde + self.gamma_nr

    # composite coherence widths used by the Lambda susceptibilities
    @property
    def width_31(self) -> float:
        return self.gamma_tilde + self.gamma_l3

    @property
    def width_21(self) -> float:
        return self.gamma_l2

    @property
    def width_32(self) -> float:
        return self.width_31 + self.width_21

    # primed widths used by the V and ladder susceptibilities
    @property
    def width_21_primed(self) -> float:
        return 2.0 * self.gamma_p + self.gamma_l2

    @property
    def width_31_primed(self) -> float:
        return 2.0 * self.gamma_d + self.gamma_l3

    @property
    def width_32_primed(self) -> float:
        return self.width_31_primed + self.width_21_primed

    def max_width(self) -> float:
        """Largest coherence width of any topology, a natural detuning scale."""
        return max(
            self.width_32 + self.gamma_nr,
            self.width_32_primed + self.gamma_nr,
            self.gamma_t,
        )

    def scaled(self, factor: float) -> "RateSet":
        return RateSet(*(factor * getattr(self, n) for n in ("gamma_p", "gamma_d", "gamma_nr", "gamma_l2", "gamma_l3")))


@dataclass(frozen=True)
class DriveSet:
    """Rabi frequencies and detunings of the probe and drive beams."""

    omega_p: float
    omega_d: float
    delta_p: float = 0.0
    delta_d: float = 0.0

    def __post_init__(self):
        if self.omega_p < 0 or self.omega_d < 0:
            raise ValueError("Rabi frequencies must be non-negative")

    @classmethod
    def from_photon_numbers(cls, rates: RateSet, n_probe: float, n_drive: float, delta_p=0.0, delta_d=0.0):
        """Beams carrying on average ``n_probe`` / ``n_drive`` photons per interaction time."""
        return cls(
            omega_p=float(np.sqrt(8.0 * n_probe) * rates.gamma_p),
            omega_d=float(np.sqrt(8.0 * n_drive) * rates.gamma_d),
            delta_p=delta_p,
            delta_d=delta_d,
        )

    def n_probe(self, rates: RateSet) -> float:
        return self.omega_p**2 / (8.0 * rates.gamma_p**2)

    def n_drive(self, rates: RateSet) -> float:
        return self.omega_d**2 / (8.0 * rates.gamma_d**2)

    def probe_flux(self, rates: RateSet) -> float:
        """Incident probe photon flux ``v_g I_p``."""
        return self.omega_p**2 / (2.0 * rates.gamma_p)

    def drive_flux(self, rates: RateSet) -> float:
        return self.omega_d**2 / (2.0 * rates.gamma_d)

    def with_(self, **changes) -> "DriveSet":
        return replace(self, **changes)


@dataclass(frozen=True)
class Frame:
    """Rotating frame of the tracked expectations.

    ``level_frequencies[i]`` is the frequency ``w_i`` assigned to level ``i+1``;
    the expectation of ``|i><j|`` is stored multiplied by ``exp(i (w_j - w_i) t)``.
    Because the phase is additive in the level index, products of framed
    operators are framed products, so equal-time operator algebra needs no
    explicit phase factors.
    """

    level_frequencies: tuple[str, str, str]

    def phase(self, i: int, j: int) -> str:
        wi, wj = self.level_frequencies[i - 1], self.level_frequencies[j - 1]
        if wi == wj:
            return "1"
        return f"exp(i[({wj}) - ({wi})]t)"


FRAMES = {
    Topology.LAMBDA: Frame(("0", "w_d - w_p", "w_d")),
    Topology.V: Frame(("0", "w_p", "w_d")),
    Topology.LADDER: Frame(("0", "w_p", "w_p + w_d")),
}

SLOT_LABELS = {
    Topology.LAMBDA: ("N1*", "S1", "M1*", "N2", "S2", "M1", "S1*", "N1"),
    Topology.V: ("N3*", "S3", "M3*", "N4", "S4", "M3", "S3*", "N3"),
    Topology.LADDER: ("N5*", "S5", "M5*", "N6", "S6", "M5", "S5*", "N5"),
}

# conjugate partners and the coherence slots touched by each dephasing rate
CONJUGATE_PAIRS = ((0, 7), (1, 6), (2, 5))
_LEVEL3_COHERENCES = (0, 7, 2, 5)
_LEVEL2_COHERENCES = (1, 6, 2, 5)


@dataclass(frozen=True, eq=False)
class EmitterSystem:
    """Linear system ``dM/dt = R M + Omega`` for one topology and parameter point."""

    topology: Topology
    r_matrix: np.ndarray
    drive_vector: np.ndarray
    rates: RateSet
    drives: DriveSet
    slot_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.slot_labels:
            object.__setattr__(self, "slot_labels", SLOT_LABELS[self.topology])
        self.r_matrix.setflags(write=False)
        self.drive_vector.setflags(write=False)

    @property
    def frame(self) -> Frame:
        return FRAMES[self.topology]

    def slot(self, label: str) -> int:
        return self.slot_labels.index(label)


def assemble(topology, rates: RateSet, omega_p, omega_d, delta_p, delta_d):
    """Evolution matrices and drive vectors for (possibly array-valued) beams.

    The four beam parameters broadcast against each other; the result has
    shapes ``(*batch, 8, 8)`` and ``(*batch, 8)``.
    """
    topology = Topology.parse(topology)
    op, od, dp, dd = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (omega_p, omega_d, delta_p, delta_d))
    )
    batch = op.shape
    R = np.zeros(batch + (8, 8), dtype=complex)
    W = np.zeros(batch + (8,), dtype=complex)
    gp, gd, gg = rates.gamma_p, rates.gamma_d, rates.gamma_nr
    gt = rates.gamma_tilde
    i = 1j
    iOp, iOd = i * op, i * od

    def put(r, c, value):
        R[..., r, c] = value

    if topology is Topology.LAMBDA:
        k1 = -i * dd - gt
        k2 = -i * dp - gt - gg
        k3 = k2 - k1
        put(0, 0, k1); put(0, 1, -iOp); put(0, 3, iOd); put(0, 4, -iOd)
        put(1, 0, -iOp); put(1, 1, np.conj(k3)); put(1, 2, iOd)
        put(2, 1, iOd); put(2, 2, np.conj(k2)); put(2, 3, -2 * iOp); put(2, 4, -iOp)
        put(3, 0, iOd); put(3, 2, -iOp); put(3, 3, -2 * gt); put(3, 5, iOp); put(3, 7, -iOd)
        put(4, 0, -iOd); put(4, 3, 4 * gd - 2 * gg); put(4, 4, -2 * gg); put(4, 7, iOd)
        put(5, 3, 2 * iOp); put(5, 4, iOp); put(5, 5, k2); put(5, 6, -iOd)
        put(6, 5, -iOd); put(6, 6, k3); put(6, 7, iOp)
        put(7, 3, -iOd); put(7, 4, iOd); put(7, 6, iOp); put(7, 7, np.conj(k1))
        W[..., 2] = iOp
        W[..., 4] = 2 * gg
        W[..., 5] = -iOp
    elif topology is Topology.V:
        k4 = -i * dd - gg - 2 * gd
        k5 = -i * dp - 2 * gp
        k6 = np.conj(k4) + k5
        put(0, 0, k4); put(0, 3, iOd); put(0, 4, -iOd); put(0, 5, iOp)
        put(1, 1, k5); put(1, 2, iOd); put(1, 3, -iOp); put(1, 4, -2 * iOp)
        put(2, 1, iOd); put(2, 2, k6); put(2, 7, -iOp)
        put(3, 0, iOd); put(3, 3, -4 * gd - 2 * gg); put(3, 7, -iOd)
        put(4, 0, -iOd); put(4, 1, -iOp); put(4, 3, 4 * gd - 4 * gp); put(4, 4, -4 * gp); put(4, 6, iOp); put(4, 7, iOd)
        put(5, 0, iOp); put(5, 5, np.conj(k6)); put(5, 6, -iOd)
        put(6, 3, iOp); put(6, 4, 2 * iOp); put(6, 5, -iOd); put(6, 6, np.conj(k5))
        put(7, 2, -iOp); put(7, 3, -iOd); put(7, 4, iOd); put(7, 7, np.conj(k4))
        W[..., 1] = iOp
        W[..., 4] = 4 * gp
        W[..., 6] = -iOp
    else:
        # The level-3 coherences also decay through the non-radiative 3->1
        # channel; without the -gg term the steady state is not a density matrix.
        k7 = -i * dd - gt - gg
        k5 = -i * dp - 2 * gp
        k8 = k7 - np.conj(k5)
        put(0, 0, k8); put(0, 1, -iOd); put(0, 5, iOp)
        put(1, 0, -iOd); put(1, 1, k5); put(1, 3, -iOp); put(1, 4, -2 * iOp)
        put(2, 2, np.conj(k7)); put(2, 3, -2 * iOd); put(2, 4, -iOd); put(2, 7, -iOp)
        put(3, 2, -iOd); put(3, 3, -4 * gd - 2 * gg); put(3, 5, iOd)
        put(4, 1, -iOp); put(4, 3, 2 * gg - 4 * gp); put(4, 4, -4 * gp); put(4, 6, iOp)
        put(5, 0, iOp); put(5, 3, 2 * iOd); put(5, 4, iOd); put(5, 5, k7)
        put(6, 3, iOp); put(6, 4, 2 * iOp); put(6, 6, np.conj(k5)); put(6, 7, iOd)
        put(7, 2, -iOp); put(7, 6, iOd); put(7, 7, np.conj(k8))
        W[..., 1] = iOp
        W[..., 2] = iOd
        W[..., 4] = 4 * gp
        W[..., 5] = -iOd
        W[..., 6] = -iOp

    for s in _LEVEL3_COHERENCES:
        R[..., s, s] -= rates.gamma_l3
    for s in _LEVEL2_COHERENCES:
        R[..., s, s] -= rates.gamma_l2
    return R, W


def build_system(topology, rates: RateSet, drives: DriveSet) -> EmitterSystem:
    """Evolution matrix and drive vector for a single parameter point."""
    topology = Topology.parse(topology)
    R, W = assemble(topology, rates, drives.omega_p, drives.omega_d, drives.delta_p, drives.delta_d)
    return EmitterSystem(topology, R, W, rates, drives)


def classical_drive_system(rates: RateSet, drives: DriveSet) -> EmitterSystem:
    """Lambda emitter whose drive is a classical field: no drive-induced decay."""
    return build_system(Topology.LAMBDA, replace(rates, gamma_d=0.0), drives)


def initial_state(topology):
    """Emitter in its ground state ``|1>``: only the level-1 population slot is set."""
    from .dynamics import StateVector

    topology = Topology.parse(topology)
    slots = np.zeros(8, dtype=complex)
    slots[4] = 1.0
    return StateVector(slots, topology)
