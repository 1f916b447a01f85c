"""Transport coefficients, amplification efficiencies and photon statistics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import CorrelatorSet, StateVector, correlators, default_tau_grid, evolve, steady_state
from .errors import DivisionByZero, UndefinedCoefficient, UnsupportedTopology
from .model import DriveSet, EmitterSystem, RateSet, Topology, build_system

__all__ = [
    "TransportCoefficients",
    "AmplificationResult",
    "G2Curve",
    "transport",
    "coherent_amplification",
    "coherent_amplification_approx",
    "coherent_gain_parameter",
    "amplification_threshold_v",
    "critical_drive_lambda",
    "incoherent_amplification",
    "incoherent_amplification_approx",
    "amplification",
    "g2_zero",
    "g2_curve",
    "g2_transient",
    "maximize_coherent_amplification",
    "maximize_coherent_amplification_approx",
]


def _beta(rate, rabi, what):
    if rabi <= 0:
        raise UndefinedCoefficient(f"{what} Rabi frequency is zero")
    if rate <= 0:
        raise UndefinedCoefficient(f"{what} decay rate is zero")
    return 2.0 * rate / rabi


@dataclass(frozen=True)
class TransportCoefficients:
    """Transmission and reflection of both beams, normalised to the incident power.

    Coefficients of a beam with zero Rabi frequency are undefined and raise
    :class:`UndefinedCoefficient` when read.
    """

    _t_probe: Optional[float]
    _r_probe: Optional[float]
    _t_drive: Optional[float]
    _r_drive: Optional[float]
    probe_flux: Optional[float] = None
    drive_flux: Optional[float] = None

    @staticmethod
    def _get(value, name):
        if value is None:
            raise UndefinedCoefficient(f"{name} is undefined for a beam with zero Rabi frequency")
        return value

    @property
    def t_probe(self) -> float:
        return self._get(self._t_probe, "t_probe")

    @property
    def r_probe(self) -> float:
        return self._get(self._r_probe, "r_probe")

    @property
    def t_drive(self) -> float:
        return self._get(self._t_drive, "t_drive")

    @property
    def r_drive(self) -> float:
        return self._get(self._r_drive, "r_drive")

    def flux_balance(self) -> float:
        """``I_p (T_p + R_p - 1) + I_d (T_d + R_d - 1)``: photons gained by both beams."""
        return (
            self._get(self.probe_flux, "probe flux") * (self.t_probe + self.r_probe - 1.0)
            + self._get(self.drive_flux, "drive flux") * (self.t_drive + self.r_drive - 1.0)
        )


def transport(topology, rates: RateSet, drives: DriveSet, state: StateVector) -> TransportCoefficients:
    """Transmission and reflection coefficients evaluated on ``state``."""
    topology = Topology.parse(topology)
    s = state.slots
    p3 = s[3].real
    p2 = 1.0 - s[3].real - s[4].real
    if topology is Topology.LAMBDA:
        # probe on |2>-|3>, drive on |1>-|3>
        probe_pop, probe_coh = p3, s[5]
        drive_pop, drive_coh = p3, -s[7]
    elif topology is Topology.V:
        probe_pop, probe_coh = p2, np.conj(s[6])
        drive_pop, drive_coh = p3, -s[7]
    else:
        probe_pop, probe_coh = p2, np.conj(s[6])
        drive_pop, drive_coh = p3, np.conj(s[2])

    tp = rp = td = rd = fp = fd = None
    if drives.omega_p > 0 and rates.gamma_p > 0:
        b = _beta(rates.gamma_p, drives.omega_p, "probe")
        rp = float(b * b * probe_pop)
        tp = float(1.0 + rp + 2.0 * b * np.imag(probe_coh))
        fp = drives.probe_flux(rates)
    if drives.omega_d > 0 and rates.gamma_d > 0:
        b = _beta(rates.gamma_d, drives.omega_d, "drive")
        rd = float(b * b * drive_pop)
        td = float(1.0 + rd + 2.0 * b * np.imag(drive_coh))
        fd = drives.drive_flux(rates)
    if tp is None and td is None:
        raise UndefinedCoefficient("both Rabi frequencies (or both radiative rates) are zero")
    return TransportCoefficients(tp, rp, td, rd, fp, fd)


def _probe_coherence(topology, state: StateVector) -> complex:
    """``<zeta>`` in the probe frame: M1 for Lambda, S3 for V."""
    if topology is Topology.LAMBDA:
        return complex(state.slots[5])
    if topology is Topology.V:
        return complex(state.slots[1])
    raise UnsupportedTopology("a ladder emitter cannot amplify the probe")


def coherent_amplification(topology, rates: RateSet, drives: DriveSet, state: StateVector) -> float:
    """Gain of the phase-coherent part of the transmitted probe."""
    topology = Topology.parse(topology)
    m = _probe_coherence(topology, state)
    _beta(rates.gamma_p, drives.omega_p, "probe")
    flux = drives.probe_flux(rates)
    return float(2.0 * (rates.gamma_p * abs(m) ** 2 + drives.omega_p * m.imag) / flux)


def incoherent_amplification(topology, rates: RateSet, drives: DriveSet, state: StateVector) -> float:
    """Gain carried by spontaneously emitted probe-polarisation photons."""
    topology = Topology.parse(topology)
    m = _probe_coherence(topology, state)
    _beta(rates.gamma_p, drives.omega_p, "probe")
    s = state.slots
    upper = s[3].real if topology is Topology.LAMBDA else 1.0 - s[3].real - s[4].real
    return float(2.0 * rates.gamma_p / drives.probe_flux(rates) * (upper - abs(m) ** 2))


@dataclass(frozen=True)
class AmplificationResult:
    eta_coherent: float
    eta_incoherent: float
    eta_total: float


def amplification(topology, rates: RateSet, drives: DriveSet, state: StateVector = None) -> AmplificationResult:
    """Coherent, incoherent and total gain; solves for the steady state if none is given."""
    topology = Topology.parse(topology)
    if state is None:
        state = steady_state(build_system(topology, rates, drives))
    eta_c = coherent_amplification(topology, rates, drives, state)
    eta_inc = incoherent_amplification(topology, rates, drives, state)
    eta_t = transport(topology, rates, drives, state).t_probe - 1.0
    return AmplificationResult(eta_c, eta_inc, eta_t)


def coherent_gain_parameter(topology, rates: RateSet, omega_d) -> np.ndarray:
    """Weak-probe, resonant gain parameter ``eta_0``; coherent gain is ``4 eta_0 (eta_0 + 1)``."""
    topology = Topology.parse(topology)
    gp, gd, gg = rates.gamma_p, rates.gamma_d, rates.gamma_nr
    gt, gtil = rates.gamma_t, rates.gamma_tilde
    od2 = np.asarray(omega_d, dtype=float) ** 2
    if topology is Topology.LAMBDA:
        num = gp * gg * od2 * (2 * gd + gg)
        den = (od2 + gt * gg) * (gtil**2 * gg + 2 * od2 * (gg + gp))
    elif topology is Topology.V:
        num = gp * (gt * (gg * od2 - 2 * gp * (2 * gd + gg) ** 2) - 4 * gp**2 * od2)
        den = (2 * gp * gt + od2) * (2 * gp * (2 * gd + gg) ** 2 + od2 * (gg + 4 * gp))
    else:
        raise UnsupportedTopology("a ladder emitter cannot amplify the probe")
    return num / den


def coherent_amplification_approx(topology, rates: RateSet, drives: DriveSet) -> float:
    """Closed-form coherent gain for a weak resonant probe and resonant drive."""
    eta0 = coherent_gain_parameter(topology, rates, drives.omega_d)
    return float(4.0 * eta0 * (eta0 + 1.0))


def amplification_threshold_v(rates: RateSet) -> float:
    """Drive Rabi frequency above which a V emitter starts to amplify coherently."""
    gp, gd, gg, gt = rates.gamma_p, rates.gamma_d, rates.gamma_nr, rates.gamma_t
    disc = gg * gt - 4 * gp**2
    if disc <= 0:
        raise UndefinedCoefficient("no threshold: gamma_nr * gamma_t <= 4 gamma_p^2")
    return float(np.sqrt(2 * gp * gt) * (2 * gd + gg) / np.sqrt(disc))


def critical_drive_lambda(rates: RateSet) -> float:
    """Drive Rabi frequency maximising the weak-probe coherent gain of a Lambda emitter."""
    if rates.gamma_nr <= 0:
        raise ValueError("the critical drive needs gamma_nr > 0")
    od2 = np.sqrt(rates.gamma_t) * rates.gamma_tilde * rates.gamma_nr / np.sqrt(2 * (rates.gamma_nr + rates.gamma_p))
    return float(np.sqrt(od2))


def incoherent_amplification_approx(topology, rates: RateSet, drives: DriveSet) -> float:
    """Incoherent gain for a drive much stronger than the probe."""
    topology = Topology.parse(topology)
    gp, gd, gg = rates.gamma_p, rates.gamma_d, rates.gamma_nr
    od2, dd = drives.omega_d**2, drives.delta_d
    _beta(gp, drives.omega_p, "probe")
    flux = drives.probe_flux(rates)
    if topology is Topology.LAMBDA:
        den = gg * (rates.gamma_tilde**2 + dd**2) + 2 * od2 * (gp + gg)
    elif topology is Topology.V:
        den = 2 * gp * ((gg + 2 * gd) ** 2 + dd**2) + od2 * (4 * gp + gg)
    else:
        raise UnsupportedTopology("a ladder emitter cannot amplify the probe")
    if den == 0:
        return 0.0
    return float(2 * gp * gg * od2 / (flux * den))


def g2_zero(coefficients: TransportCoefficients) -> float:
    """Zero-delay intensity correlation of the transmitted probe."""
    t, r = coefficients.t_probe, coefficients.r_probe
    if t == 0:
        raise DivisionByZero("probe transmission vanishes")
    return (2.0 * (r + t) - 1.0) / t**2


@dataclass(frozen=True, eq=False)
class G2Curve:
    tau_grid: np.ndarray
    values: np.ndarray


def _intensity_correlation(corr: CorrelatorSet, beta: float, t_now: float, t_later) -> np.ndarray:
    z, zd = corr.zeta, corr.zeta.dag
    n = zd @ z
    same = corr.later(z, "zdag_v")        # <u^+ v>
    pair = corr.later(zd, "zdag_v")       # <u^+ v^+>
    three_b = corr.later(n, "zdag_v")     # <u^+ v^+ v>
    three_a = corr.later(zd, "zdag_v_z")  # <u^+ v^+ u>
    four = corr.later(n, "zdag_v_z")      # <u^+ v^+ v u>
    return (
        t_later + t_now - 1.0
        + 2 * beta**2 * np.real(same - pair)
        - 2 * beta**3 * np.imag(three_a + three_b)
        + beta**4 * np.real(four)
    )


def g2_curve(system: EmitterSystem, rates: RateSet = None, drives: DriveSet = None, tau_grid=None, method="expm") -> G2Curve:
    """Intensity correlation ``g2(tau)`` of the transmitted probe in steady state."""
    rates = system.rates if rates is None else rates
    drives = system.drives if drives is None else drives
    beta = _beta(rates.gamma_p, drives.omega_p, "probe")
    ss = steady_state(system)
    tp = transport(system.topology, rates, drives, ss).t_probe
    if tp == 0:
        raise DivisionByZero("probe transmission vanishes")
    tau = default_tau_grid(rates) if tau_grid is None else np.asarray(tau_grid, dtype=float)
    corr = correlators(system, ss, tau, method=method)
    G = _intensity_correlation(corr, beta, tp, tp)
    return G2Curve(tau, G / tp**2)


def g2_transient(system: EmitterSystem, state, tau_grid, method="expm") -> G2Curve:
    """Best-effort ``g2(t, tau)`` with the earlier time at a non-stationary ``state``."""
    rates, drives = system.rates, system.drives
    beta = _beta(rates.gamma_p, drives.omega_p, "probe")
    tau = np.asarray(tau_grid, dtype=float)
    t_now = transport(system.topology, rates, drives, state).t_probe
    t_later = np.array([
        transport(system.topology, rates, drives, evolve(system, state, t, method=method)).t_probe for t in tau
    ])
    corr = correlators(system, state, tau, method=method)
    G = _intensity_correlation(corr, beta, t_now, t_later)
    return G2Curve(tau, G / (t_now * t_later))


def maximize_coherent_amplification(topology, rates: RateSet, omega_p: float, bracket=None, tol=1e-6):
    """Largest exact coherent gain over the drive Rabi frequency (resonant beams).

    Returns ``(omega_d, eta_c)``.  The search is a bounded golden-section style
    scalar minimisation in ``log(omega_d)``.
    """
    topology = Topology.parse(topology)
    if bracket is None:
        if topology is Topology.LAMBDA:
            centre = critical_drive_lambda(rates)
        else:
            centre = np.sqrt(6 * rates.gamma_p * max(rates.gamma_nr, rates.gamma_p))
        bracket = (centre / 30, centre * 30)

    def neg(log_od):
        drives = DriveSet(omega_p, float(np.exp(log_od)))
        ss = steady_state(build_system(topology, rates, drives))
        return -coherent_amplification(topology, rates, drives, ss)

    res = minimize_scalar(neg, bounds=np.log(bracket), method="bounded", options={"xatol": tol})
    return float(np.exp(res.x)), float(-res.fun)


def maximize_coherent_amplification_approx(topology, rates: RateSet, bracket=None, tol=1e-9):
    """Largest closed-form weak-probe coherent gain over the drive; returns ``(omega_d, eta_c)``."""
    topology = Topology.parse(topology)
    if topology is Topology.LAMBDA and rates.gamma_nr > 0 and bracket is None:
        od = critical_drive_lambda(rates)
        return od, coherent_amplification_approx(topology, rates, DriveSet(1.0, od))
    if bracket is None:
        centre = np.sqrt(6 * rates.gamma_p * max(rates.gamma_nr, rates.gamma_p))
        bracket = (centre / 30, centre * 30)

    def neg(log_od):
        return -coherent_amplification_approx(topology, rates, DriveSet(1.0, float(np.exp(log_od))))

    res = minimize_scalar(neg, bounds=np.log(bracket), method="bounded", options={"xatol": tol})
    return float(np.exp(res.x)), float(-res.fun)
