import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

import oracles
from waveguide3le import DriveSet, RateSet, build_system, steady_state
from waveguide3le import observables as obs
from waveguide3le.errors import DivisionByZero, UndefinedCoefficient, UnsupportedTopology
from waveguide3le.observables import TransportCoefficients

rate = st.floats(1e-3, 0.05)
rabi = st.floats(1e-4, 0.1)
detuning = st.floats(-0.05, 0.05)
dephasing = st.floats(0.0, 0.02)


def solved(topology, rates, drives):
    return steady_state(build_system(topology, rates, drives))


# transmission, reflection and g2 at zero and finite delay, frozen from the
# density-matrix oracle in tests/oracles.py
FROZEN = [
    ("lambda", RateSet(0.01, 0.01, 0.02), DriveSet(0.005, 0.03),
     4.452390682468327, 3.2954638332652206, (0.7312282012729041, 0.9171610392873422)),
    ("v", RateSet(0.01, 0.01, 0.1), DriveSet(0.005, 0.09),
     10.258689409437098, 9.079974260715897, (0.3580109628049379, 0.9965915678930851)),
    ("ladder", RateSet(0.0025, 0.005, 0.001, 0.0028, 0.0118), DriveSet(0.00707, 0.01414, 0.002),
     0.8543434404210507, 0.12383168823968109, (1.3102434594754662, 1.109057076515553)),
]


@pytest.mark.parametrize("topology,rates,drives,t,r,g2", FROZEN)
def test_frozen_reference_points(topology, rates, drives, t, r, g2):
    state = solved(topology, rates, drives)
    tc = obs.transport(topology, rates, drives, state)
    assert tc.t_probe == pytest.approx(t, rel=1e-10)
    assert tc.r_probe == pytest.approx(r, rel=1e-10)
    curve = obs.g2_curve(build_system(topology, rates, drives), tau_grid=[0.0, 50.0])
    np.testing.assert_allclose(curve.values, g2, rtol=1e-10)


@pytest.mark.parametrize("topology", ["lambda", "v", "ladder"])
def test_g2_curve_matches_density_matrix(topology):
    rates, drives = RateSet(0.01, 0.02, 0.003, 0.0007, 0.0011), DriveSet(0.004, 0.03, 0.002, -0.001)
    taus = np.array([0.0, 1.0, 10.0, 100.0, 1000.0])
    kw = dict(gp=0.01, gd=0.02, gg=0.003, op=0.004, od=0.03, dp=0.002, dd=-0.001, l2=0.0007, l3=0.0011)
    want, _ = oracles.g2_reference(topology, taus, **kw)
    got = obs.g2_curve(build_system(topology, rates, drives), tau_grid=taus)
    np.testing.assert_allclose(got.values, want, rtol=1e-10)
    rk = obs.g2_curve(build_system(topology, rates, drives), tau_grid=taus, method="rk45")
    np.testing.assert_allclose(rk.values, want, rtol=1e-8)


@given(st.sampled_from(["lambda", "v", "ladder"]), rate, rate, rabi, rabi, detuning, detuning, dephasing, dephasing)
@settings(max_examples=100, deadline=None)
def test_each_beam_conserved_without_nonradiative_decay(topology, gp, gd, op, od, dp, dd, l2, l3):
    rates, drives = RateSet(gp, gd, 0.0, l2, l3), DriveSet(op, od, dp, dd)
    tc = obs.transport(topology, rates, drives, solved(topology, rates, drives))
    assert tc.t_probe + tc.r_probe == pytest.approx(1.0, abs=1e-9)
    assert tc.t_drive + tc.r_drive == pytest.approx(1.0, abs=1e-9)


@given(st.sampled_from(["lambda", "v"]), rate, rate, st.floats(1e-3, 0.1), rabi, rabi, detuning, detuning)
@settings(max_examples=100, deadline=None)
def test_photons_exchanged_between_beams(topology, gp, gd, gg, op, od, dp, dd):
    rates, drives = RateSet(gp, gd, gg), DriveSet(op, od, dp, dd)
    tc = obs.transport(topology, rates, drives, solved(topology, rates, drives))
    assert tc.flux_balance() == pytest.approx(0.0, abs=1e-10 * (tc.probe_flux + tc.drive_flux))


@given(rate, rate, st.floats(1e-3, 0.1), rabi, rabi, detuning, detuning, dephasing)
@settings(max_examples=100, deadline=None)
def test_ladder_loses_photons_from_both_beams(gp, gd, gg, op, od, dp, dd, l2):
    rates, drives = RateSet(gp, gd, gg, l2), DriveSet(op, od, dp, dd)
    state = solved("ladder", rates, drives)
    tc = obs.transport("ladder", rates, drives, state)
    assert tc.t_probe <= 1.0 + 1e-10
    # every photon lost is one non-radiative decay from the top level, shared by both beams
    p3 = state.population(3)
    loss_p = tc.probe_flux * (tc.t_probe + tc.r_probe - 1)
    loss_d = tc.drive_flux * (tc.t_drive + tc.r_drive - 1)
    scale = tc.probe_flux + tc.drive_flux
    assert loss_p == pytest.approx(-2 * gg * p3, abs=1e-10 * scale)
    assert loss_d == pytest.approx(-2 * gg * p3, abs=1e-10 * scale)


@given(st.sampled_from(["lambda", "v"]), rate, rate, st.floats(0.0, 0.1), rabi, rabi, detuning, detuning, dephasing)
@settings(max_examples=100, deadline=None)
def test_gain_decomposes_into_coherent_and_incoherent(topology, gp, gd, gg, op, od, dp, dd, l2):
    rates, drives = RateSet(gp, gd, gg, l2), DriveSet(op, od, dp, dd)
    res = obs.amplification(topology, rates, drives)
    assert res.eta_coherent + res.eta_incoherent == pytest.approx(res.eta_total, abs=1e-9 * (1 + abs(res.eta_total)))
    assert res.eta_incoherent >= -1e-12


def test_undefined_coefficients():
    rates = RateSet(0.01, 0.01, 0.02)
    tc = obs.transport("lambda", rates, DriveSet(0.0, 0.03), solved("lambda", rates, DriveSet(0.0, 0.03)))
    with pytest.raises(UndefinedCoefficient):
        tc.t_probe
    assert 0 <= tc.t_drive <= 1
    with pytest.raises(UndefinedCoefficient):
        obs.transport("lambda", rates, DriveSet(0.0, 0.0), solved("lambda", rates, DriveSet(0.0, 0.0)))


def test_ladder_has_no_gain_observables():
    rates, drives = RateSet(0.01, 0.01, 0.02), DriveSet(0.005, 0.03)
    with pytest.raises(UnsupportedTopology):
        obs.coherent_amplification("ladder", rates, drives, solved("ladder", rates, drives))
    with pytest.raises(UnsupportedTopology):
        obs.coherent_gain_parameter("ladder", rates, 0.03)
    with pytest.raises(UnsupportedTopology):
        obs.incoherent_amplification_approx("ladder", rates, drives)


def test_undriven_limits_of_the_closed_form():
    rates = RateSet(0.01, 0.01, 0.1)
    # no drive: a Lambda emitter is transparent, a V emitter a perfect mirror
    assert obs.coherent_amplification_approx("lambda", rates, DriveSet(1e-4, 0.0)) == 0.0
    assert obs.coherent_amplification_approx("v", rates, DriveSet(1e-4, 0.0)) == pytest.approx(-1.0)
    drives = DriveSet(1e-6, 0.0)
    assert obs.coherent_amplification("v", rates, drives, solved("v", rates, drives)) == pytest.approx(-1.0, abs=1e-6)


def test_v_threshold_is_a_zero_of_the_gain_parameter():
    rates = RateSet(0.01, 0.004, 0.1)
    od0 = obs.amplification_threshold_v(rates)
    assert obs.coherent_gain_parameter("v", rates, od0) == pytest.approx(0.0, abs=1e-15)
    assert obs.coherent_gain_parameter("v", rates, 0.9 * od0) < 0 < obs.coherent_gain_parameter("v", rates, 1.1 * od0)
    with pytest.raises(UndefinedCoefficient):
        obs.amplification_threshold_v(RateSet(0.1, 0.01, 0.001))


def test_critical_drive_maximises_lambda_gain_parameter():
    rates = RateSet(0.01, 0.01, 0.02)
    res = minimize_scalar(lambda x: -obs.coherent_gain_parameter("lambda", rates, x), bounds=(1e-4, 1.0),
                          method="bounded", options={"xatol": 1e-12})
    assert obs.critical_drive_lambda(rates) == pytest.approx(res.x, rel=1e-5)
    with pytest.raises(ValueError):
        obs.critical_drive_lambda(RateSet(0.01, 0.01))


def test_incoherent_closed_form_saturates():
    rates = RateSet(0.01, 0.01, 0.02)
    drives = DriveSet(0.002, 1e3)
    limit = 2 * rates.gamma_p * rates.gamma_nr / (drives.probe_flux(rates) * 2 * (rates.gamma_p + rates.gamma_nr))
    assert obs.incoherent_amplification_approx("lambda", rates, drives) == pytest.approx(limit, rel=1e-6)
    assert obs.incoherent_amplification_approx("lambda", rates, DriveSet(0.002, 0.0)) == 0.0


def test_exact_maximisation_agrees_with_a_scan():
    rates = RateSet(0.01, 0.01, 0.02)
    od, eta = obs.maximize_coherent_amplification("lambda", rates, 0.002)
    scan = [obs.coherent_amplification("lambda", rates, DriveSet(0.002, x), solved("lambda", rates, DriveSet(0.002, x)))
            for x in np.linspace(0.005, 0.1, 400)]
    assert eta >= max(scan) - 1e-9
    assert eta == pytest.approx(max(scan), rel=1e-3)
    od_a, eta_a = obs.maximize_coherent_amplification_approx("lambda", rates)
    assert od_a == pytest.approx(obs.critical_drive_lambda(rates))
    assert eta == pytest.approx(eta_a, rel=0.02)
    od_v, eta_v = obs.maximize_coherent_amplification_approx("v", RateSet(0.01, 0.01, 0.1))
    assert eta_v > 0


def test_g2_zero_closed_form():
    assert obs.g2_zero(TransportCoefficients(1.0, 0.0, None, None)) == 1.0
    with pytest.raises(DivisionByZero):
        obs.g2_zero(TransportCoefficients(0.0, 1.0, None, None))


def test_transient_g2_reduces_to_stationary():
    system = build_system("lambda", RateSet(0.01, 0.01, 0.02), DriveSet(0.005, 0.03))
    taus = np.array([0.0, 10.0, 100.0])
    a = obs.g2_transient(system, steady_state(system), taus)
    b = obs.g2_curve(system, tau_grid=taus)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-9)


def test_g2_antibunching_and_bunching_regimes():
    strong = obs.g2_curve(build_system("v", RateSet(0.01, 0.01, 0.1), DriveSet(0.005, 0.09)), tau_grid=[0.0])
    weak = obs.g2_curve(build_system("lambda", RateSet(0.01, 0.01, 0.02), DriveSet(0.005, 0.005)), tau_grid=[0.0])
    assert strong.values[0] < 1 <= weak.values[0]
