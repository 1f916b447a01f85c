import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from waveguide3le import DriveSet, RateSet, Topology, build_system, classical_drive_system, initial_state
from waveguide3le.model import FRAMES, SLOT_LABELS

rate = st.floats(1e-4, 0.1)
small = st.floats(0.0, 0.05)
rabi = st.floats(0.0, 0.1)
detuning = st.floats(-0.1, 0.1)


@given(st.sampled_from(["lambda", "v", "ladder"]), rate, rate, small, rabi, rabi, detuning, detuning, small, small)
@settings(max_examples=150, deadline=None)
def test_generator_matches_master_equation(topology, gp, gd, gg, op, od, dp, dd, l2, l3):
    rates = RateSet(gp, gd, gg, l2, l3)
    system = build_system(topology, rates, DriveSet(op, od, dp, dd))
    R, W = oracles.slot_generator(topology, gp=gp, gd=gd, gg=gg, op=op, od=od, dp=dp, dd=dd, l2=l2, l3=l3)
    np.testing.assert_allclose(system.r_matrix, R, atol=1e-15)
    np.testing.assert_allclose(system.drive_vector, W, atol=1e-15)


def test_topology_aliases():
    assert Topology.parse("Λ") is Topology.LAMBDA
    assert Topology.parse("XI") is Topology.LADDER
    assert Topology.parse(Topology.V) is Topology.V
    with pytest.raises(ValueError):
        Topology.parse("delta")


@pytest.mark.parametrize("bad", [-1e-3, np.nan, np.inf])
def test_rates_must_be_finite_and_non_negative(bad):
    with pytest.raises(ValueError):
        RateSet(bad, 0.01)
    with pytest.raises(ValueError):
        RateSet(0.01, 0.01, gamma_l3=bad)


def test_drives_reject_negative_rabi():
    with pytest.raises(ValueError):
        DriveSet(-1.0, 0.0)


def test_photon_numbers_round_trip():
    rates = RateSet(0.0025, 0.005)
    drives = DriveSet.from_photon_numbers(rates, 0.3, 2.0)
    assert drives.n_probe(rates) == pytest.approx(0.3)
    assert drives.n_drive(rates) == pytest.approx(2.0)
    # one drive photon at these rates is the Rabi frequency used by the Kerr figures
    assert DriveSet.from_photon_numbers(rates, 1.0, 1.0).omega_d == pytest.approx(0.01414, abs=1e-5)


def test_fluxes():
    rates = RateSet(0.01, 0.02)
    drives = DriveSet(0.004, 0.03)
    assert drives.probe_flux(rates) == pytest.approx(0.004**2 / 0.02)
    assert drives.drive_flux(rates) == pytest.approx(0.03**2 / 0.04)


def test_widths():
    rates = RateSet(0.0025, 0.005, 0.001, 0.0028, 0.0118)
    assert rates.gamma_tilde == pytest.approx(0.015)
    assert rates.width_32 == pytest.approx(0.015 + 0.0118 + 0.0028)
    assert rates.width_21_primed == pytest.approx(0.005 + 0.0028)
    assert rates.width_31_primed == pytest.approx(0.01 + 0.0118)
    assert rates.scaled(2).gamma_l3 == pytest.approx(0.0236)


def test_system_is_read_only():
    system = build_system("v", RateSet(0.01, 0.01, 0.1), DriveSet(0.005, 0.09))
    with pytest.raises(ValueError):
        system.r_matrix[0, 0] = 1.0
    assert system.slot_labels == SLOT_LABELS[Topology.V]
    assert system.slot("S3") == 1


def test_classical_drive_removes_drive_decay():
    rates = RateSet(0.01, 0.01, 0.02)
    system = classical_drive_system(rates, DriveSet(0.005, 0.03))
    assert system.rates.gamma_d == 0.0
    assert system.topology is Topology.LAMBDA


def test_initial_state_is_ground_state():
    for topology in Topology:
        state = initial_state(topology)
        assert state.population(1) == 1.0
        assert state.population(2) == 0.0
        assert state.population(3) == 0.0


def test_frames():
    assert FRAMES[Topology.LAMBDA].phase(1, 1) == "1"
    assert "w_p" in FRAMES[Topology.V].phase(1, 2)
