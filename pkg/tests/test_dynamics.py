import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from waveguide3le import DriveSet, RateSet, StateVector, build_system, correlators, evolve, initial_state, steady_state, trajectory
from waveguide3le.dynamics import default_tau_grid, steady_states
from waveguide3le.errors import SingularSystem
from waveguide3le.operators import MU, SIGMA, SLOT_OPERATORS

rate = st.floats(1e-3, 0.05)
small = st.floats(0.0, 0.02)
rabi = st.floats(0.0, 0.1)
detuning = st.floats(-0.05, 0.05)
TOPOLOGY = st.sampled_from(["lambda", "v", "ladder"])


def oracle_kwargs(rates, drives):
    return dict(gp=rates.gamma_p, gd=rates.gamma_d, gg=rates.gamma_nr, op=drives.omega_p, od=drives.omega_d,
                dp=drives.delta_p, dd=drives.delta_d, l2=rates.gamma_l2, l3=rates.gamma_l3)


@given(TOPOLOGY, rate, rate, st.floats(1e-3, 0.05), rabi, rabi, detuning, detuning, small, small)
@settings(max_examples=100, deadline=None)
def test_steady_state_matches_density_matrix(topology, gp, gd, gg, op, od, dp, dd, l2, l3):
    rates, drives = RateSet(gp, gd, gg, l2, l3), DriveSet(op, od, dp, dd)
    state = steady_state(build_system(topology, rates, drives))
    reference = oracles.slots_of(oracles.steady_rho(topology, **oracle_kwargs(rates, drives)))
    np.testing.assert_allclose(state.slots, reference, atol=1e-10)
    assert state.conjugate_asymmetry() < 1e-12


def test_steady_state_is_a_valid_density_matrix():
    rates, drives = RateSet(0.01, 0.01, 0.02), DriveSet(0.005, 0.03)
    state = steady_state(build_system("lambda", rates, drives))
    pops = [state.population(k) for k in (1, 2, 3)]
    assert sum(pops) == pytest.approx(1.0)
    assert min(pops) >= 0
    # coherences bounded by populations
    assert abs(state.expect(MU)) ** 2 <= state.population(2) * state.population(3) + 1e-15


def test_batched_steady_states_agree_with_single():
    rates = RateSet(0.01, 0.01, 0.1)
    ods = np.array([0.01, 0.05, 0.09])
    batch = steady_states("v", rates, 0.005, ods, 0.0, 0.0)
    for od, row in zip(ods, batch):
        np.testing.assert_allclose(row, steady_state(build_system("v", rates, DriveSet(0.005, od))).slots, atol=1e-14)


def test_no_relaxation_is_singular():
    with pytest.raises(SingularSystem):
        steady_state(build_system("lambda", RateSet(0.0, 0.0), DriveSet(0.01, 0.01)))


@pytest.mark.parametrize("method", ["rk45", "expm"])
def test_evolution_matches_density_matrix(method):
    rates, drives = RateSet(0.01, 0.02, 0.003, 0.0007, 0.0011), DriveSet(0.004, 0.03, 0.002, -0.001)
    for topology in ("lambda", "v", "ladder"):
        system = build_system(topology, rates, drives)
        rho0 = np.zeros((3, 3), dtype=complex)
        rho0[0, 0] = 1.0
        for t in (1.0, 30.0, 400.0):
            got = evolve(system, initial_state(topology), t, method=method).slots
            want = oracles.slots_of(oracles.evolve_rho(topology, rho0, t, **oracle_kwargs(rates, drives)))
            np.testing.assert_allclose(got, want, atol=1e-9)


def test_long_time_limit_reaches_steady_state():
    rates, drives = RateSet(0.01, 0.01, 0.02), DriveSet(0.005, 0.03)
    system = build_system("lambda", rates, drives)
    late = evolve(system, initial_state("lambda"), 1e7, method="expm")
    np.testing.assert_allclose(late.slots, steady_state(system).slots, atol=1e-13)


def test_trajectory_methods_agree():
    system = build_system("ladder", RateSet(0.0025, 0.005, 0.001, 0.0028, 0.0118), DriveSet(0.007, 0.01414))
    times = [0.0, 10.0, 100.0, 1000.0]
    a = trajectory(system, initial_state("ladder"), times, method="rk45")
    b = trajectory(system, initial_state("ladder"), times, method="expm")
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_state_vector_access():
    state = StateVector(np.arange(8), "lambda")
    assert state["M1"] == 5
    assert state[2] == 2
    with pytest.raises(ValueError):
        state.slots[0] = 1


def test_default_tau_grid_spans_slowest_rate():
    grid = default_tau_grid(RateSet(0.01, 0.001, 0.1))
    assert grid[0] == 0
    assert grid[-1] == pytest.approx(2e4)
    with pytest.raises(SingularSystem):
        default_tau_grid(RateSet(0.0, 0.0))


@pytest.mark.parametrize("topology,zeta", [("lambda", oracles.MU), ("v", oracles.SIGMA)])
def test_correlators_match_regression_on_density_matrix(topology, zeta):
    rates, drives = RateSet(0.01, 0.02, 0.003, 0.0007, 0.0011), DriveSet(0.004, 0.03, 0.002, -0.001)
    system = build_system(topology, rates, drives)
    taus = np.array([0.0, 5.0, 50.0, 500.0])
    corr = correlators(system, steady_state(system), taus)
    kw = oracle_kwargs(rates, drives)
    zd, one = zeta.conj().T, np.eye(3)
    for k in (1, 3, 5, 6):
        v = oracles.SLOTS[k]
        np.testing.assert_allclose(corr.zdag_v[:, k], oracles.two_time(topology, zd, v, one, taus, **kw), atol=1e-12)
        np.testing.assert_allclose(corr.zdag_v_z[:, k], oracles.two_time(topology, zd, v, zeta, taus, **kw), atol=1e-12)
        np.testing.assert_allclose(corr.v_z[:, k], oracles.two_time(topology, one, v, zeta, taus, **kw), atol=1e-12)


def test_correlator_methods_agree_and_factorise_at_long_delay():
    rates, drives = RateSet(0.01, 0.01, 0.1), DriveSet(0.005, 0.09)
    system = build_system("v", rates, drives)
    ss = steady_state(system)
    taus = np.array([0.0, 20.0, 200.0, 1e4])
    a = correlators(system, ss, taus, method="expm")
    b = correlators(system, ss, taus, method="rk45")
    np.testing.assert_allclose(a.zdag_v, b.zdag_v, atol=1e-10)
    np.testing.assert_allclose(a.zdag_v[-1], np.conj(ss.expect(SIGMA)) * ss.slots, atol=1e-12)
    with pytest.raises(ValueError):
        correlators(system, ss, [1.0, 0.5])
    assert len(SLOT_OPERATORS) == 8
