#!/usr/bin/env python3
"""
Tests for the observables of the time-dependent Fock states
"""
import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from spectroscopy.units import HBAR
from spectroscopy.molecule import (
    get_molecule, normal_frequencies, omega0, reduced_mass, with_scaled_coupling
)
from spectroscopy.algebra import (
    ResonanceWeights, appendix_map_coeffs, local_boson_map, local_polyad_from_map
)
from propagation.schedule import AngleSchedule, theta_at
from propagation.ermakov import ErmakovState, SolverConfig, integrate
from propagation.dynamics import (
    FRAME_GROUPS, MisalignedSeries, ModeOccupation, energy_correlation, local_polyad_amplitude,
    local_polyad_mean, mean_hamiltonian, normal_polyad_mean, observable_series, polyad_states,
    relative_splitting, stationary_energy, stationary_zeta, states_up_to, uncertainties,
    zeta_from_trajectories, zeta_t
)

T_START, T_END = -100.0, 150.0


def _adiabatic(name, k=0.05):
    spec = get_molecule(name)
    sched = AngleSchedule('adiabatic', spec.theta0, spec.thetaf, k=k)
    return spec, sched, integrate(spec, sched, SolverConfig(), T_END, t_start=T_START)


@pytest.fixture(scope='module')
def water():
    return _adiabatic('H2O')


@pytest.fixture(scope='module')
def ozone():
    return _adiabatic('O3')


# ---------------------------------------------------------------- states

def test_mode_occupation():
    """Labels, polyad number and validation"""
    occ = ModeOccupation(2, 1)
    assert (occ.polyad, occ.label) == (3, '2_1')
    assert (occ.for_mode('g'), occ.for_mode('u')) == (2, 1)
    with pytest.raises(ValueError):
        ModeOccupation(-1, 0)
    with pytest.raises(ValueError):
        occ.for_mode('x')


def test_polyad_states():
    """Members ordered by decreasing n_g; A1 members have even n_u"""
    assert [s.label for s in polyad_states(2)] == ['2_0', '1_1', '0_2']
    assert [s.label for s in polyad_states(4, symmetric_only=True)] == ['4_0', '2_2', '0_4']
    assert len(states_up_to(2)) == 6
    with pytest.raises(ValueError):
        polyad_states(-1)


# ---------------------------------------------------------------- uncertainties

def test_uncertainties_stationary():
    """Stationary widths and vanishing covariance"""
    alpha0 = 0.9
    s2S, s2P, sSP = uncertainties(ErmakovState(alpha0, 0.0, 0.0), 1.0, 2)
    assert s2S == pytest.approx(2.5 * HBAR * alpha0 ** 2)
    assert s2P == pytest.approx(2.5 * HBAR / alpha0 ** 2)
    assert sSP == 0.0
    with pytest.raises(ValueError):
        uncertainties(ErmakovState(alpha0, 0.0, 0.0), 1.0, -1)


def test_uncertainty_product_identity_random():
    """sigma2_S sigma2_P - sigma_SP^2 = (hbar/2)^2 (2n+1)^2 for any state"""
    rng = np.random.default_rng(5)
    st = ErmakovState(rng.uniform(0.1, 3.0, 100), rng.normal(0.0, 2.0, 100), np.zeros(100))
    G = rng.uniform(0.05, 2.0, 100)
    for n in range(4):
        s2S, s2P, sSP = uncertainties(st, G, n)
        assert_allclose(s2S * s2P - sSP ** 2, (0.5 * HBAR * (2 * n + 1)) ** 2, rtol=1e-9)


def test_uncertainty_product_along_trajectory(water):
    spec, _, trajs = water
    for occ in states_up_to(2):
        assert observable_series(trajs, occ, spec).uncertainty_product_deviation() < 1e-9


def test_series_frame_groups(water):
    """Column groups come out in a fixed order behind t_fs"""
    spec, _, trajs = water
    series = observable_series(trajs, ModeOccupation(1, 1), spec)
    full = series.to_frame()
    assert list(full.columns) == [
        't_fs', 'E_1_1',
        'sigma2_S_g_1_1', 'sigma2_P_g_1_1', 'sigma_SP_g_1_1',
        'sigma2_S_u_1_1', 'sigma2_P_u_1_1', 'sigma_SP_u_1_1',
        'PL_mean_1_1', 'PN_invariant_1_1', 'PN_stationary_op_1_1',
    ]
    assert len(full) == len(trajs[0].times)
    assert_allclose(full['E_1_1'], series.mean_H)
    assert (full['PN_invariant_1_1'] == 2).all()
    polyads = series.to_frame(('polyads',))
    assert list(polyads.columns) == ['t_fs', 'PL_mean_1_1', 'PN_invariant_1_1', 'PN_stationary_op_1_1']
    assert set(FRAME_GROUPS) == {'energies', 'uncertainties', 'polyads'}
    with pytest.raises(ValueError):
        series.to_frame(('energies', 'spectra'))


# ---------------------------------------------------------------- energies

def test_initial_energy_is_stationary(water):
    """<H>(t_start) equals the harmonic energy at the initial angle"""
    spec, sched, trajs = water
    theta = theta_at(sched, T_START)
    for occ in states_up_to(3):
        assert mean_hamiltonian(trajs, occ)[0] == pytest.approx(
            stationary_energy(spec, theta, occ), rel=1e-12)


def test_slow_schedule_follows_stationary_energy(water):
    """The adiabatic run ends close to the stationary energy at the final angle"""
    spec, sched, trajs = water
    theta = theta_at(sched, T_END)
    for occ in (ModeOccupation(0, 0), ModeOccupation(1, 0), ModeOccupation(0, 1)):
        assert mean_hamiltonian(trajs, occ)[-1] == pytest.approx(
            stationary_energy(spec, theta, occ), rel=1e-3)


def test_water_polyads_do_not_overlap(water):
    """Every member of polyad P stays below every member of polyad P + 1"""
    _, _, trajs = water
    for polyad in range(4):
        lower = np.max([mean_hamiltonian(trajs, s) for s in polyad_states(polyad)], axis=0)
        upper = np.min([mean_hamiltonian(trajs, s) for s in polyad_states(polyad + 1)], axis=0)
        assert np.all(lower < upper)


@pytest.mark.parametrize('fixture', ['water', 'ozone'])
def test_polyad_levels_ordered_at_start(fixture, request):
    """Within a polyad the energies climb with n_u when omega_u > omega_g and fall otherwise"""
    spec, sched, trajs = request.getfixturevalue(fixture)
    omega_g, omega_u = normal_frequencies(spec, theta_at(sched, T_START))
    direction = np.sign(omega_u - omega_g)
    assert direction != 0
    for polyad in range(1, 5):
        levels = np.array([mean_hamiltonian(trajs, s)[0] for s in polyad_states(polyad)])
        assert np.all(np.sign(np.diff(levels)) == direction)


@pytest.mark.parametrize('sched', [
    AngleSchedule('sudden', 104.5, 180.0, t0=0.0),
    AngleSchedule('linear', 104.5, 180.0, t0=0.0, tf=50.0),
], ids=['sudden', 'linear'])
def test_energy_constant_before_switch(sched):
    """Nothing moves before t0: <H> stays at its initial value"""
    spec = get_molecule('H2O')
    trajs = integrate(spec, sched, SolverConfig(), 50.0, t_start=-50.0)
    early = trajs[0].times < sched.t0
    assert early.sum() > 10
    for occ in (ModeOccupation(0, 0), ModeOccupation(1, 0), ModeOccupation(0, 2)):
        energy = mean_hamiltonian(trajs, occ)
        assert np.max(np.abs(energy[early] / energy[0] - 1.0)) < 1e-9
        assert energy[-1] != pytest.approx(energy[0], rel=1e-6)


def test_misaligned_trajectories_rejected(water):
    _, _, (traj_g, traj_u) = water
    with pytest.raises(MisalignedSeries):
        mean_hamiltonian((traj_u, traj_g), ModeOccupation(0, 0))


# ---------------------------------------------------------------- polyads

def test_normal_polyad_initial_match(water):
    """The stationary normal polyad starts at its invariant value"""
    _, _, trajs = water
    for occ in states_up_to(3):
        result = normal_polyad_mean(trajs, occ, ResonanceWeights(1, 2))
        assert result.invariant == occ.n_g + 2 * occ.n_u
        assert result.stationary_operator[0] == pytest.approx(result.invariant, abs=1e-12)


def test_local_polyad_matches_operator_map(ozone):
    """Closed-form <P_L> equals the explicit boson-map expectation"""
    spec, _, (traj_g, traj_u) = ozone
    mu, w0 = reduced_mass(spec), omega0(spec)
    occ = ModeOccupation(2, 1)
    closed = local_polyad_mean((traj_g, traj_u), occ, mu, w0)
    for i in np.linspace(0, len(traj_g.times) - 1, 12).astype(int):
        chi_g, zeta_g = appendix_map_coeffs(traj_g.alpha[i], traj_g.alpha_dot[i], traj_g.phi[i], traj_g.G[i])
        chi_u, zeta_u = appendix_map_coeffs(traj_u.alpha[i], traj_u.alpha_dot[i], traj_u.phi[i], traj_u.G[i])
        matrix = local_boson_map(chi_g, zeta_g, chi_u, zeta_u, mu, w0)
        assert local_polyad_from_map(matrix, occ.n_g, occ.n_u) == pytest.approx(closed[i], rel=1e-10)
    with pytest.raises(ValueError):
        local_polyad_mean((traj_g, traj_u), occ, mu, 0.0)


def test_ozone_local_polyad_varies_more_than_water(water, ozone):
    """Every second-polyad state of the less local molecule swings further from P_L = 2"""
    amp_water, amp_ozone = [], []
    for occ in polyad_states(2):
        for amps, (spec, _, trajs) in ((amp_water, water), (amp_ozone, ozone)):
            series = observable_series(trajs, occ, spec)
            assert series.mean_PN_invariant == 2
            amps.append(local_polyad_amplitude(series))
    assert max(amp_water) < min(amp_ozone)
    assert max(amp_water) < 0.01 < 0.1 < min(amp_ozone)


def test_local_limit_convergence():
    """Scaling the couplings toward zero flattens <P_L> and merges the modes"""
    base = get_molecule('H2O')
    sched = AngleSchedule('adiabatic', base.theta0, base.thetaf, k=0.05)
    occ = ModeOccupation(1, 0)
    amplitudes, separations = [], []
    for factor in (1.0, 0.5, 0.25, 0.125):
        spec = with_scaled_coupling(base, factor)
        traj_g, traj_u = integrate(spec, sched, SolverConfig(), 100.0, t_start=-100.0)
        amplitudes.append(local_polyad_amplitude(observable_series((traj_g, traj_u), occ, spec)))
        separations.append(float(np.max(np.abs(traj_g.alpha - traj_u.alpha))) / traj_g.alpha0)
    assert all(a > b for a, b in zip(amplitudes, amplitudes[1:]))
    assert all(a > b for a, b in zip(separations, separations[1:]))


# ---------------------------------------------------------------- locality

def test_zeta_t_series():
    """zeta(t) is a named series indexed by time, starting at the model value"""
    spec = get_molecule('H2O')
    sched = AngleSchedule('adiabatic', spec.theta0, spec.thetaf, k=0.05)
    zeta = zeta_t(spec, sched, t_end=50.0, t_start=-100.0)
    assert isinstance(zeta, pd.Series)
    assert (zeta.name, zeta.index.name) == ('zeta', 't_fs')
    assert zeta.iloc[0] == pytest.approx(0.0217, abs=2e-4)
    assert zeta.iloc[0] == pytest.approx(stationary_zeta(spec, theta_at(sched, -100.0)), rel=1e-9)


def test_ozone_fundamentals_cross(ozone):
    """The ozone fundamentals start split, then pass through degeneracy"""
    _, _, trajs = ozone
    split = relative_splitting(trajs)
    assert split[0] == pytest.approx(0.0368, abs=5e-4)
    assert split.min() < split[0] / 10
    zeta = zeta_from_trajectories(trajs)
    assert zeta[-1] > zeta[0]


def test_nitrogen_dioxide_fundamentals_collapse():
    """NO2 passes through near degeneracy on its way to the linear geometry, then splits again"""
    _, _, trajs = _adiabatic('NO2')
    split = relative_splitting(trajs)
    lowest = int(np.argmin(split))
    assert split[lowest] < split[0] / 10
    assert 0 < lowest < len(split) - 1
    assert split[-1] > 10 * split[lowest]


def test_energy_correlation_frame():
    """Stationary energies on a theta grid, optional cm^-1 columns"""
    spec = get_molecule('O3')
    states = [ModeOccupation(1, 0), ModeOccupation(0, 1)]
    grid = np.linspace(spec.theta0, spec.thetaf, 31)
    frame = energy_correlation(spec, grid, states, cm1=True)
    assert list(frame.columns) == ['theta_deg', 'E_1_0', 'E_0_1', 'E_1_0_cm1', 'E_0_1_cm1']
    assert frame['E_1_0'].iloc[0] == pytest.approx(stationary_energy(spec, spec.theta0, states[0]))
    difference = frame['E_1_0'] - frame['E_0_1']
    assert difference.iloc[0] > 0 > difference.iloc[-1]
