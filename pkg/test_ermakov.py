#!/usr/bin/env python3
"""
Tests for the angle schedules and the Ermakov solver
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from spectroscopy.molecule import get_molecule, potential_elements
from propagation.schedule import (
    AngleSchedule, ScheduleError, breakpoints, kinetic_at, kinetic_on_segment, segments,
    theta_at, theta_rate, theta_series
)
from propagation.ermakov import (
    ErmakovState, NonPositiveKinetic, SolverConfig, StepSizeUnderflow, companion_linear_check,
    initial_conditions, integrate, integrate_mode, pinney_closed_form
)

# Constant coefficients close to the water stretch
G_CONST = 1.0625
F_CONST = 0.4874
OMEGA = math.sqrt(G_CONST * F_CONST)
ALPHA_EQ = (G_CONST / F_CONST) ** 0.25


def _constant(G=G_CONST, F=F_CONST):
    return (lambda t: (G, 0.0)), (lambda t: F)


@pytest.fixture(scope='module')
def water_adiabatic():
    """Both modes of H2O along the default adiabatic schedule"""
    spec = get_molecule('H2O')
    sched = AngleSchedule('adiabatic', spec.theta0, spec.thetaf, k=0.05)
    return spec, sched, integrate(spec, sched, SolverConfig(), t_end=100.0, t_start=-100.0)


# ---------------------------------------------------------------- schedules

def test_adiabatic_profile():
    """theta(0) sits a third of the way; the tails reach the end angles"""
    s = AngleSchedule('adiabatic', 104.5, 180.0, k=0.05)
    assert theta_at(s, 0.0) == pytest.approx(104.5 + 75.5 / 3, rel=1e-14)
    assert theta_at(s, -500.0) == pytest.approx(104.5, abs=1e-12)
    assert theta_at(s, 500.0) == pytest.approx(180.0, abs=1e-12)
    values = theta_series(s, np.linspace(-200, 200, 81))
    assert np.all(np.diff(values) > 0)


@pytest.mark.parametrize('t', [-30.0, -2.0, 0.0, 7.5, 40.0])
def test_adiabatic_rate_matches_derivative(t):
    """theta_rate agrees with a central difference"""
    s = AngleSchedule('adiabatic', 116.8, 180.0, k=0.05)
    h = 1e-4
    numeric = (theta_at(s, t + h) - theta_at(s, t - h)) / (2 * h)
    assert theta_rate(s, t) == pytest.approx(numeric, rel=1e-6)


def test_linear_and_sudden_profiles():
    """Ramp between t0 and tf; jump at t0"""
    ramp = AngleSchedule('linear', 100.0, 180.0, t0=0.0, tf=80.0)
    assert theta_at(ramp, -1.0) == 100.0
    assert theta_at(ramp, 40.0) == pytest.approx(140.0)
    assert theta_at(ramp, 100.0) == 180.0
    assert theta_rate(ramp, 10.0) == pytest.approx(1.0)
    assert breakpoints(ramp) == [0.0, 80.0]

    jump = AngleSchedule('sudden', 180.0, 104.5, t0=5.0)
    assert theta_at(jump, 4.999) == 180.0
    assert theta_at(jump, 5.0) == 104.5
    assert theta_rate(jump, 5.0) == 0.0
    assert breakpoints(jump) == [5.0]
    assert breakpoints(AngleSchedule('adiabatic', 100.0, 180.0, k=0.1)) == []


def test_segments_split_and_reverse():
    """Pieces cover the interval in the requested direction"""
    ramp = AngleSchedule('linear', 100.0, 180.0, t0=0.0, tf=80.0)
    assert segments(ramp, -10.0, 100.0) == [(-10.0, 0.0), (0.0, 80.0), (80.0, 100.0)]
    assert segments(ramp, 100.0, -10.0) == [(100.0, 80.0), (80.0, 0.0), (0.0, -10.0)]
    assert segments(ramp, 10.0, 20.0) == [(10.0, 20.0)]


@pytest.mark.parametrize('kwargs', [
    {'kind': 'cubic'},
    {'kind': 'linear'},
    {'kind': 'linear', 'tf': -5.0},
    {'kind': 'adiabatic', 'k': 0.0},
    {'kind': 'adiabatic', 'k': 0.05, 'theta0': 200.0},
])
def test_schedule_validation(kwargs):
    """Missing or invalid parameters are rejected"""
    params = {'theta0': 104.5, 'thetaf': 180.0}
    params.update(kwargs)
    with pytest.raises(ScheduleError):
        AngleSchedule(**params)


def test_kinetic_elements():
    """G_gg + G_uu = 2 g_rr and the rates follow the chain rule"""
    spec = get_molecule('O3')
    s = AngleSchedule('adiabatic', spec.theta0, spec.thetaf, k=0.05)
    g_rr = 1.0 / spec.m_terminal + 1.0 / spec.m_central
    h = 1e-4
    for t in (-20.0, 0.0, 15.0):
        kin = kinetic_at(spec, s, t)
        assert kin.G_gg + kin.G_uu == pytest.approx(2 * g_rr, rel=1e-14)
        assert kin.Gdot_gg == pytest.approx(-kin.Gdot_uu)
        numeric = (kinetic_at(spec, s, t + h).G_gg - kinetic_at(spec, s, t - h).G_gg) / (2 * h)
        assert kin.Gdot_gg == pytest.approx(numeric, rel=1e-6)
    with pytest.raises(ValueError):
        kin.for_mode('x')


def test_kinetic_on_segment_is_one_sided():
    """At a jump each piece keeps its own side"""
    spec = get_molecule('CO2')
    s = AngleSchedule('sudden', spec.theta0, spec.thetaf, t0=0.0)
    before = kinetic_on_segment(spec, s, -10.0, 0.0)(0.0)
    after = kinetic_on_segment(spec, s, 0.0, 10.0)(0.0)
    assert before == kinetic_at(spec, s, -1.0)
    assert after == kinetic_at(spec, s, 0.0)
    assert before.G_gg != after.G_gg


@pytest.mark.parametrize('name', ['CO2', 'NO2', 'O3', 'H2O'])
def test_kinetic_product_bounded(name):
    """G_gg G_uu <= g_rr^2 over the whole angle range, equal at 90 degrees"""
    spec = get_molecule(name)
    sweep = AngleSchedule('linear', 1.0, 180.0, t0=0.0, tf=179.0)
    g_rr = 1.0 / spec.m_terminal + 1.0 / spec.m_central
    for t in np.linspace(0.0, 179.0, 359):
        kin = kinetic_at(spec, sweep, t)
        assert kin.G_gg * kin.G_uu <= g_rr ** 2 * (1 + 1e-15)
    right = kinetic_at(spec, sweep, 89.0)
    assert theta_at(sweep, 89.0) == pytest.approx(90.0)
    assert right.G_gg * right.G_uu == pytest.approx(g_rr ** 2, rel=1e-14)
    bent = kinetic_at(spec, sweep, spec.theta0 - 1.0)
    assert bent.G_gg * bent.G_uu < g_rr ** 2


def test_sudden_kinetic_is_piecewise_constant():
    """Under a jump G is flat on each side of t0 and never moves in between"""
    spec = get_molecule('CO2')
    s = AngleSchedule('sudden', spec.theta0, spec.thetaf, t0=0.0)
    before = [kinetic_at(spec, s, t) for t in np.linspace(-50.0, -1e-9, 41)]
    after = [kinetic_at(spec, s, t) for t in np.linspace(0.0, 50.0, 41)]
    assert all(kin == before[0] for kin in before)
    assert all(kin == after[0] for kin in after)
    assert before[0].Gdot_gg == before[0].Gdot_uu == after[0].Gdot_gg == 0.0
    for traj in integrate(spec, s, SolverConfig(), t_end=50.0, t_start=-50.0):
        early = traj.times < 0.0
        assert np.all(traj.G[early] == traj.G[0])
        assert np.all(traj.G[~early] == traj.G[-1])
        assert traj.G[0] != traj.G[-1]
        assert np.all(traj.Gdot == 0.0)


# ---------------------------------------------------------------- solver

def test_solver_config_validation():
    """Method and tolerances are checked"""
    with pytest.raises(ValueError):
        SolverConfig(method='Euler')
    with pytest.raises(ValueError):
        SolverConfig(rel_tol=0.0)
    cfg = SolverConfig().with_tolerance(1e-8)
    assert (cfg.rel_tol, cfg.abs_tol) == (1e-8, pytest.approx(1e-10))


def test_initial_conditions():
    """Stationary width (G/F)^(1/4)"""
    state = initial_conditions(G_CONST, F_CONST)
    assert state.alpha == pytest.approx(ALPHA_EQ)
    assert (state.alpha_dot, state.phi) == (0.0, 0.0)
    with pytest.raises(ValueError):
        initial_conditions(-1.0, F_CONST)
    with pytest.raises(ValueError):
        ErmakovState(0.0, 0.0, 0.0)


def test_pinney_closed_form_equilibrium_phase():
    """Phase grows as omega t across many half periods"""
    t = np.linspace(0.0, 50.0, 1001)
    state = pinney_closed_form(initial_conditions(G_CONST, F_CONST), G_CONST, F_CONST, t)
    assert_allclose(state.alpha, ALPHA_EQ, rtol=1e-14)
    assert_allclose(state.alpha_dot, 0.0, atol=1e-13)
    assert_allclose(state.phi, OMEGA * t, rtol=1e-12, atol=1e-12)


def test_integrate_mode_matches_closed_form():
    """Random initial data over ten half periods"""
    rng = np.random.default_rng(2024)
    kinetic, potential = _constant()
    t_end = 10 * math.pi / OMEGA
    for _ in range(20):
        state0 = ErmakovState(
            alpha=ALPHA_EQ * rng.uniform(0.7, 1.4),
            alpha_dot=ALPHA_EQ * OMEGA * rng.normal(0.0, 0.2),
            phi=rng.uniform(-math.pi, math.pi),
        )
        traj = integrate_mode(kinetic, potential, state0, (0.0, t_end))
        exact = pinney_closed_form(state0, G_CONST, F_CONST, traj.times)
        assert_allclose(traj.alpha, exact.alpha, rtol=1e-8)
        assert_allclose(traj.phi, exact.phi, rtol=1e-7, atol=1e-7)


def test_equilibrium_is_stationary():
    """alpha stays at its equilibrium over 10^4 fs"""
    kinetic, potential = _constant()
    cfg = SolverConfig(output_stride=10.0)
    traj = integrate_mode(kinetic, potential, initial_conditions(G_CONST, F_CONST), (0.0, 1e4), cfg)
    assert np.max(np.abs(traj.alpha / ALPHA_EQ - 1.0)) < 1e-10
    assert traj.phi[-1] == pytest.approx(OMEGA * 1e4, rel=1e-9)


@pytest.mark.parametrize('name', ['CO2', 'NO2', 'O3', 'H2O'])
def test_molecule_equilibrium_over_long_run(name):
    """With the angle held fixed both widths stay at equilibrium for 10^4 fs"""
    spec = get_molecule(name)
    fixed = AngleSchedule('adiabatic', spec.theta0, spec.theta0, k=0.05)
    trajs = integrate(spec, fixed, SolverConfig(output_stride=10.0), t_end=1e4, t_start=0.0)
    F = dict(zip(('g', 'u'), potential_elements(spec)))
    for traj in trajs:
        G = traj.G[0]
        assert np.all(traj.G == G)
        assert traj.alpha0 == pytest.approx((G / F[traj.mode]) ** 0.25, rel=1e-15)
        assert np.max(np.abs(traj.alpha / traj.alpha0 - 1.0)) < 1e-10
        assert traj.phi[-1] == pytest.approx(math.sqrt(G * F[traj.mode]) * 1e4, rel=1e-9)


def test_tighter_tolerance_reduces_error():
    """Error against the closed form decreases with rel_tol"""
    kinetic, potential = _constant()
    state0 = ErmakovState(1.3 * ALPHA_EQ, 0.1, 0.0)
    t_end = 10 * math.pi / OMEGA

    def error(rel_tol):
        cfg = SolverConfig().with_tolerance(rel_tol)
        traj = integrate_mode(kinetic, potential, state0, (0.0, t_end), cfg)
        exact = pinney_closed_form(state0, G_CONST, F_CONST, traj.times)
        return np.max(np.abs(traj.alpha - exact.alpha))

    assert error(1e-10) < error(1e-5)


def test_alpha_collapse_raises_underflow():
    """A very wide initial state swings through alpha -> 0"""
    kinetic, potential = _constant()
    state0 = ErmakovState(1e4 * ALPHA_EQ, 0.0, 0.0)
    with pytest.raises(StepSizeUnderflow):
        integrate_mode(kinetic, potential, state0, (0.0, 10.0))


def test_non_positive_kinetic_raises():
    """G <= 0 aborts the integration"""
    kinetic, potential = _constant(G=-1.0)
    with pytest.raises(NonPositiveKinetic):
        integrate_mode(kinetic, potential, ErmakovState(1.0, 0.0, 0.0), (0.0, 1.0))


def test_integrate_mode_rejects_empty_span():
    kinetic, potential = _constant()
    with pytest.raises(ValueError):
        integrate_mode(kinetic, potential, ErmakovState(1.0, 0.0, 0.0), (3.0, 3.0))


def test_integrate_starts_stationary(water_adiabatic):
    """Both modes start at their equilibrium widths on a common time grid"""
    spec, sched, (traj_g, traj_u) = water_adiabatic
    F_gg, F_uu = potential_elements(spec)
    kin = kinetic_at(spec, sched, -100.0)
    assert traj_g.alpha[0] == pytest.approx((kin.G_gg / F_gg) ** 0.25, rel=1e-14)
    assert traj_u.alpha[0] == pytest.approx((kin.G_uu / F_uu) ** 0.25, rel=1e-14)
    assert_allclose(traj_g.times, traj_u.times)
    assert traj_g.times[0] == -100.0 and traj_g.times[-1] == 100.0
    assert (traj_g.mode, traj_u.mode) == ('g', 'u')
    assert traj_g.statistics.accepted_steps > 0
    assert np.all(traj_g.alpha > 0) and np.all(np.diff(traj_g.phi) > 0)


def test_state_at_matches_samples(water_adiabatic):
    """Dense output agrees with the sampled grid"""
    _, _, (traj_g, _) = water_adiabatic
    i = len(traj_g.times) // 3
    state = traj_g.state_at(float(traj_g.times[i]))
    assert state.alpha == pytest.approx(traj_g.alpha[i], rel=1e-12)
    assert state.phi == pytest.approx(traj_g.phi[i], rel=1e-12)
    G, Gdot, F = traj_g.coefficients_at(float(traj_g.times[i]))
    assert (G, Gdot, F) == (pytest.approx(traj_g.G[i]), pytest.approx(traj_g.Gdot[i]), traj_g.F[i])
    with pytest.raises(ValueError):
        traj_g.state_at(500.0)


def test_companion_invariants(water_adiabatic):
    """Wronskian and modulus of the linear companion stay at 1"""
    _, _, trajs = water_adiabatic
    for traj in trajs:
        assert companion_linear_check(traj) < 1e-7


def test_time_reversal(water_adiabatic):
    """Integrating back from the final state recovers the initial one"""
    spec, sched, (traj_g, _) = water_adiabatic
    F_gg, _ = potential_elements(spec)
    kinetic = lambda t: kinetic_at(spec, sched, t).for_mode('g')  # noqa: E731
    back = integrate_mode(kinetic, lambda t: F_gg, traj_g.state(-1), (100.0, -100.0), mode='g')
    assert back.times[0] == -100.0
    assert back.alpha[0] == pytest.approx(traj_g.alpha[0], rel=1e-6)
    assert back.alpha_dot[0] == pytest.approx(0.0, abs=1e-6)
    assert back.phi[0] == pytest.approx(0.0, abs=1e-6)


def test_sudden_jump_continuity():
    """alpha, alpha_dot/G and phi are continuous across the jump"""
    spec = get_molecule('CO2')
    sched = AngleSchedule('sudden', spec.theta0, spec.thetaf, t0=0.0)
    traj_g, traj_u = integrate(spec, sched, SolverConfig(), t_end=20.0, t_start=-20.0)
    for traj in (traj_g, traj_u):
        assert traj.statistics.pieces == 2
        before, after = traj.pieces
        a_before, ad_before, phi_before = before.solution(0.0)
        a_after, ad_after, phi_after = after.solution(0.0)
        G_before, G_after = before.kinetic(0.0)[0], after.kinetic(0.0)[0]
        assert G_before != G_after
        assert a_after == pytest.approx(a_before, rel=1e-12)
        assert ad_after / G_after == pytest.approx(ad_before / G_before, rel=1e-9, abs=1e-14)
        assert phi_after == pytest.approx(phi_before, rel=1e-12)
        assert companion_linear_check(traj) < 1e-7
