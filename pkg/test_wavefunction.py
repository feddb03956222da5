#!/usr/bin/env python3
"""
Tests for the reconstructed Fock wavefunctions
"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import eval_hermite

from spectroscopy.units import HBAR
from spectroscopy.molecule import get_molecule
from propagation.schedule import AngleSchedule
from propagation.ermakov import ErmakovState, SolverConfig, integrate, integrate_mode
from propagation.dynamics import uncertainties
from propagation.wavefunction import (
    DEFAULT_POINTS, GridTooNarrow, default_grid, density_frame, eval_psi, hermite_functions, momentum_variance,
    overlap, position_moments, schrodinger_residual
)

G_CONST = 1.0625
F_CONST = 0.4874


@pytest.fixture(scope='module')
def breathing():
    """A squeezed state oscillating in a constant well"""
    state0 = ErmakovState(1.3 * (G_CONST / F_CONST) ** 0.25, 0.2, 0.0)
    return integrate_mode(lambda t: (G_CONST, 0.0), lambda t: F_CONST, state0, (0.0, 20.0))


@pytest.fixture(scope='module')
def water_gerade():
    spec = get_molecule('H2O')
    sched = AngleSchedule('adiabatic', spec.theta0, spec.thetaf, k=0.05)
    return integrate(spec, sched, SolverConfig(), 40.0, t_start=-40.0)[0]


def test_hermite_functions_match_scipy():
    """Recurrence agrees with the explicit normalized Hermite functions"""
    x = np.linspace(-6.0, 6.0, 201)
    values = hermite_functions(8, x)
    assert values.shape == (9, 201)
    for n in range(9):
        explicit = eval_hermite(n, x) * np.exp(-0.5 * x ** 2) / math.sqrt(
            2.0 ** n * math.factorial(n) * math.sqrt(math.pi))
        assert_allclose(values[n], explicit, rtol=1e-10, atol=1e-13)


def test_hermite_functions_high_order_orthonormal():
    """Orders well beyond factorial overflow stay orthonormal"""
    x = np.linspace(-40.0, 40.0, 8001)
    values = hermite_functions(200, x)
    dx = x[1] - x[0]
    gram = values[[0, 50, 199, 200]] @ values[[0, 50, 199, 200]].T * dx
    assert_allclose(gram, np.eye(4), atol=1e-10)


@pytest.mark.parametrize('n', [0, 1, 2, 5])
def test_eval_psi_moments(n):
    """Norm, <S> and Var S / Var P agree with the closed-form uncertainties"""
    st = ErmakovState(0.8, 0.3, 1.7)
    G = 0.9
    wf = eval_psi(st, G, n, default_grid(st, n, points=4096))
    s2S, s2P, _ = uncertainties(st, G, n)
    mean, var = position_moments(wf)
    assert wf.norm() == pytest.approx(1.0, abs=1e-10)
    assert mean == pytest.approx(0.0, abs=1e-12)
    assert var == pytest.approx(s2S, rel=1e-8)
    assert momentum_variance(wf) == pytest.approx(s2P, rel=1e-6)


def test_fock_states_orthonormal():
    """Fock states of the same Ermakov state form an orthonormal set"""
    st = ErmakovState(1.1, -0.4, 0.3)
    grid = default_grid(st, 6, points=4096)
    waves = [eval_psi(st, 0.7, n, grid) for n in range(6)]
    for i, a in enumerate(waves):
        for j, b in enumerate(waves):
            assert abs(overlap(a, b) - (1.0 if i == j else 0.0)) < 1e-9


def test_grid_too_narrow():
    """The grid must span at least six standard deviations"""
    st = ErmakovState(1.0, 0.0, 0.0)
    sigma = math.sqrt(0.5 * HBAR) * st.alpha
    with pytest.raises(GridTooNarrow):
        eval_psi(st, 1.0, 0, np.linspace(-2 * sigma, 2 * sigma, 256))
    with pytest.raises(ValueError):
        eval_psi(st, 1.0, -1, default_grid(st, 0))


def test_overlap_requires_shared_grid():
    st = ErmakovState(1.0, 0.0, 0.0)
    a = eval_psi(st, 1.0, 0, default_grid(st, 0, points=512))
    b = eval_psi(st, 1.0, 0, default_grid(st, 0, points=256))
    with pytest.raises(ValueError):
        overlap(a, b)


@pytest.mark.parametrize('n', [0, 1, 2])
def test_schrodinger_residual_constant_well(breathing, n):
    """The reconstructed state solves the Schrodinger equation"""
    assert schrodinger_residual(breathing, n) < 1e-4


def test_schrodinger_residual_grid_refinement(breathing):
    """A coarse spatial stencil leaves a larger residual"""
    times = [5.0, 10.0]
    coarse = schrodinger_residual(breathing, 0, times=times, points=256)
    fine = schrodinger_residual(breathing, 0, times=times, points=1024)
    assert fine < coarse


def test_schrodinger_residual_driven(water_gerade):
    """Residual stays small with time-dependent G(t)"""
    assert schrodinger_residual(water_gerade, 1, times=[-20.0, 0.0, 20.0]) < 1e-3


def test_schrodinger_residual_rejects_end_times(breathing):
    with pytest.raises(ValueError):
        schrodinger_residual(breathing, 0, times=[0.0])


def test_density_frame(water_gerade):
    """Long-format density slices integrate to one"""
    frame = density_frame(water_gerade, 2, times=[-40.0, 0.0, 40.0], points=512)
    assert list(frame.columns) == ['t_fs', 'mode', 'n', 'S', 'density']
    assert len(frame) == 3 * 512
    assert set(frame['mode']) == {'g'}
    for _, group in frame.groupby('t_fs'):
        S = group['S'].to_numpy()
        assert np.sum(group['density']) * (S[1] - S[0]) == pytest.approx(1.0, abs=1e-8)


def test_density_frame_default_grid(water_gerade):
    """Without a points argument the slices use the standard grid size"""
    frame = density_frame(water_gerade, 0, times=[0.0])
    assert DEFAULT_POINTS == 4096
    assert len(frame) == DEFAULT_POINTS
    S = frame['S'].to_numpy()
    assert np.sum(frame['density']) * (S[1] - S[0]) == pytest.approx(1.0, abs=1e-10)
