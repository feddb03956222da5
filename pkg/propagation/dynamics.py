"""
Quantum observables of the time-dependent Fock states

Everything here is closed-form in the Ermakov solution (alpha, alpha_dot, phi):
uncertainties, mean energy, local and normal polyad expectations, the locality
parameter zeta(t) and stationary energy correlations.
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple
import logging

import numpy as np
import pandas as pd

from spectroscopy.units import HBAR, internal_energy_to_wavenumber
from spectroscopy.molecule import MoleculeSpec, normal_frequencies, omega0, reduced_mass
from spectroscopy.algebra import ResonanceWeights
from .ermakov import (
    DEFAULT_T_START, MODES, ErmakovState, ErmakovTrajectory, SolverConfig, integrate
)
from .schedule import AngleSchedule

logger = logging.getLogger(__name__)

FRAME_GROUPS = ('energies', 'uncertainties', 'polyads')


class MisalignedSeries(ValueError):
    """Trajectories sampled on different time grids"""


@dataclass(frozen=True)
class ModeOccupation:
    """Quantum numbers (n_g, n_u); equally the local pair (n_1, n_2)"""
    n_g: int
    n_u: int

    def __post_init__(self):
        for name in ('n_g', 'n_u'):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value}")

    @property
    def polyad(self) -> int:
        return self.n_g + self.n_u

    @property
    def label(self) -> str:
        return f"{self.n_g}_{self.n_u}"

    def for_mode(self, mode: str) -> int:
        if mode == 'g':
            return self.n_g
        if mode == 'u':
            return self.n_u
        raise ValueError(f"mode must be 'g' or 'u', got '{mode}'")


def polyad_states(polyad: int, symmetric_only: bool = False) -> List[ModeOccupation]:
    """
    Members of a polyad n_g + n_u = P, ordered by decreasing n_g

    Symmetric (A1) members have an even number of ungerade quanta.
    """
    if polyad < 0:
        raise ValueError("polyad must be non-negative")
    states = [ModeOccupation(polyad - n_u, n_u) for n_u in range(polyad + 1)]
    if symmetric_only:
        states = [s for s in states if s.n_u % 2 == 0]
    return states


def states_up_to(max_polyad: int) -> List[ModeOccupation]:
    """All (n_g, n_u) with n_g + n_u <= max_polyad, by polyad"""
    return [s for p in range(max_polyad + 1) for s in polyad_states(p)]


def uncertainties(st: ErmakovState, G, n: int) -> Tuple[float, float, float]:
    """
    Variances and covariance of S and P in the Fock state n

    Parameters
    ----------
    st : ErmakovState
        Ermakov state (fields may be arrays)
    G : float or array
        Kinetic matrix element at the same time(s)
    n : int
        Quantum number

    Returns
    -------
    tuple
        (sigma2_S, sigma2_P, sigma_SP)
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    scale = 0.5 * HBAR * (2 * n + 1)
    alpha = np.asarray(st.alpha, dtype=float)
    ratio = np.asarray(st.alpha_dot, dtype=float) / G
    sigma2_S = scale * alpha ** 2
    sigma2_P = scale * (ratio ** 2 + 1.0 / alpha ** 2)
    sigma_SP = scale * alpha * ratio
    return sigma2_S, sigma2_P, sigma_SP


def _trajectory_state(traj: ErmakovTrajectory) -> ErmakovState:
    return ErmakovState(traj.alpha, traj.alpha_dot, traj.phi)


def _check_aligned(trajs: Sequence[ErmakovTrajectory]):
    g, u = trajs
    if g.mode != 'g' or u.mode != 'u':
        raise MisalignedSeries("expected (gerade, ungerade) trajectories")
    if g.times.shape != u.times.shape or not np.array_equal(g.times, u.times):
        raise MisalignedSeries("gerade and ungerade trajectories use different time grids")


def mode_uncertainties(traj: ErmakovTrajectory, n: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """uncertainties() along a whole trajectory"""
    return uncertainties(_trajectory_state(traj), traj.G, n)


def mean_hamiltonian(trajs: Sequence[ErmakovTrajectory], occ: ModeOccupation,
                     F: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """
    <H>(t) = sum over modes of G/2 sigma2_P + F/2 sigma2_S

    F defaults to the potential stored on each trajectory.
    """
    _check_aligned(trajs)
    total = np.zeros_like(trajs[0].times)
    for index, traj in enumerate(trajs):
        sigma2_S, sigma2_P, _ = mode_uncertainties(traj, occ.for_mode(traj.mode))
        f_mode = traj.F if F is None else F[index]
        total = total + 0.5 * traj.G * sigma2_P + 0.5 * f_mode * sigma2_S
    return total


def local_polyad_mean(trajs: Sequence[ErmakovTrajectory], occ: ModeOccupation,
                      mu: float, omega_ref: float) -> np.ndarray:
    """
    <P_L>(t) of the stationary local polyad n_1 + n_2

    (1/2 hbar) sum over modes [mu omega_ref sigma2_S + sigma2_P/(mu omega_ref)] - 1
    """
    if not omega_ref > 0:
        raise ValueError("omega_ref must be positive")
    _check_aligned(trajs)
    k = mu * omega_ref
    total = np.zeros_like(trajs[0].times)
    for traj in trajs:
        sigma2_S, sigma2_P, _ = mode_uncertainties(traj, occ.for_mode(traj.mode))
        total = total + k * sigma2_S + sigma2_P / k
    return total / (2 * HBAR) - 1.0


@dataclass(frozen=True)
class NormalPolyadMean:
    stationary_operator: np.ndarray  # <P_N>(t) of the t0 normal polyad
    invariant: float  # <P_N(t)> of the invariant polyad, constant


def normal_polyad_mean(trajs: Sequence[ErmakovTrajectory], occ: ModeOccupation,
                       w: ResonanceWeights = ResonanceWeights(),
                       alpha0: Optional[Tuple[float, float]] = None) -> NormalPolyadMean:
    """
    Normal polyad expectations

    Parameters
    ----------
    trajs : tuple
        (gerade, ungerade) trajectories
    occ : ModeOccupation
        Fock state of the invariants
    w : ResonanceWeights
        eta1, eta2
    alpha0 : tuple, optional
        Stationary alpha of each mode at the initial time (defaults to the
        trajectories' initial alpha)

    Returns
    -------
    NormalPolyadMean
        stationary_operator: sum eta [(alpha0^2 sigma2_P + sigma2_S/alpha0^2)/(2 hbar) - 1/2],
        which varies in time; invariant: eta1 n_g + eta2 n_u exactly
    """
    _check_aligned(trajs)
    if alpha0 is None:
        alpha0 = (trajs[0].alpha0, trajs[1].alpha0)
    total = np.zeros_like(trajs[0].times)
    for traj, a0, eta in zip(trajs, alpha0, (w.eta1, w.eta2)):
        sigma2_S, sigma2_P, _ = mode_uncertainties(traj, occ.for_mode(traj.mode))
        total = total + eta * ((a0 ** 2 * sigma2_P + sigma2_S / a0 ** 2) / (2 * HBAR) - 0.5)
    return NormalPolyadMean(stationary_operator=total,
                            invariant=float(w.eta1 * occ.n_g + w.eta2 * occ.n_u))


@dataclass
class ObservableSeries:
    """Observables of one Fock state along a pair of trajectories"""
    occupation: ModeOccupation
    times: np.ndarray
    sigma2_S: Dict[str, np.ndarray]
    sigma2_P: Dict[str, np.ndarray]
    sigma_SP: Dict[str, np.ndarray]
    mean_H: np.ndarray
    mean_PL: np.ndarray
    mean_PN: np.ndarray
    mean_PN_invariant: float

    def uncertainty_product_deviation(self) -> float:
        """Max relative deviation of sigma2_S sigma2_P - sigma_SP^2 from (hbar/2)^2 (2n+1)^2"""
        worst = 0.0
        for mode in MODES:
            n = self.occupation.for_mode(mode)
            target = (0.5 * HBAR * (2 * n + 1)) ** 2
            product = self.sigma2_S[mode] * self.sigma2_P[mode] - self.sigma_SP[mode] ** 2
            worst = max(worst, float(np.max(np.abs(product - target))) / target)
        return worst

    def to_frame(self, groups: Sequence[str] = FRAME_GROUPS) -> pd.DataFrame:
        """
        Columns of this state, labelled with its occupation

        groups selects among 'energies' (E_<ng>_<nu>), 'uncertainties'
        (sigma2_S_<mode>_..., sigma2_P_..., sigma_SP_...) and 'polyads'
        (PL_mean_..., PN_invariant_..., PN_stationary_op_...).
        """
        unknown = [g for g in groups if g not in FRAME_GROUPS]
        if unknown:
            raise ValueError(f"unknown column group(s) {unknown}; expected {FRAME_GROUPS}")
        label = self.occupation.label
        data = {'t_fs': self.times}
        if 'energies' in groups:
            data[f'E_{label}'] = self.mean_H
        if 'uncertainties' in groups:
            for mode in MODES:
                data[f'sigma2_S_{mode}_{label}'] = self.sigma2_S[mode]
                data[f'sigma2_P_{mode}_{label}'] = self.sigma2_P[mode]
                data[f'sigma_SP_{mode}_{label}'] = self.sigma_SP[mode]
        if 'polyads' in groups:
            data[f'PL_mean_{label}'] = self.mean_PL
            data[f'PN_invariant_{label}'] = np.full_like(self.times, self.mean_PN_invariant)
            data[f'PN_stationary_op_{label}'] = self.mean_PN
        return pd.DataFrame(data)


def observable_series(trajs: Sequence[ErmakovTrajectory], occ: ModeOccupation,
                      spec: MoleculeSpec,
                      w: ResonanceWeights = ResonanceWeights()) -> ObservableSeries:
    """All observables of one state; the local polyad uses mu = 1/g_rr and omega0"""
    _check_aligned(trajs)
    sigma2_S, sigma2_P, sigma_SP = {}, {}, {}
    for traj in trajs:
        s, p, c = mode_uncertainties(traj, occ.for_mode(traj.mode))
        sigma2_S[traj.mode], sigma2_P[traj.mode], sigma_SP[traj.mode] = s, p, c
    normal = normal_polyad_mean(trajs, occ, w)
    return ObservableSeries(
        occupation=occ,
        times=trajs[0].times,
        sigma2_S=sigma2_S,
        sigma2_P=sigma2_P,
        sigma_SP=sigma_SP,
        mean_H=mean_hamiltonian(trajs, occ),
        mean_PL=local_polyad_mean(trajs, occ, reduced_mass(spec), omega0(spec)),
        mean_PN=normal.stationary_operator,
        mean_PN_invariant=normal.invariant,
    )


def local_polyad_amplitude(series: ObservableSeries) -> float:
    """sup_t |<P_L>(t) - (n_g + n_u)|"""
    return float(np.max(np.abs(series.mean_PL - series.occupation.polyad)))


def fundamental_energies(trajs: Sequence[ErmakovTrajectory]) -> Tuple[np.ndarray, np.ndarray]:
    """Ground-referenced fundamentals <H>(1,0) - <H>(0,0) and <H>(0,1) - <H>(0,0)"""
    ground = mean_hamiltonian(trajs, ModeOccupation(0, 0))
    nu_g = mean_hamiltonian(trajs, ModeOccupation(1, 0)) - ground
    nu_u = mean_hamiltonian(trajs, ModeOccupation(0, 1)) - ground
    return nu_g, nu_u


def relative_splitting(trajs: Sequence[ErmakovTrajectory]) -> np.ndarray:
    """dE(t)/E_mean(t) of the fundamentals"""
    nu_g, nu_u = fundamental_energies(trajs)
    return np.abs(nu_g - nu_u) / (0.5 * (nu_g + nu_u))


def zeta_from_trajectories(trajs: Sequence[ErmakovTrajectory]) -> np.ndarray:
    """zeta(t) = (2/pi) arctan(dE/E_mean) of the ground-referenced fundamentals"""
    return (2.0 / np.pi) * np.arctan(relative_splitting(trajs))


def zeta_t(spec: MoleculeSpec, sched: AngleSchedule, cfg: SolverConfig = SolverConfig(),
           t_end: float = 400.0, t_start: float = DEFAULT_T_START) -> pd.Series:
    """
    Locality parameter along a schedule

    Returns
    -------
    pandas.Series
        zeta indexed by time in fs
    """
    trajs = integrate(spec, sched, cfg, t_end, t_start=t_start)
    zeta = zeta_from_trajectories(trajs)
    logger.info("%s %s: zeta %.4f -> %.4f", spec.name, sched.kind, zeta[0], zeta[-1])
    return pd.Series(zeta, index=pd.Index(trajs[0].times, name='t_fs'), name='zeta')


def stationary_zeta(spec: MoleculeSpec, theta: float) -> float:
    """Model zeta of the harmonic fundamentals at a fixed angle"""
    omega_g, omega_u = normal_frequencies(spec, theta)
    return float((2.0 / np.pi) * np.arctan(abs(omega_g - omega_u) / (0.5 * (omega_g + omega_u))))


def stationary_energy(spec: MoleculeSpec, theta: float, occ: ModeOccupation) -> float:
    """hbar omega_g (n_g + 1/2) + hbar omega_u (n_u + 1/2) at a fixed angle"""
    omega_g, omega_u = normal_frequencies(spec, theta)
    return HBAR * (omega_g * (occ.n_g + 0.5) + omega_u * (occ.n_u + 0.5))


def energy_correlation(spec: MoleculeSpec, theta_grid: Sequence[float],
                       states: Sequence[ModeOccupation], cm1: bool = False) -> pd.DataFrame:
    """
    Stationary energies as a function of the bond angle

    Parameters
    ----------
    spec : MoleculeSpec
        Molecule; force constants stay at their initial values
    theta_grid : array
        Angles in degrees
    states : list of ModeOccupation
        States to tabulate
    cm1 : bool, optional
        Append E_<ng>_<nu>_cm1 columns

    Returns
    -------
    DataFrame
        theta_deg followed by one E_<ng>_<nu> column per state (internal units)
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    data = {'theta_deg': theta_grid}
    for occ in states:
        data[f'E_{occ.label}'] = np.array([stationary_energy(spec, th, occ) for th in theta_grid])
    frame = pd.DataFrame(data)
    if cm1:
        for occ in states:
            frame[f'E_{occ.label}_cm1'] = internal_energy_to_wavenumber(frame[f'E_{occ.label}'].to_numpy())
    return frame
