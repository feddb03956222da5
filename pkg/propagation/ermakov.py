"""
Ermakov equation solver for the normal modes of a driven A2B molecule

Integrates  alpha'' - (G'/G) alpha' + G F alpha = G^2 / alpha^3,  phi' = G / alpha^2
for each normal mode with scipy's adaptive embedded Runge-Kutta pairs, piece
by piece between the non-smooth points of the angle schedule.
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy.integrate import solve_ivp

from spectroscopy.molecule import MoleculeSpec, potential_elements
from .schedule import AngleSchedule, kinetic_on_segment, segments

logger = logging.getLogger(__name__)

MODES = ('g', 'u')
DEFAULT_T_START = -200.0  # fs
ALPHA_GUARD = 1e-6  # fraction of the initial alpha
# Steps never exceed 1/STEPS_PER_PERIOD of the harmonic period 2 pi / sqrt(G F)
STEPS_PER_PERIOD = 20

# t -> (G, Gdot) and t -> F for one mode
KineticFn = Callable[[float], Tuple[float, float]]
PotentialFn = Callable[[float], float]


class SolverError(RuntimeError):
    """Base class of integration failures"""


class StepSizeUnderflow(SolverError):
    """The integrator could not continue (step underflow or alpha -> 0)"""


class NonPositiveKinetic(SolverError):
    """G(t) <= 0 was encountered"""


@dataclass(frozen=True)
class ErmakovState:
    """Ermakov amplitude, its derivative and the accumulated phase"""
    alpha: float  # (fs/amu)^(1/2)
    alpha_dot: float  # (fs/amu)^(1/2) / fs
    phi: float  # radians

    def __post_init__(self):
        if not np.all(np.asarray(self.alpha) > 0):
            raise ValueError("alpha must be strictly positive")


@dataclass(frozen=True)
class SolverConfig:
    """Adaptive Runge-Kutta settings"""
    method: str = 'DOP853'
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf  # fs
    output_stride: float = 0.1  # fs

    def __post_init__(self):
        if self.method not in ('DOP853', 'RK45'):
            raise ValueError(f"method must be DOP853 or RK45, got '{self.method}'")
        for name in ('rel_tol', 'abs_tol'):
            value = getattr(self, name)
            if not 0 < value <= 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2], got {value}")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if not self.output_stride > 0:
            raise ValueError("output_stride must be positive")

    def with_tolerance(self, rel_tol: float) -> 'SolverConfig':
        """Same settings with rel_tol replaced and abs_tol = rel_tol/100"""
        return replace(self, rel_tol=rel_tol, abs_tol=rel_tol / 100.0)


@dataclass(frozen=True)
class SolverStatistics:
    accepted_steps: int
    rhs_evaluations: int
    pieces: int


@dataclass(frozen=True)
class _Piece:
    t_a: float
    t_b: float
    solution: object  # scipy OdeSolution
    kinetic: KineticFn
    potential: PotentialFn

    @property
    def lo(self) -> float:
        return min(self.t_a, self.t_b)

    @property
    def hi(self) -> float:
        return max(self.t_a, self.t_b)


@dataclass
class ErmakovTrajectory:
    """Sampled and dense solution of one normal mode"""
    mode: str
    times: np.ndarray  # fs, strictly increasing
    alpha: np.ndarray
    alpha_dot: np.ndarray
    phi: np.ndarray
    G: np.ndarray  # amu^-1
    Gdot: np.ndarray
    F: np.ndarray  # amu / fs^2
    initial: ErmakovState
    t_initial: float
    statistics: SolverStatistics
    config: SolverConfig
    pieces: Tuple[_Piece, ...] = field(repr=False, default=())

    def __post_init__(self):
        n = len(self.times)
        if any(len(a) != n for a in (self.alpha, self.alpha_dot, self.phi, self.G, self.Gdot, self.F)):
            raise ValueError("trajectory arrays must have equal length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def alpha0(self) -> float:
        return self.initial.alpha

    def state(self, i: int) -> ErmakovState:
        return ErmakovState(float(self.alpha[i]), float(self.alpha_dot[i]), float(self.phi[i]))

    def _piece_for(self, t: float) -> _Piece:
        ordered = sorted(self.pieces, key=lambda p: p.lo)
        if not ordered[0].lo <= t <= ordered[-1].hi:
            raise ValueError(f"t = {t} outside the integrated interval "
                             f"[{ordered[0].lo}, {ordered[-1].hi}]")
        for piece in ordered:
            if piece.lo <= t < piece.hi:
                return piece
        return ordered[-1]

    def state_at(self, t: float) -> ErmakovState:
        """Dense-output state at any time inside the integrated interval"""
        alpha, alpha_dot, phi = self._piece_for(t).solution(t)
        return ErmakovState(float(alpha), float(alpha_dot), float(phi))

    def coefficients_at(self, t: float) -> Tuple[float, float, float]:
        """(G, Gdot, F) at time t"""
        piece = self._piece_for(t)
        G, Gdot = piece.kinetic(t)
        return G, Gdot, piece.potential(t)


def initial_conditions(G0: float, F0: float) -> ErmakovState:
    """Stationary data alpha = (G0/F0)^(1/4), alpha_dot = 0, phi = 0"""
    if not (G0 > 0 and F0 > 0):
        raise ValueError("G0 and F0 must be positive")
    return ErmakovState(alpha=(G0 / F0) ** 0.25, alpha_dot=0.0, phi=0.0)


def _output_grid(lo: float, hi: float, stride: float) -> np.ndarray:
    n = max(1, int(math.ceil((hi - lo) / stride - 1e-9)))
    return np.linspace(lo, hi, n + 1)


def _step_limit(kinetic: KineticFn, potential: PotentialFn, t_a: float, t_b: float,
                cfg: SolverConfig) -> float:
    """cfg.max_step, tightened to STEPS_PER_PERIOD steps per local harmonic period"""
    samples = []
    for t in (t_a, 0.5 * (t_a + t_b), t_b):
        G = kinetic(t)[0]
        samples.append(G * potential(t) if G > 0 else 0.0)
    GF = max(samples)
    if not GF > 0:
        return cfg.max_step
    return min(cfg.max_step, 2.0 * math.pi / (STEPS_PER_PERIOD * math.sqrt(GF)))


def _solve_piece(kinetic: KineticFn, potential: PotentialFn, y0: Sequence[float],
                 t_a: float, t_b: float, cfg: SolverConfig, guard: float):
    def rhs(t, y):
        alpha, alpha_dot, _ = y
        G, Gdot = kinetic(t)
        if G <= 0:
            raise NonPositiveKinetic(f"G = {G:.6g} at t = {t:.6g} fs")
        F = potential(t)
        return [alpha_dot,
                Gdot / G * alpha_dot - G * F * alpha + G * G / alpha ** 3,
                G / alpha ** 2]

    def alpha_guard(t, y):
        return y[0] - guard
    alpha_guard.terminal = True
    alpha_guard.direction = -1

    sol = solve_ivp(rhs, (t_a, t_b), y0, method=cfg.method, rtol=cfg.rel_tol, atol=cfg.abs_tol,
                    max_step=_step_limit(kinetic, potential, t_a, t_b, cfg),
                    dense_output=True, events=alpha_guard)
    if sol.status == 1:
        raise StepSizeUnderflow(
            f"alpha fell below {guard:.3g} at t = {sol.t_events[0][0]:.6g} fs"
        )
    if not sol.success:
        raise StepSizeUnderflow(f"integration failed on [{t_a}, {t_b}] fs: {sol.message}")
    return sol


def _propagate(mode: str, layout: Sequence[Tuple[float, float, KineticFn, PotentialFn]],
               state0: ErmakovState, cfg: SolverConfig) -> ErmakovTrajectory:
    """Integrate consecutive pieces; alpha, alpha_dot/G and phi are continuous at the joins"""
    guard = ALPHA_GUARD * state0.alpha
    y = np.array([state0.alpha, state0.alpha_dot, state0.phi], dtype=float)
    pieces = []
    accepted = evaluations = 0
    previous_kinetic = None
    for t_a, t_b, kinetic, potential in layout:
        if previous_kinetic is not None:
            y[1] *= kinetic(t_a)[0] / previous_kinetic(t_a)[0]
        sol = _solve_piece(kinetic, potential, y, t_a, t_b, cfg, guard)
        accepted += len(sol.t) - 1
        evaluations += sol.nfev
        logger.debug("mode %s piece [%g, %g] fs: %d steps, %d rhs evaluations",
                     mode, t_a, t_b, len(sol.t) - 1, sol.nfev)
        pieces.append(_Piece(t_a, t_b, sol.sol, kinetic, potential))
        y = sol.y[:, -1].copy()
        previous_kinetic = kinetic

    lo = min(p.lo for p in pieces)
    hi = max(p.hi for p in pieces)
    times = _output_grid(lo, hi, cfg.output_stride)
    values = np.empty((3, len(times)))
    G = np.empty(len(times))
    Gdot = np.empty(len(times))
    F = np.empty(len(times))
    ordered = sorted(pieces, key=lambda p: p.lo)
    for index, piece in enumerate(ordered):
        last = index == len(ordered) - 1
        mask = (times >= piece.lo) & ((times <= piece.hi) if last else (times < piece.hi))
        values[:, mask] = piece.solution(times[mask])
        for i in np.flatnonzero(mask):
            G[i], Gdot[i] = piece.kinetic(times[i])
            F[i] = piece.potential(times[i])

    return ErmakovTrajectory(
        mode=mode, times=times, alpha=values[0], alpha_dot=values[1], phi=values[2],
        G=G, Gdot=Gdot, F=F, initial=state0, t_initial=layout[0][0],
        statistics=SolverStatistics(accepted, evaluations, len(pieces)),
        config=cfg, pieces=tuple(pieces),
    )


def integrate_mode(kinetic: KineticFn, potential: PotentialFn, state0: ErmakovState,
                   t_span: Tuple[float, float], cfg: SolverConfig = SolverConfig(),
                   mode: str = 'g') -> ErmakovTrajectory:
    """
    Integrate a single smooth piece, forward or backward in time

    Parameters
    ----------
    kinetic : callable
        t -> (G, Gdot) of the mode
    potential : callable
        t -> F of the mode
    state0 : ErmakovState
        State at t_span[0]
    t_span : tuple
        (start, end) in fs; end < start integrates backward
    cfg : SolverConfig
        Solver settings
    mode : str
        Label stored on the trajectory

    Returns
    -------
    ErmakovTrajectory
    """
    if t_span[0] == t_span[1]:
        raise ValueError("empty integration interval")
    return _propagate(mode, [(t_span[0], t_span[1], kinetic, potential)], state0, cfg)


def integrate(spec: MoleculeSpec, sched: AngleSchedule, cfg: SolverConfig, t_end: float,
              t_start: float = DEFAULT_T_START,
              potential: Optional[Callable[[float], Tuple[float, float]]] = None
              ) -> Tuple[ErmakovTrajectory, ErmakovTrajectory]:
    """
    Solve the Ermakov equation of both normal modes along a schedule

    Parameters
    ----------
    spec : MoleculeSpec
        Molecule (masses, force constants)
    sched : AngleSchedule
        Bond-angle schedule
    cfg : SolverConfig
        Solver settings
    t_end : float
        Final time in fs
    t_start : float, optional
        Initial time in fs where the modes start in their stationary states
        (default: -200)
    potential : callable, optional
        t -> (F_gg, F_uu); the frozen force constants are used when omitted

    Returns
    -------
    tuple
        (gerade trajectory, ungerade trajectory)

    Notes
    -----
    At a sudden jump the state is carried with alpha, alpha_dot/G and phi
    continuous, which keeps the wavefunction continuous.
    """
    if not t_end > t_start:
        raise ValueError("t_end must be later than t_start")
    if potential is None:
        frozen = potential_elements(spec)
        potential = lambda t: frozen  # noqa: E731

    layout_kinetic = [(a, b, kinetic_on_segment(spec, sched, a, b))
                      for a, b in segments(sched, t_start, t_end)]

    def run_mode(mode: str) -> ErmakovTrajectory:
        index = MODES.index(mode)
        layout = [
            (a, b,
             (lambda t, kin=kin: kin(t).for_mode(mode)),
             (lambda t: potential(t)[index]))
            for a, b, kin in layout_kinetic
        ]
        G0 = layout[0][2](t_start)[0]
        F0 = layout[0][3](t_start)
        return _propagate(mode, layout, initial_conditions(G0, F0), cfg)

    results: Dict[str, ErmakovTrajectory] = {}
    with ThreadPoolExecutor(max_workers=len(MODES)) as executor:
        future_to_mode = {executor.submit(run_mode, mode): mode for mode in MODES}
        for future in as_completed(future_to_mode):
            results[future_to_mode[future]] = future.result()

    for mode in MODES:
        stats = results[mode].statistics
        logger.info("%s %s mode: %d accepted steps, %d rhs evaluations",
                    spec.name, mode, stats.accepted_steps, stats.rhs_evaluations)
    return results['g'], results['u']


def pinney_closed_form(alpha_init: ErmakovState, G: float, F: float, t) -> ErmakovState:
    """
    Exact Ermakov state for constant G and F

    Built from the linear companion u(t) = alpha e^{i phi}, which for constant
    coefficients is u = e^{i phi0} [alpha0 cos(w t) + (alpha_dot0 + i G/alpha0) sin(w t)/w]
    with w = sqrt(G F).

    Parameters
    ----------
    alpha_init : ErmakovState
        State at t = 0
    G, F : float
        Constant kinetic and potential elements
    t : float or array
        Time(s) in fs

    Returns
    -------
    ErmakovState
        Fields are arrays when t is an array
    """
    w = math.sqrt(G * F)
    a0, ad0, phi0 = alpha_init.alpha, alpha_init.alpha_dot, alpha_init.phi
    t = np.asarray(t, dtype=float)

    def components(tau):
        c, s = np.cos(w * tau), np.sin(w * tau)
        re = a0 * c + ad0 * s / w
        im = G / (a0 * w) * s
        re_dot = -a0 * w * s + ad0 * c
        im_dot = G / a0 * c
        return re, im, re_dot, im_dot

    re, im, re_dot, im_dot = components(t)
    alpha = np.hypot(re, im)
    alpha_dot = (re * re_dot + im * im_dot) / alpha
    # u(t + pi/w) = -u(t): the phase gains pi per half period of sin(w t)
    half_periods = np.floor(w * t / math.pi)
    tau = t - half_periods * math.pi / w
    re_tau, im_tau, _, _ = components(tau)
    phi = phi0 + half_periods * math.pi + np.arctan2(im_tau, re_tau)
    if t.ndim == 0:
        return ErmakovState(float(alpha), float(alpha_dot), float(phi))
    return ErmakovState(alpha, alpha_dot, phi)


def companion_solution(traj: ErmakovTrajectory,
                       cfg: Optional[SolverConfig] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Independently integrated linear companion of a trajectory

    Solves u'' - (G'/G) u' + G F u = 0 over the same pieces with
    u = alpha0 e^{i phi0}, u' = (alpha_dot0 + i G0/alpha0) e^{i phi0} and u'/G
    continuous at the joins.

    Returns
    -------
    tuple of complex arrays
        (u, u') sampled on traj.times
    """
    cfg = traj.config if cfg is None else cfg
    first = traj.pieces[0]
    G0 = first.kinetic(first.t_a)[0]
    s0 = traj.initial
    rotation = np.exp(1j * s0.phi)
    u = s0.alpha * rotation
    u_dot = (s0.alpha_dot + 1j * G0 / s0.alpha) * rotation
    y = np.array([u.real, u.imag, u_dot.real, u_dot.imag])

    dense = []
    previous_kinetic = None
    for piece in traj.pieces:
        kinetic, potential = piece.kinetic, piece.potential
        if previous_kinetic is not None:
            y[2:] *= kinetic(piece.t_a)[0] / previous_kinetic(piece.t_a)[0]

        def rhs(t, v, kinetic=kinetic, potential=potential):
            G, Gdot = kinetic(t)
            GF = G * potential(t)
            ratio = Gdot / G
            return [v[2], v[3], ratio * v[2] - GF * v[0], ratio * v[3] - GF * v[1]]

        sol = solve_ivp(rhs, (piece.t_a, piece.t_b), y, method=cfg.method, rtol=cfg.rel_tol,
                        atol=cfg.abs_tol,
                        max_step=_step_limit(kinetic, potential, piece.t_a, piece.t_b, cfg),
                        dense_output=True)
        if not sol.success:
            raise StepSizeUnderflow(f"companion integration failed: {sol.message}")
        dense.append((piece.lo, piece.hi, sol.sol))
        y = sol.y[:, -1].copy()
        previous_kinetic = kinetic

    values = np.empty((4, len(traj.times)))
    dense.sort(key=lambda item: item[0])
    for index, (lo, hi, solution) in enumerate(dense):
        last = index == len(dense) - 1
        mask = (traj.times >= lo) & ((traj.times <= hi) if last else (traj.times < hi))
        values[:, mask] = solution(traj.times[mask])
    return values[0] + 1j * values[1], values[2] + 1j * values[3]


def companion_linear_check(traj: ErmakovTrajectory, cfg: Optional[SolverConfig] = None) -> float:
    """
    Maximum drift of the companion Wronskian Im(u* u')/G from 1 and of |u|/alpha from 1

    Both are exact invariants of the Ermakov system with stationary initial
    normalization.
    """
    u, u_dot = companion_solution(traj, cfg)
    wronskian = np.imag(np.conj(u) * u_dot) / traj.G
    drift = max(float(np.max(np.abs(wronskian - 1.0))),
                float(np.max(np.abs(np.abs(u) / traj.alpha - 1.0))))
    logger.debug("mode %s companion drift %.3e", traj.mode, drift)
    return drift
