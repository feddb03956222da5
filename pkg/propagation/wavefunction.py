"""
Exact time-dependent Fock wavefunctions reconstructed from the Ermakov solution

psi_n(S, t) = (sqrt(hbar) alpha)^(-1/2) h_n(S / (sqrt(hbar) alpha))
              * exp(i alpha_dot S^2 / (2 hbar G alpha)) * exp(-i (n + 1/2) phi)

with h_n the normalized Hermite functions. Used as a verification layer:
nothing here is time-stepped.
"""
from dataclasses import dataclass
from typing import Optional, Sequence
import logging
import math

import numpy as np
import pandas as pd

from spectroscopy.units import HBAR
from .ermakov import ErmakovState, ErmakovTrajectory

logger = logging.getLogger(__name__)

DEFAULT_POINTS = 4096
DEFAULT_WIDTH = 10.0  # grid half-width in units of sigma_S(n)
MIN_SPAN = 6.0  # minimal grid span in units of sigma_S(n)


class GridTooNarrow(ValueError):
    """Coordinate grid does not cover the wavefunction"""


@dataclass
class WavefunctionGrid:
    """Complex amplitudes of one mode's Fock state on a uniform grid"""
    coordinate: np.ndarray  # S values
    values: np.ndarray  # complex psi(S)
    time: float  # fs
    mode: str
    n: int

    @property
    def spacing(self) -> float:
        return float(self.coordinate[1] - self.coordinate[0])

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return float(np.sum(self.density) * self.spacing)


def hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    """
    Normalized Hermite functions h_0 .. h_n_max at points x

    h_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)), generated by the
    three-term recurrence on the normalized functions, so no factorial or
    power of two is ever formed.

    Returns
    -------
    array
        Shape (n_max + 1, len(x))
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    # h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


def sigma_S(st: ErmakovState, n: int) -> float:
    """Standard deviation of S in the Fock state n"""
    return math.sqrt(0.5 * HBAR * (2 * n + 1)) * st.alpha


def default_grid(st: ErmakovState, n: int, points: int = DEFAULT_POINTS,
                 width: float = DEFAULT_WIDTH) -> np.ndarray:
    """Uniform grid over +/- width * sigma_S(n)"""
    half = width * sigma_S(st, n)
    return np.linspace(-half, half, points)


def eval_psi(st: ErmakovState, G: float, n: int, grid: np.ndarray,
             time: float = 0.0, mode: str = 'g') -> WavefunctionGrid:
    """
    Evaluate psi_n(S) for an Ermakov state

    Parameters
    ----------
    st : ErmakovState
        alpha, alpha_dot, phi at the evaluation time
    G : float
        Kinetic matrix element at the evaluation time
    n : int
        Quantum number
    grid : array
        Uniform S grid, symmetric about 0
    time : float, optional
        Time label stored on the result
    mode : str, optional
        Mode label stored on the result

    Returns
    -------
    WavefunctionGrid

    Raises
    ------
    GridTooNarrow
        If the grid spans less than 6 sigma_S(n)
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    grid = np.asarray(grid, dtype=float)
    span = float(grid[-1] - grid[0])
    if span < MIN_SPAN * sigma_S(st, n):
        raise GridTooNarrow(
            f"grid span {span:.4g} below {MIN_SPAN:g} sigma_S = {MIN_SPAN * sigma_S(st, n):.4g}"
        )
    length = math.sqrt(HBAR) * st.alpha
    x = grid / length
    amplitude = hermite_functions(n, x)[n] / math.sqrt(length)
    chirp = st.alpha_dot / (2.0 * HBAR * G * st.alpha)
    phase = chirp * grid ** 2 - (n + 0.5) * st.phi
    return WavefunctionGrid(coordinate=grid, values=amplitude * np.exp(1j * phase),
                            time=time, mode=mode, n=n)


def overlap(a: WavefunctionGrid, b: WavefunctionGrid) -> complex:
    """<a|b> by uniform quadrature on a shared grid"""
    if a.coordinate.shape != b.coordinate.shape or not np.array_equal(a.coordinate, b.coordinate):
        raise ValueError("wavefunctions must share the same grid")
    return complex(np.sum(np.conj(a.values) * b.values) * a.spacing)


def position_moments(wf: WavefunctionGrid):
    """(<S>, Var S) from |psi|^2"""
    weights = wf.density * wf.spacing
    mean = float(np.sum(weights * wf.coordinate))
    variance = float(np.sum(weights * (wf.coordinate - mean) ** 2))
    return mean, variance


def momentum_variance(wf: WavefunctionGrid) -> float:
    """Var P with P = -i hbar d/dS applied by FFT differentiation"""
    k = 2.0 * np.pi * np.fft.fftfreq(len(wf.coordinate), d=wf.spacing)
    p_psi = HBAR * np.fft.ifft(k * np.fft.fft(wf.values))
    mean = float(np.real(np.sum(np.conj(wf.values) * p_psi) * wf.spacing))
    second = float(np.sum(np.abs(p_psi) ** 2) * wf.spacing)
    return second - mean ** 2


def schrodinger_residual(traj: ErmakovTrajectory, n: int, grid: Optional[np.ndarray] = None,
                         times: Optional[Sequence[float]] = None, dt: float = 0.01,
                         points: int = DEFAULT_POINTS) -> float:
    """
    Relative residual of i hbar d(psi)/dt = H(t) psi

    d/dt uses the five-point central difference with step dt on the dense
    trajectory, the kinetic term the five-point stencil in S; both are fourth
    order. Returns the largest ||i hbar psi_t - H psi|| / ||H psi|| over the
    sampled times.

    Parameters
    ----------
    traj : ErmakovTrajectory
        Dense trajectory of the mode
    n : int
        Quantum number
    grid : array, optional
        Fixed S grid; by default a grid of ``points`` points over
        +/- 10 sigma_S(n) is built at every sampled time
    times : sequence, optional
        Sample times; by default nine evenly spaced interior times
    dt : float, optional
        Time step of the finite difference in fs (default: 0.01)
    points : int, optional
        Points of the default grid
    """
    lo, hi = traj.times[0] + 2 * dt, traj.times[-1] - 2 * dt
    if times is None:
        times = np.linspace(lo, hi, 11)[1:-1]
    worst = 0.0
    for t in times:
        if not lo <= t <= hi:
            raise ValueError(f"sample time {t} too close to the trajectory ends")
        st = traj.state_at(t)
        G, _, F = traj.coefficients_at(t)
        S = default_grid(st, n, points) if grid is None else np.asarray(grid, dtype=float)
        shifted = {
            k: eval_psi(traj.state_at(t + k * dt), traj.coefficients_at(t + k * dt)[0], n, S).values
            for k in (-2, -1, 1, 2)
        }
        psi = eval_psi(st, G, n, S).values
        h = S[1] - S[0]
        inner = slice(2, -2)
        second = (-psi[4:] + 16.0 * psi[3:-1] - 30.0 * psi[2:-2] + 16.0 * psi[1:-3] - psi[:-4]) \
            / (12.0 * h ** 2)
        h_psi = -0.5 * HBAR ** 2 * G * second + 0.5 * F * S[inner] ** 2 * psi[inner]
        psi_t = (-shifted[2] + 8.0 * shifted[1] - 8.0 * shifted[-1] + shifted[-2]) / (12.0 * dt)
        lhs = 1j * HBAR * psi_t[inner]
        residual = np.linalg.norm(lhs - h_psi) / np.linalg.norm(h_psi)
        worst = max(worst, float(residual))
    logger.debug("mode %s n=%d Schrodinger residual %.3e", traj.mode, n, worst)
    return worst


def density_frame(traj: ErmakovTrajectory, n: int, times: Sequence[float],
                  points: int = DEFAULT_POINTS, width: float = DEFAULT_WIDTH) -> pd.DataFrame:
    """
    |psi(S, t)|^2 slices in long format

    Returns
    -------
    DataFrame
        Columns t_fs, mode, n, S, density
    """
    frames = []
    for t in times:
        st = traj.state_at(float(t))
        G = traj.coefficients_at(float(t))[0]
        wf = eval_psi(st, G, n, default_grid(st, n, points, width), time=float(t), mode=traj.mode)
        frames.append(pd.DataFrame({
            't_fs': float(t),
            'mode': traj.mode,
            'n': n,
            'S': wf.coordinate,
            'density': wf.density,
        }))
    return pd.concat(frames, ignore_index=True)
