"""
Bond-angle schedules theta(t) and the induced kinetic matrix elements G(t)
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple
import math

import numpy as np
from scipy.special import expit

from spectroscopy.molecule import MoleculeSpec

SCHEDULE_KINDS = ('sudden', 'linear', 'adiabatic')


class ScheduleError(ValueError):
    """Invalid schedule parameters"""


@dataclass(frozen=True)
class AngleSchedule:
    """
    Time profile of the bond angle

    sudden: theta0 for t < t0, thetaf from t0 on.
    linear: ramp from theta0 at t0 to thetaf at tf.
    adiabatic: theta0 + (thetaf - theta0) / (1 + 2 exp(-2 k t)).
    """
    kind: str
    theta0: float  # degrees
    thetaf: float  # degrees
    t0: float = 0.0  # fs
    tf: Optional[float] = None  # fs, linear only
    k: Optional[float] = None  # fs^-1, adiabatic only

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ScheduleError(f"unknown schedule kind '{self.kind}' (expected one of {SCHEDULE_KINDS})")
        for label, theta in (('theta0', self.theta0), ('thetaf', self.thetaf)):
            if not 0.0 < theta <= 180.0:
                raise ScheduleError(f"{label} = {theta} outside (0, 180] degrees")
        if self.kind == 'linear' and (self.tf is None or not self.tf > self.t0):
            raise ScheduleError("linear schedule requires tf > t0")
        if self.kind == 'adiabatic' and (self.k is None or not self.k > 0):
            raise ScheduleError("adiabatic schedule requires k > 0")

    @property
    def span(self) -> float:
        return self.thetaf - self.theta0


@dataclass(frozen=True)
class KineticElements:
    """Time-dependent kinetic matrix elements and their time derivatives"""
    G_gg: float  # amu^-1
    G_uu: float  # amu^-1
    Gdot_gg: float  # amu^-1 fs^-1
    Gdot_uu: float  # amu^-1 fs^-1

    def for_mode(self, mode: str) -> Tuple[float, float]:
        """(G, Gdot) of the gerade ('g') or ungerade ('u') mode"""
        if mode == 'g':
            return self.G_gg, self.Gdot_gg
        if mode == 'u':
            return self.G_uu, self.Gdot_uu
        raise ValueError(f"mode must be 'g' or 'u', got '{mode}'")


def _branch(s: AngleSchedule, t: float, ref: float) -> Tuple[float, float]:
    """theta and dtheta/dt (degrees, degrees/fs) on the smooth piece containing ref"""
    if s.kind == 'adiabatic':
        sigma = float(expit(2.0 * s.k * t - math.log(2.0)))
        return s.theta0 + s.span * sigma, s.span * 2.0 * s.k * sigma * (1.0 - sigma)
    if ref < s.t0:
        return s.theta0, 0.0
    if s.kind == 'sudden':
        return s.thetaf, 0.0
    if ref < s.tf:
        rate = s.span / (s.tf - s.t0)
        return s.theta0 + rate * (t - s.t0), rate
    return s.thetaf, 0.0


def theta_at(s: AngleSchedule, t: float) -> float:
    """Bond angle in degrees at time t (fs)"""
    return _branch(s, t, t)[0]


def theta_rate(s: AngleSchedule, t: float) -> float:
    """dtheta/dt in degrees/fs (zero for sudden away from the jump)"""
    return _branch(s, t, t)[1]


def _kinetic(spec: MoleculeSpec, theta: float, rate: float) -> KineticElements:
    g_rr = 1.0 / spec.m_terminal + 1.0 / spec.m_central
    theta_rad = math.radians(theta)
    g_rrp = math.cos(theta_rad) / spec.m_central
    g_rrp_dot = -math.sin(theta_rad) * math.radians(rate) / spec.m_central
    return KineticElements(G_gg=g_rr + g_rrp, G_uu=g_rr - g_rrp,
                           Gdot_gg=g_rrp_dot, Gdot_uu=-g_rrp_dot)


def kinetic_at(spec: MoleculeSpec, s: AngleSchedule, t: float) -> KineticElements:
    """
    Kinetic matrix elements at time t

    Parameters
    ----------
    spec : MoleculeSpec
        Molecule (masses)
    s : AngleSchedule
        Bond-angle schedule
    t : float
        Time in fs

    Returns
    -------
    KineticElements
        G_gg = g_rr + cos(theta)/m_B, G_uu = g_rr - cos(theta)/m_B and their
        derivatives through dtheta/dt
    """
    theta, rate = _branch(s, t, t)
    return _kinetic(spec, theta, rate)


def breakpoints(s: AngleSchedule) -> List[float]:
    """Times where theta(t) is not smooth"""
    if s.kind == 'sudden':
        return [s.t0]
    if s.kind == 'linear':
        return [s.t0, s.tf]
    return []


def segments(s: AngleSchedule, t_start: float, t_end: float) -> List[Tuple[float, float]]:
    """Split [t_start, t_end] (either order) at the breakpoints strictly inside it"""
    lo, hi = min(t_start, t_end), max(t_start, t_end)
    cuts = [lo] + [b for b in breakpoints(s) if lo < b < hi] + [hi]
    pieces = list(zip(cuts[:-1], cuts[1:]))
    if t_end < t_start:
        pieces = [(b, a) for a, b in reversed(pieces)]
    return pieces


def kinetic_on_segment(spec: MoleculeSpec, s: AngleSchedule,
                       a: float, b: float) -> Callable[[float], KineticElements]:
    """
    Kinetic elements on the closed piece between a and b

    The smooth branch is selected from the piece midpoint, so the ends take
    one-sided values (before/after a jump) instead of the pointwise ones.
    """
    ref = 0.5 * (a + b)

    def kinetic(t: float) -> KineticElements:
        theta, rate = _branch(s, t, ref)
        return _kinetic(spec, theta, rate)

    return kinetic


def theta_series(s: AngleSchedule, times: np.ndarray) -> np.ndarray:
    """theta(t) on an array of times"""
    return np.array([theta_at(s, float(t)) for t in times])
