"""
Internal unit system (amu, Angstrom, fs) and physical-constant conversions

Every factor is derived once at import time from the CODATA 2018 constants
shipped with astropy, so results do not drift with the astropy default.
"""
from dataclasses import dataclass
from typing import Union
import math

import numpy as np
import astropy.units as u
from astropy.constants import codata2018 as const


# One internal energy unit (amu Angstrom^2 / fs^2) and action unit in SI
_ENERGY_UNIT = (const.u * u.AA**2 / u.fs**2).to(u.J)
_ACTION_UNIT = (const.u * u.AA**2 / u.fs).to(u.J * u.s)


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants expressed in the internal unit system"""
    hbar: float  # amu Angstrom^2 / fs
    planck: float  # amu Angstrom^2 / fs
    c_angstrom_per_fs: float
    aj_per_internal_energy: float  # aJ in one amu Angstrom^2 / fs^2
    wavenumber_per_internal_energy: float  # cm^-1 in one amu Angstrom^2 / fs^2

    def __post_init__(self):
        for name in ('hbar', 'planck', 'c_angstrom_per_fs',
                     'aj_per_internal_energy', 'wavenumber_per_internal_energy'):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not math.isclose(self.planck, 2 * math.pi * self.hbar, rel_tol=1e-14):
            raise ValueError("planck must equal 2*pi*hbar")

    @property
    def hc(self) -> float:
        """h*c in internal energy units per cm^-1"""
        return 1.0 / self.wavenumber_per_internal_energy


def _build_constants() -> PhysicalConstants:
    hbar = float((const.hbar / _ACTION_UNIT).decompose().value)
    hc_per_wavenumber = (const.h * const.c / u.cm).to(u.J)
    return PhysicalConstants(
        hbar=hbar,
        planck=2 * math.pi * hbar,
        c_angstrom_per_fs=float(const.c.to_value(u.AA / u.fs)),
        aj_per_internal_energy=float(_ENERGY_UNIT.to_value(u.aJ)),
        wavenumber_per_internal_energy=float((_ENERGY_UNIT / hc_per_wavenumber).decompose().value),
    )


CONSTANTS = _build_constants()
HBAR = CONSTANTS.hbar

# Scalars stay Python floats, anything array-like becomes a float ndarray
FloatOrArray = Union[float, np.ndarray]


def _as_float(x) -> FloatOrArray:
    return np.asarray(x, dtype=float) if np.ndim(x) else float(x)


def aj_to_internal(e: FloatOrArray) -> FloatOrArray:
    """
    Convert an energy (or a force constant per Angstrom^2) from aJ to internal units

    Parameters
    ----------
    e : float or array
        Energy in aJ

    Returns
    -------
    float or array
        Energy in amu Angstrom^2 / fs^2
    """
    return _as_float(e) / CONSTANTS.aj_per_internal_energy


def internal_to_aj(e: FloatOrArray) -> FloatOrArray:
    """Inverse of aj_to_internal"""
    return _as_float(e) * CONSTANTS.aj_per_internal_energy


def internal_energy_to_wavenumber(e: FloatOrArray) -> FloatOrArray:
    """
    Express an internal energy as a wavenumber

    Parameters
    ----------
    e : float or array
        Energy in amu Angstrom^2 / fs^2

    Returns
    -------
    float or array
        e / (h c) in cm^-1
    """
    return _as_float(e) * CONSTANTS.wavenumber_per_internal_energy


def wavenumber_to_internal(x: FloatOrArray) -> FloatOrArray:
    """Inverse of internal_energy_to_wavenumber"""
    return _as_float(x) / CONSTANTS.wavenumber_per_internal_energy


def angular_frequency_to_wavenumber(omega: FloatOrArray) -> FloatOrArray:
    """hbar*omega (omega in fs^-1) expressed in cm^-1"""
    return internal_energy_to_wavenumber(CONSTANTS.hbar * _as_float(omega))
