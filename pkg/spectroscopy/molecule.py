"""
Triatomic A2B molecules: Wilson G / F matrix elements and stationary-frame quantities

Includes the four built-in stretching models (CO2, NO2, O3, H2O) and a strict
reader for flat key-value molecule files.
"""
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union
import configparser
import logging
import math

import numpy as np

from .units import aj_to_internal

logger = logging.getLogger(__name__)


class MoleculeError(ValueError):
    """Invalid molecule parameters or molecule file"""


class DegenerateFrequency(ValueError):
    """Normal frequency is not real for the given coupling ratios"""


@dataclass(frozen=True)
class MoleculeSpec:
    """
    Spectroscopic parameters of an A2B molecule

    Force constants are given in aJ/Angstrom^2 and converted once into the
    internal units (amu/fs^2), available as ``f_rr`` and ``f_rrp``.
    """
    name: str
    m_terminal: float  # amu, atom A
    m_central: float  # amu, atom B
    f_rr_aj: float  # aJ / Angstrom^2
    f_rrp_aj: float  # aJ / Angstrom^2
    theta0: float  # degrees
    thetaf: float  # degrees
    e_nu1: Optional[float] = None  # observed fundamental, cm^-1
    e_nu3: Optional[float] = None  # observed fundamental, cm^-1
    f_rr: float = field(init=False, repr=False, compare=False)
    f_rrp: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.m_terminal > 0 and self.m_central > 0):
            raise MoleculeError(f"{self.name}: masses must be strictly positive")
        if not self.f_rr_aj > 0:
            raise MoleculeError(f"{self.name}: f_rr must be strictly positive")
        if not abs(self.f_rrp_aj) < self.f_rr_aj:
            raise MoleculeError(f"{self.name}: |f_rrp| must be smaller than f_rr")
        for label, theta in (('theta0', self.theta0), ('thetaf', self.thetaf)):
            if not 0.0 < theta <= 180.0:
                raise MoleculeError(f"{self.name}: {label} = {theta} outside (0, 180] degrees")
        for label, energy in (('e_nu1', self.e_nu1), ('e_nu3', self.e_nu3)):
            if energy is not None and not energy > 0:
                raise MoleculeError(f"{self.name}: {label} must be positive")
        object.__setattr__(self, 'f_rr', aj_to_internal(self.f_rr_aj))
        object.__setattr__(self, 'f_rrp', aj_to_internal(self.f_rrp_aj))


@dataclass(frozen=True)
class GMatrixElements:
    """Wilson G matrix elements of the two equivalent stretches"""
    g_rr: float  # amu^-1
    g_rrp: float  # amu^-1

    @property
    def mu(self) -> float:
        """Reduced mass 1/g_rr in amu"""
        return 1.0 / self.g_rr


@dataclass(frozen=True)
class CouplingRatios:
    """Dimensionless kinetic and potential coupling ratios"""
    x_f: float
    x_g: float


# Spectroscopic parameters (force constants in aJ/A^2, fundamentals in cm^-1).
# Masses reproduce the tabulated g columns rather than exact isotopic masses.
_BUILTIN_ROWS = (
    ('CO2', 15.995, 12.000, 15.97, 1.232, 180.0, 104.5, 1285.4, 2349.1),
    ('NO2', 15.995, 14.003, 10.91, 1.935, 134.3, 104.5, 1319.8, 1619.0),
    ('O3', 16.0, 16.0, 6.164, 1.603, 116.8, 180.0, 1104.3, 1038.7),
    ('H2O', 1.0, 16.0, 8.093, -0.157, 104.5, 180.0, 3657.1, 3755.9),
)

# Tabulated derived columns, used for regression reports
TABLE1_REFERENCE: Dict[str, Dict[str, float]] = {
    'CO2': {'x_f': 0.077, 'g_rr': 0.1458, 'g_rrp': -0.083, 'x_g': -0.571, 'zeta': 0.337},
    'NO2': {'x_f': 0.177, 'g_rr': 0.1339, 'g_rrp': -0.050, 'x_g': -0.373, 'zeta': 0.128},
    'O3': {'x_f': 0.260, 'g_rr': 0.125, 'g_rrp': -0.028, 'x_g': -0.225, 'zeta': 0.039},
    'H2O': {'x_f': -0.019, 'g_rr': 1.063, 'g_rrp': -0.016, 'x_g': -0.015, 'zeta': 0.017},
}


def builtin_table() -> List[MoleculeSpec]:
    """Return the four built-in molecules in table order"""
    return [
        MoleculeSpec(name=name, m_terminal=m_a, m_central=m_b, f_rr_aj=f_rr, f_rrp_aj=f_rrp,
                     theta0=theta0, thetaf=thetaf, e_nu1=e_nu1, e_nu3=e_nu3)
        for name, m_a, m_b, f_rr, f_rrp, theta0, thetaf, e_nu1, e_nu3 in _BUILTIN_ROWS
    ]


def get_molecule(name: str) -> MoleculeSpec:
    """Look up a built-in molecule by name (case-insensitive)"""
    for spec in builtin_table():
        if spec.name.lower() == name.strip().lower():
            return spec
    known = ', '.join(row[0] for row in _BUILTIN_ROWS)
    raise MoleculeError(f"Unknown molecule '{name}' (built-in: {known})")


def g_matrix(m_terminal: float, m_central: float, theta: float) -> GMatrixElements:
    """
    Wilson G matrix elements at a bond angle

    Parameters
    ----------
    m_terminal : float
        Mass of the terminal atoms A (amu)
    m_central : float
        Mass of the central atom B (amu)
    theta : float
        Bond angle in degrees

    Returns
    -------
    GMatrixElements
        g_rr = 1/m_A + 1/m_B, g_rrp = cos(theta)/m_B
    """
    if not (m_terminal > 0 and m_central > 0):
        raise MoleculeError("masses must be strictly positive")
    return GMatrixElements(
        g_rr=1.0 / m_terminal + 1.0 / m_central,
        g_rrp=math.cos(math.radians(theta)) / m_central,
    )


def coupling_ratios(f_rr: float, f_rrp: float, g: GMatrixElements) -> CouplingRatios:
    """x_f = f_rrp/f_rr and x_g = g_rrp/g_rr"""
    return CouplingRatios(x_f=f_rrp / f_rr, x_g=g.g_rrp / g.g_rr)


def molecule_ratios(spec: MoleculeSpec, theta: Optional[float] = None) -> CouplingRatios:
    """Coupling ratios of a molecule at theta (defaults to its initial angle)"""
    theta = spec.theta0 if theta is None else theta
    return coupling_ratios(spec.f_rr, spec.f_rrp, g_matrix(spec.m_terminal, spec.m_central, theta))


def potential_elements(spec: MoleculeSpec) -> Tuple[float, float]:
    """Symmetry-adapted potential constants (F_gg, F_uu) in amu/fs^2"""
    return spec.f_rr + spec.f_rrp, spec.f_rr - spec.f_rrp


def omega0(spec: MoleculeSpec) -> float:
    """Uncoupled stretch frequency sqrt(g_rr f_rr) in fs^-1"""
    g_rr = 1.0 / spec.m_terminal + 1.0 / spec.m_central
    return math.sqrt(g_rr * spec.f_rr)


def reduced_mass(spec: MoleculeSpec) -> float:
    """mu = 1/g_rr in amu"""
    return 1.0 / (1.0 / spec.m_terminal + 1.0 / spec.m_central)


def normal_frequencies(spec: MoleculeSpec, theta: float) -> Tuple[float, float]:
    """
    Harmonic normal-mode frequencies at a bond angle (frozen force constants)

    Parameters
    ----------
    spec : MoleculeSpec
        Molecule
    theta : float
        Bond angle in degrees

    Returns
    -------
    tuple
        (omega_g, omega_u) in fs^-1

    Raises
    ------
    DegenerateFrequency
        If (1 +/- x_f)(1 +/- x_g) is not positive
    """
    x = molecule_ratios(spec, theta)
    w0 = omega0(spec)
    plus = (1 + x.x_f) * (1 + x.x_g)
    minus = (1 - x.x_f) * (1 - x.x_g)
    if plus <= 0 or minus <= 0:
        raise DegenerateFrequency(
            f"{spec.name} at {theta} deg: x_f={x.x_f:.4g}, x_g={x.x_g:.4g} give no real frequency"
        )
    return w0 * math.sqrt(plus), w0 * math.sqrt(minus)


def zeta_stationary(e_low, e_high):
    """
    Locality parameter (2/pi) arctan(dE/E_mean) of two fundamentals

    Parameters
    ----------
    e_low, e_high : float or array
        Fundamental energies (any common unit, typically cm^-1)

    Returns
    -------
    float or array
        0 for degenerate fundamentals, below ~0.1 for local molecules
    """
    e_low = np.asarray(e_low, dtype=float)
    e_high = np.asarray(e_high, dtype=float)
    zeta = (2.0 / np.pi) * np.arctan(np.abs(e_high - e_low) / (0.5 * (e_high + e_low)))
    return float(zeta) if zeta.ndim == 0 else zeta


def with_scaled_coupling(spec: MoleculeSpec, factor: float) -> MoleculeSpec:
    """
    Molecule whose coupling ratios are both scaled by ``factor``

    f_rrp is scaled directly; the central mass is changed so that
    x_g(theta) = cos(theta) m_A / (m_A + m_B) is scaled at every angle.
    """
    if not 0.0 < factor <= 1.0:
        raise MoleculeError("coupling scale factor must lie in (0, 1]")
    m_a = spec.m_terminal
    m_central = m_a * ((spec.m_central / m_a + 1.0) / factor - 1.0)
    return replace(spec, name=f"{spec.name}*{factor:g}", m_central=m_central,
                   f_rrp_aj=spec.f_rrp_aj * factor, e_nu1=None, e_nu3=None)


# Ingestion file keys -> (MoleculeSpec field, required)
_FILE_KEYS = {
    'name': ('name', True),
    'm_terminal': ('m_terminal', True),
    'm_central': ('m_central', True),
    'f_rr_aj': ('f_rr_aj', True),
    'f_rrp_aj': ('f_rrp_aj', True),
    'theta0_deg': ('theta0', True),
    'thetaf_deg': ('thetaf', True),
    'e_nu1_cm': ('e_nu1', False),
    'e_nu3_cm': ('e_nu3', False),
}


def molecule_from_mapping(values: Mapping[str, str], source: str = '<molecule>') -> MoleculeSpec:
    """
    Build a molecule from ingestion keys (strings as read from a file)

    Raises
    ------
    MoleculeError
        On unknown or missing keys and unparsable numbers
    """
    unknown = sorted(set(values) - set(_FILE_KEYS))
    if unknown:
        raise MoleculeError(f"{source}: unknown key(s) {', '.join(unknown)}")
    kwargs = {}
    for key, (attr, required) in _FILE_KEYS.items():
        if key not in values:
            if required:
                raise MoleculeError(f"{source}: missing key '{key}'")
            continue
        raw = values[key].strip()
        if attr == 'name':
            if not raw:
                raise MoleculeError(f"{source}: empty molecule name")
            kwargs[attr] = raw
            continue
        try:
            kwargs[attr] = float(raw)
        except ValueError:
            raise MoleculeError(f"{source}: key '{key}' is not a number: '{raw}'") from None
    return MoleculeSpec(**kwargs)


def molecule_to_mapping(spec: MoleculeSpec) -> Dict[str, str]:
    """Ingestion keys of a molecule, numbers written with full precision"""
    values = {
        'name': spec.name,
        'm_terminal': repr(spec.m_terminal),
        'm_central': repr(spec.m_central),
        'f_rr_aj': repr(spec.f_rr_aj),
        'f_rrp_aj': repr(spec.f_rrp_aj),
        'theta0_deg': repr(spec.theta0),
        'thetaf_deg': repr(spec.thetaf),
    }
    if spec.e_nu1 is not None:
        values['e_nu1_cm'] = repr(spec.e_nu1)
    if spec.e_nu3 is not None:
        values['e_nu3_cm'] = repr(spec.e_nu3)
    return values


def load_molecule_file(path: Union[str, Path]) -> MoleculeSpec:
    """
    Read a flat ``key = value`` molecule file

    Parameters
    ----------
    path : str or Path
        File with the keys name, m_terminal, m_central, f_rr_aj, f_rrp_aj,
        theta0_deg, thetaf_deg and optionally e_nu1_cm, e_nu3_cm

    Returns
    -------
    MoleculeSpec
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise MoleculeError(f"{path}: cannot read molecule file ({e})") from e

    parser = configparser.ConfigParser(interpolation=None, delimiters=('=', ':'))
    parser.optionxform = str
    try:
        parser.read_string('[molecule]\n' + text, source=str(path))
    except configparser.Error as e:
        raise MoleculeError(f"{path}: {e}") from e
    spec = molecule_from_mapping(dict(parser['molecule']), source=str(path))
    logger.debug("Loaded molecule %s from %s", spec.name, path)
    return spec

