"""
Stationary local <-> normal mode connection

Bogoliubov parameters, polyad-relation coefficients, normal-mode
spectroscopic parameters, local-limit diagnostics and the operator map
between stationary local bosons and the invariant ladder operators.
"""
from dataclasses import dataclass
from typing import Tuple
import math

import numpy as np

from .molecule import CouplingRatios


@dataclass(frozen=True)
class BogoliubovParams:
    """Squeezing parameters connecting local and normal ladder operators"""
    r: float
    s: float


@dataclass(frozen=True)
class ResonanceWeights:
    """Integer weights of the normal polyad eta1*n_g + eta2*n_u"""
    eta1: int = 1
    eta2: int = 1

    def __post_init__(self):
        for name in ('eta1', 'eta2'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value}")


@dataclass(frozen=True)
class PolyadCoefficients:
    """Coefficients of the normal polyad expressed in local operators"""
    zeta0: float
    beta0: float
    beta1: float
    beta2: float
    beta3: float

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.zeta0, self.beta0, self.beta1, self.beta2, self.beta3)


@dataclass(frozen=True)
class NormalModeParams:
    """Normal-mode Hamiltonian parameters in the local basis"""
    omega_nor: float  # fs^-1
    lambda_nor: float  # fs^-1
    local_lambda: float  # x_f + x_g
    local_lambda_prime: float  # x_f - x_g


@dataclass(frozen=True)
class LocalLimitDiagnostics:
    """Residuals measuring how close a molecule is to the local limit"""
    taylor_err_omega: float
    taylor_err_lambda: float
    dev_beta0: float
    dev_zeta0: float


def _check_ratios(x: CouplingRatios):
    if not (abs(x.x_f) < 1 and abs(x.x_g) < 1):
        raise ValueError(f"coupling ratios must satisfy |x| < 1, got x_f={x.x_f}, x_g={x.x_g}")


def rs_params(x: CouplingRatios) -> BogoliubovParams:
    """r = sqrt((1+x_f)/(1+x_g)), s = sqrt((1-x_f)/(1-x_g))"""
    _check_ratios(x)
    return BogoliubovParams(
        r=math.sqrt((1 + x.x_f) / (1 + x.x_g)),
        s=math.sqrt((1 - x.x_f) / (1 - x.x_g)),
    )


def polyad_coefficients(p: BogoliubovParams, w: ResonanceWeights = ResonanceWeights()) -> PolyadCoefficients:
    """
    Normal polyad written in local operators

    P_N = zeta0 + beta0 (n1 + n2) + beta1 (a1^+ a2 + a2^+ a1)
          + beta2 (a1^2 + a2^2 + h.c.) + beta3 (a1 a2 + h.c.)

    Parameters
    ----------
    p : BogoliubovParams
        r and s, both positive
    w : ResonanceWeights
        eta1, eta2 (default 1, 1)

    Returns
    -------
    PolyadCoefficients
    """
    r, s = p.r, p.s
    if not (r > 0 and s > 0):
        raise ValueError("r and s must be positive")
    e1, e2 = w.eta1, w.eta2
    norm = 1.0 / (8.0 * r * s)
    g_part = e1 * s
    u_part = e2 * r
    return PolyadCoefficients(
        zeta0=2 * norm * (g_part * (r - 1) ** 2 + u_part * (s - 1) ** 2),
        beta0=2 * norm * (g_part * (r * r + 1) + u_part * (s * s + 1)),
        beta1=2 * norm * (g_part * (r * r + 1) - u_part * (s * s + 1)),
        beta2=norm * (g_part * (r * r - 1) + u_part * (s * s - 1)),
        beta3=norm * (g_part * (r * r - 1) - u_part * (s * s - 1)),
    )


def stationary_polyad_expectation(p: BogoliubovParams, w: ResonanceWeights, n1: int, n2: int) -> float:
    """<P_N> in the stationary local Fock state |n1, n2> (only zeta0, beta0 are diagonal)"""
    c = polyad_coefficients(p, w)
    return c.zeta0 + c.beta0 * (n1 + n2)


def local_coupling(x: CouplingRatios) -> Tuple[float, float]:
    """(lambda, lambda') = (x_f + x_g, x_f - x_g)"""
    return x.x_f + x.x_g, x.x_f - x.x_g


def normal_mode_params(x: CouplingRatios, omega0: float) -> NormalModeParams:
    """
    omega_nor and lambda_nor of the normal Hamiltonian in local operators

    omega_nor +/- lambda_nor/2 reproduce omega_g and omega_u.
    """
    _check_ratios(x)
    plus = math.sqrt((1 + x.x_f) * (1 + x.x_g))
    minus = math.sqrt((1 - x.x_f) * (1 - x.x_g))
    lam, lam_prime = local_coupling(x)
    return NormalModeParams(
        omega_nor=0.5 * omega0 * (plus + minus),
        lambda_nor=omega0 * (plus - minus),
        local_lambda=lam,
        local_lambda_prime=lam_prime,
    )


def local_limit_diagnostics(x: CouplingRatios) -> LocalLimitDiagnostics:
    """
    Residuals of the small-coupling expansions

    taylor_err_omega compares omega_nor/omega0 with 1 - (x_g - x_f)^2/8,
    taylor_err_lambda compares lambda_nor/omega0 with x_f + x_g; dev_beta0
    and dev_zeta0 are |beta0 - 1| and |zeta0| at unit weights.
    """
    params = normal_mode_params(x, 1.0)
    coeffs = polyad_coefficients(rs_params(x))
    return LocalLimitDiagnostics(
        taylor_err_omega=abs(params.omega_nor - (1 - (x.x_g - x.x_f) ** 2 / 8)),
        taylor_err_lambda=abs(params.lambda_nor - (x.x_f + x.x_g)),
        dev_beta0=abs(coeffs.beta0 - 1),
        dev_zeta0=abs(coeffs.zeta0),
    )


def appendix_map_coeffs(alpha, alpha_dot, phi, G):
    """
    Coefficients of S and P in the invariant ladder operators

    S = sqrt(2 hbar) (chi A + chi* A^+),  P = sqrt(2 hbar) (zeta_c A + zeta_c* A^+)

    Parameters
    ----------
    alpha, alpha_dot, phi : float or array
        Ermakov state
    G : float or array
        Kinetic matrix element, amu^-1

    Returns
    -------
    tuple of complex
        (chi, zeta_c) with chi = (alpha/2) e^{-i phi} and
        zeta_c = e^{-i phi}/(2i) (1/alpha + i alpha_dot/G)
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0) or np.any(np.asarray(G) <= 0):
        raise ValueError("alpha and G must be positive")
    rotation = np.exp(-1j * np.asarray(phi, dtype=float))
    chi = 0.5 * alpha * rotation
    zeta_c = rotation / 2j * (1.0 / alpha + 1j * np.asarray(alpha_dot, dtype=float) / G)
    if chi.ndim == 0:
        return complex(chi), complex(zeta_c)
    return chi, zeta_c


def commutator_normalization(chi, zeta_c):
    """4 Im(chi conj(zeta_c)); equals 1 whenever [S, P] = i hbar"""
    return 4.0 * np.imag(chi * np.conj(zeta_c))


def local_boson_map(chi_g: complex, zeta_g: complex, chi_u: complex, zeta_u: complex,
                    mu: float, omega: float) -> np.ndarray:
    """
    Stationary local bosons in terms of the invariant operators

    Rows are (a1, a1^+, a2, a2^+), columns (A_g, A_g^+, A_u, A_u^+), for
    local oscillators of reduced mass mu and frequency omega.
    """
    k = mu * omega
    c = math.sqrt(0.5 * k)
    g_a = c * (chi_g + 1j * zeta_g / k)
    g_ad = c * (np.conj(chi_g) + 1j * np.conj(zeta_g) / k)
    u_a = c * (chi_u + 1j * zeta_u / k)
    u_ad = c * (np.conj(chi_u) + 1j * np.conj(zeta_u) / k)
    # creation rows are the adjoints of the annihilation rows
    return np.array([
        [g_a, g_ad, u_a, u_ad],
        [np.conj(g_ad), np.conj(g_a), np.conj(u_ad), np.conj(u_a)],
        [g_a, g_ad, -u_a, -u_ad],
        [np.conj(g_ad), np.conj(g_a), -np.conj(u_ad), -np.conj(u_a)],
    ], dtype=complex)


def local_polyad_from_map(matrix: np.ndarray, n_g: int, n_u: int) -> float:
    """<a1^+ a1 + a2^+ a2> in the invariant Fock state |n_g, n_u>"""
    total = 0.0
    for row in (0, 2):
        coef = matrix[row]
        total += abs(coef[0]) ** 2 * n_g + abs(coef[1]) ** 2 * (n_g + 1)
        total += abs(coef[2]) ** 2 * n_u + abs(coef[3]) ** 2 * (n_u + 1)
    return float(total)
