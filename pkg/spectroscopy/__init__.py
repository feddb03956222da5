"""
Stationary spectroscopy of A2B molecules: units, G/F matrices, local/normal algebra
"""
from .units import (
    PhysicalConstants, CONSTANTS, HBAR, aj_to_internal, internal_to_aj,
    internal_energy_to_wavenumber, wavenumber_to_internal, angular_frequency_to_wavenumber
)
from .molecule import (
    MoleculeSpec, GMatrixElements, CouplingRatios, MoleculeError, DegenerateFrequency,
    TABLE1_REFERENCE, builtin_table, get_molecule, g_matrix, coupling_ratios, molecule_ratios,
    potential_elements, omega0, reduced_mass, normal_frequencies, zeta_stationary,
    with_scaled_coupling, load_molecule_file
)
from .algebra import (
    BogoliubovParams, ResonanceWeights, PolyadCoefficients, NormalModeParams,
    LocalLimitDiagnostics, rs_params, polyad_coefficients, stationary_polyad_expectation,
    local_coupling, normal_mode_params, local_limit_diagnostics, appendix_map_coeffs,
    commutator_normalization, local_boson_map, local_polyad_from_map
)

__all__ = [
    'PhysicalConstants',
    'CONSTANTS',
    'HBAR',
    'aj_to_internal',
    'internal_to_aj',
    'internal_energy_to_wavenumber',
    'wavenumber_to_internal',
    'angular_frequency_to_wavenumber',
    'MoleculeSpec',
    'GMatrixElements',
    'CouplingRatios',
    'MoleculeError',
    'DegenerateFrequency',
    'TABLE1_REFERENCE',
    'builtin_table',
    'get_molecule',
    'g_matrix',
    'coupling_ratios',
    'molecule_ratios',
    'potential_elements',
    'omega0',
    'reduced_mass',
    'normal_frequencies',
    'zeta_stationary',
    'with_scaled_coupling',
    'load_molecule_file',
    'BogoliubovParams',
    'ResonanceWeights',
    'PolyadCoefficients',
    'NormalModeParams',
    'LocalLimitDiagnostics',
    'rs_params',
    'polyad_coefficients',
    'stationary_polyad_expectation',
    'local_coupling',
    'normal_mode_params',
    'local_limit_diagnostics',
    'appendix_map_coeffs',
    'commutator_normalization',
    'local_boson_map',
    'local_polyad_from_map'
]
