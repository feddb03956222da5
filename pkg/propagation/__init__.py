"""
Time-dependent local/normal mode transition: schedules, Ermakov solver, observables, scenarios
"""
from .schedule import (
    AngleSchedule, KineticElements, ScheduleError, SCHEDULE_KINDS, theta_at, theta_rate,
    kinetic_at, breakpoints, segments, kinetic_on_segment
)
from .ermakov import (
    ErmakovState, ErmakovTrajectory, SolverConfig, SolverStatistics, SolverError,
    StepSizeUnderflow, NonPositiveKinetic, initial_conditions, integrate, integrate_mode,
    pinney_closed_form, companion_solution, companion_linear_check
)
from .dynamics import (
    ModeOccupation, ObservableSeries, NormalPolyadMean, MisalignedSeries, polyad_states,
    states_up_to, uncertainties, mean_hamiltonian, local_polyad_mean, normal_polyad_mean,
    observable_series, local_polyad_amplitude, zeta_from_trajectories, zeta_t,
    stationary_zeta, energy_correlation
)
from .wavefunction import (
    WavefunctionGrid, GridTooNarrow, hermite_functions, default_grid, eval_psi, overlap,
    position_moments, momentum_variance, schrodinger_residual, density_frame
)
from .config import RunConfig, ConfigError, load_config, config_from_string
from .scenarios import (
    __version__, RunResult, run_scenario, compare_schedules, correlate, table1_report,
    final_locality_report
)

__all__ = [
    'AngleSchedule',
    'KineticElements',
    'ScheduleError',
    'SCHEDULE_KINDS',
    'theta_at',
    'theta_rate',
    'kinetic_at',
    'breakpoints',
    'segments',
    'kinetic_on_segment',
    'ErmakovState',
    'ErmakovTrajectory',
    'SolverConfig',
    'SolverStatistics',
    'SolverError',
    'StepSizeUnderflow',
    'NonPositiveKinetic',
    'initial_conditions',
    'integrate',
    'integrate_mode',
    'pinney_closed_form',
    'companion_solution',
    'companion_linear_check',
    'ModeOccupation',
    'ObservableSeries',
    'NormalPolyadMean',
    'MisalignedSeries',
    'polyad_states',
    'states_up_to',
    'uncertainties',
    'mean_hamiltonian',
    'local_polyad_mean',
    'normal_polyad_mean',
    'observable_series',
    'local_polyad_amplitude',
    'zeta_from_trajectories',
    'zeta_t',
    'stationary_zeta',
    'energy_correlation',
    'WavefunctionGrid',
    'GridTooNarrow',
    'hermite_functions',
    'default_grid',
    'eval_psi',
    'overlap',
    'position_moments',
    'momentum_variance',
    'schrodinger_residual',
    'density_frame',
    'RunConfig',
    'ConfigError',
    'load_config',
    'config_from_string',
    'RunResult',
    'run_scenario',
    'compare_schedules',
    'correlate',
    'table1_report',
    'final_locality_report'
]
