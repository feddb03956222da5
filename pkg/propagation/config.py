"""
INI run configurations: parsing with line/field diagnostics and exact echo
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple, Union
import configparser
import math
import re

import numpy as np

from spectroscopy.algebra import ResonanceWeights
from spectroscopy.molecule import (
    MoleculeError, MoleculeSpec, get_molecule, load_molecule_file,
    molecule_from_mapping, molecule_to_mapping
)
from .dynamics import ModeOccupation, states_up_to
from .ermakov import DEFAULT_T_START, SolverConfig
from .schedule import AngleSchedule, ScheduleError
from .wavefunction import DEFAULT_POINTS, DEFAULT_WIDTH

OUTPUT_KINDS = ('energies', 'uncertainties', 'polyads', 'zeta', 'wavefunction', 'correlation')
DEFAULT_OUTPUTS = ('energies', 'polyads', 'zeta')

_SECTIONS = {
    'molecule': None,  # validated by the molecule reader
    'schedule': {'kind', 'theta0_deg', 'thetaf_deg', 't0_fs', 'tf_fs', 'k_per_fs'},
    'solver': {'method', 'rel_tol', 'abs_tol', 'max_step_fs', 'output_stride_fs'},
    'run': {'t_start_fs', 't_end_fs', 'states', 'max_polyad', 'outputs', 'theta_grid_deg', 'eta'},
    'budgets': {'max_companion_drift', 'max_uncertainty_deviation', 'max_polyad_mismatch'},
    'wavefunction': {'times_fs', 'points', 'width'},
}
# Written by run manifests, skipped when a manifest is loaded as a config
MANIFEST_SECTIONS = ('constants', 'statistics', 'check_summary', 'artifact')


class ConfigError(ValueError):
    """Invalid run configuration"""

    def __init__(self, message: str, source: str = '<config>', section: Optional[str] = None,
                 key: Optional[str] = None, line: Optional[int] = None):
        self.source = source
        self.section = section
        self.key = key
        self.line = line
        self.reason = message
        where = source if line is None else f"{source}:{line}"
        if section is not None:
            where += f" [{section}]"
            if key is not None:
                where += f" {key}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Budgets:
    """Invariant-check limits; a run exceeding any of them fails"""
    max_companion_drift: float = 1e-7
    max_uncertainty_deviation: float = 1e-9
    max_polyad_mismatch: float = 1e-10


@dataclass(frozen=True)
class WavefunctionOptions:
    times: Tuple[float, ...] = ()  # empty: first and last sample
    points: int = DEFAULT_POINTS
    width: float = DEFAULT_WIDTH


@dataclass(frozen=True)
class RunConfig:
    """A fully resolved run"""
    molecule: MoleculeSpec
    schedule: AngleSchedule
    solver: SolverConfig = SolverConfig()
    states: Tuple[ModeOccupation, ...] = (ModeOccupation(0, 0),)
    t_start: float = DEFAULT_T_START
    t_end: float = 400.0
    outputs: Tuple[str, ...] = DEFAULT_OUTPUTS
    theta_grid: Optional[Tuple[float, ...]] = None
    eta: ResonanceWeights = ResonanceWeights()
    budgets: Budgets = Budgets()
    wavefunction: WavefunctionOptions = WavefunctionOptions()
    source: str = field(default='<config>', compare=False)

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ConfigError("t_start_fs must be earlier than t_end_fs", self.source, 'run')
        if not self.states:
            raise ConfigError("no states requested", self.source, 'run', 'states')
        unknown = [o for o in self.outputs if o not in OUTPUT_KINDS]
        if unknown:
            raise ConfigError(f"unknown output(s) {', '.join(unknown)}", self.source, 'run', 'outputs')


def _line_of(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        header = re.match(r'^\[([^\]]+)\]', line)
        if header:
            current = header.group(1).strip()
            if key is None and current == section:
                return number
            continue
        if current == section and key is not None and re.match(rf'^{re.escape(key)}\s*[=:]', line):
            return number
    return None


class _Reader:
    """Typed access to one parsed file with located errors"""

    def __init__(self, parser: configparser.ConfigParser, text: str, source: str):
        self.parser = parser
        self.text = text
        self.source = source

    def error(self, message: str, section: str, key: Optional[str] = None) -> ConfigError:
        return ConfigError(message, self.source, section, key, _line_of(self.text, section, key))

    def raw(self, section: str, key: str) -> Optional[str]:
        if not self.parser.has_section(section) or not self.parser.has_option(section, key):
            return None
        return self.parser.get(section, key).strip()

    def number(self, section: str, key: str, default: Optional[float]) -> Optional[float]:
        raw = self.raw(section, key)
        if raw is None:
            return default
        try:
            value = float(raw)
        except ValueError:
            raise self.error(f"not a number: '{raw}'", section, key) from None
        if math.isnan(value):
            raise self.error("NaN is not allowed", section, key)
        return value

    def integer(self, section: str, key: str, default: Optional[int]) -> Optional[int]:
        raw = self.raw(section, key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise self.error(f"not an integer: '{raw}'", section, key) from None

    def number_list(self, section: str, key: str) -> Optional[Tuple[float, ...]]:
        raw = self.raw(section, key)
        if raw is None:
            return None
        try:
            return tuple(float(item) for item in raw.split(',') if item.strip())
        except ValueError:
            raise self.error(f"expected comma-separated numbers: '{raw}'", section, key) from None


def _parse_states(reader: _Reader) -> Tuple[ModeOccupation, ...]:
    raw = reader.raw('run', 'states')
    max_polyad = reader.integer('run', 'max_polyad', None)
    if raw is not None and max_polyad is not None:
        raise reader.error("give either states or max_polyad, not both", 'run', 'max_polyad')
    if max_polyad is not None:
        if max_polyad < 0:
            raise reader.error("max_polyad must be non-negative", 'run', 'max_polyad')
        return tuple(states_up_to(max_polyad))
    if raw is None:
        return (ModeOccupation(0, 0),)
    states = []
    for item in raw.split(';'):
        if not item.strip():
            continue
        parts = [p.strip() for p in item.split(',')]
        try:
            n_g, n_u = (int(p) for p in parts)
            states.append(ModeOccupation(n_g, n_u))
        except ValueError:
            raise reader.error(f"bad state '{item.strip()}' (expected 'n_g, n_u')", 'run', 'states') from None
    if not states:
        raise reader.error("no states requested", 'run', 'states')
    return tuple(states)


def _parse_theta_grid(reader: _Reader) -> Optional[Tuple[float, ...]]:
    raw = reader.raw('run', 'theta_grid_deg')
    if raw is None:
        return None
    if ':' in raw:
        parts = raw.split(':')
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except (ValueError, IndexError):
            raise reader.error(f"expected 'start:stop:count', got '{raw}'", 'run', 'theta_grid_deg') from None
        if len(parts) != 3 or count < 2:
            raise reader.error("range needs exactly start:stop:count with count >= 2",
                               'run', 'theta_grid_deg')
        return tuple(float(v) for v in np.linspace(start, stop, count))
    return reader.number_list('run', 'theta_grid_deg')


def _parse_molecule(reader: _Reader, base_dir: Optional[Path]) -> MoleculeSpec:
    if not reader.parser.has_section('molecule'):
        raise reader.error("missing [molecule] section", 'molecule')
    values = dict(reader.parser['molecule'])
    try:
        if 'file' in values:
            if len(values) > 1:
                raise reader.error("'file' cannot be combined with other keys", 'molecule', 'file')
            path = Path(values['file'].strip())
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return load_molecule_file(path)
        if 'name' not in values:
            raise reader.error("give a molecule name, a file, or inline parameters", 'molecule')
        try:
            builtin = get_molecule(values['name'])
        except MoleculeError:
            builtin = None
        if builtin is not None:
            merged = molecule_to_mapping(builtin)
            merged.update(values)
            values = merged
        return molecule_from_mapping(values, source=reader.source)
    except MoleculeError as e:
        raise reader.error(str(e), 'molecule') from e


def _parse(parser: configparser.ConfigParser, text: str, source: str,
           base_dir: Optional[Path]) -> RunConfig:
    reader = _Reader(parser, text, source)
    for section in parser.sections():
        if section in MANIFEST_SECTIONS:
            continue
        if section not in _SECTIONS:
            raise reader.error("unknown section", section)
        allowed = _SECTIONS[section]
        if allowed is None:
            continue
        for key in parser.options(section):
            if key not in allowed:
                raise reader.error("unknown key", section, key)

    molecule = _parse_molecule(reader, base_dir)

    try:
        schedule = AngleSchedule(
            kind=reader.raw('schedule', 'kind') or 'adiabatic',
            theta0=reader.number('schedule', 'theta0_deg', molecule.theta0),
            thetaf=reader.number('schedule', 'thetaf_deg', molecule.thetaf),
            t0=reader.number('schedule', 't0_fs', 0.0),
            tf=reader.number('schedule', 'tf_fs', 100.0),
            k=reader.number('schedule', 'k_per_fs', 0.05),
        )
    except ScheduleError as e:
        raise reader.error(str(e), 'schedule') from e

    defaults = SolverConfig()
    solver_values = dict(
        method=reader.raw('solver', 'method') or defaults.method,
        rel_tol=reader.number('solver', 'rel_tol', defaults.rel_tol),
        abs_tol=reader.number('solver', 'abs_tol', defaults.abs_tol),
        max_step=reader.number('solver', 'max_step_fs', defaults.max_step),
        output_stride=reader.number('solver', 'output_stride_fs', defaults.output_stride),
    )
    try:
        solver = SolverConfig(**solver_values)
    except ValueError as e:
        raise reader.error(str(e), 'solver') from e

    outputs_raw = reader.raw('run', 'outputs')
    outputs = DEFAULT_OUTPUTS if outputs_raw is None else tuple(
        item.strip() for item in outputs_raw.split(',') if item.strip()
    )
    eta_values = reader.number_list('run', 'eta')
    if eta_values is None:
        eta = ResonanceWeights()
    else:
        if len(eta_values) != 2 or any(v != int(v) for v in eta_values):
            raise reader.error("expected two integer weights 'eta1, eta2'", 'run', 'eta')
        try:
            eta = ResonanceWeights(int(eta_values[0]), int(eta_values[1]))
        except ValueError as e:
            raise reader.error(str(e), 'run', 'eta') from e

    b = Budgets()
    budgets = Budgets(
        max_companion_drift=reader.number('budgets', 'max_companion_drift', b.max_companion_drift),
        max_uncertainty_deviation=reader.number('budgets', 'max_uncertainty_deviation',
                                                b.max_uncertainty_deviation),
        max_polyad_mismatch=reader.number('budgets', 'max_polyad_mismatch', b.max_polyad_mismatch),
    )
    w = WavefunctionOptions()
    wavefunction = WavefunctionOptions(
        times=reader.number_list('wavefunction', 'times_fs') or (),
        points=reader.integer('wavefunction', 'points', w.points),
        width=reader.number('wavefunction', 'width', w.width),
    )
    if wavefunction.points < 16:
        raise reader.error("points must be at least 16", 'wavefunction', 'points')

    try:
        return RunConfig(
            molecule=molecule,
            schedule=schedule,
            solver=solver,
            states=_parse_states(reader),
            t_start=reader.number('run', 't_start_fs', DEFAULT_T_START),
            t_end=reader.number('run', 't_end_fs', 400.0),
            outputs=outputs,
            theta_grid=_parse_theta_grid(reader),
            eta=eta,
            budgets=budgets,
            wavefunction=wavefunction,
            source=source,
        )
    except ConfigError as e:
        if e.line is None and e.section is not None:
            raise reader.error(e.reason, e.section, e.key) from None
        raise


def config_from_string(text: str, source: str = '<string>',
                       base_dir: Optional[Path] = None) -> RunConfig:
    """Parse a run configuration from INI text"""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#',))
    try:
        parser.read_string(text, source=source)
    except configparser.ParsingError as e:
        line = e.errors[0][0] if e.errors else None
        raise ConfigError("syntax error", source, line=line) from e
    except configparser.Error as e:
        raise ConfigError(e.message, source, line=getattr(e, 'lineno', None)) from e
    return _parse(parser, text, source, base_dir)


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read a run configuration (or a run manifest) from disk"""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read configuration ({e})", str(path)) from e
    return config_from_string(text, source=str(path), base_dir=path.parent)


def config_to_parser(config: RunConfig) -> configparser.ConfigParser:
    """Exact echo of a resolved configuration; floats are written with repr()"""
    parser = configparser.ConfigParser(interpolation=None)
    parser['molecule'] = molecule_to_mapping(config.molecule)
    s = config.schedule
    parser['schedule'] = {
        'kind': s.kind,
        'theta0_deg': repr(s.theta0),
        'thetaf_deg': repr(s.thetaf),
        't0_fs': repr(s.t0),
    }
    if s.tf is not None:
        parser['schedule']['tf_fs'] = repr(s.tf)
    if s.k is not None:
        parser['schedule']['k_per_fs'] = repr(s.k)
    v = config.solver
    parser['solver'] = {
        'method': v.method,
        'rel_tol': repr(v.rel_tol),
        'abs_tol': repr(v.abs_tol),
        'max_step_fs': repr(v.max_step),
        'output_stride_fs': repr(v.output_stride),
    }
    run: Dict[str, str] = {
        't_start_fs': repr(config.t_start),
        't_end_fs': repr(config.t_end),
        'states': '; '.join(f"{o.n_g},{o.n_u}" for o in config.states),
        'outputs': ', '.join(config.outputs),
        'eta': f"{config.eta.eta1}, {config.eta.eta2}",
    }
    if config.theta_grid is not None:
        run['theta_grid_deg'] = ', '.join(repr(t) for t in config.theta_grid)
    parser['run'] = run
    parser['budgets'] = {
        'max_companion_drift': repr(config.budgets.max_companion_drift),
        'max_uncertainty_deviation': repr(config.budgets.max_uncertainty_deviation),
        'max_polyad_mismatch': repr(config.budgets.max_polyad_mismatch),
    }
    wf = {'points': str(config.wavefunction.points), 'width': repr(config.wavefunction.width)}
    if config.wavefunction.times:
        wf['times_fs'] = ', '.join(repr(t) for t in config.wavefunction.times)
    parser['wavefunction'] = wf
    return parser
