#!/usr/bin/env python3
"""
Command-line tool to simulate the time-dependent local/normal mode transition

Usage:
    python simulate_transition.py run configs/h2o_adiabatic.ini
    python simulate_transition.py table1
    python simulate_transition.py compare configs/h2o_compare.ini --polyad 4
    python simulate_transition.py correlate configs/o3_correlation.ini --cm1
    python simulate_transition.py locality --k 0.05
"""
import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import pandas as pd

# Add current directory to path
sys.path.insert(0, str(Path(__file__).parent))

from propagation.config import ConfigError, RunConfig, load_config
from propagation.ermakov import SolverConfig, SolverError
from propagation.scenarios import (
    compare_schedules, correlate, final_locality_report, run_scenario, table1_report, write_csv
)

EXIT_ERROR = 1
EXIT_BUDGET = 2


def _load(args) -> RunConfig:
    config = load_config(args.config)
    if args.tolerance_override is not None:
        config = replace(config, solver=config.solver.with_tolerance(args.tolerance_override))
    return config


def _banner(title: str):
    print("=" * 70)
    print(title)
    print("=" * 70)


def cmd_run(args) -> int:
    config = _load(args)
    _banner(f"RUN: {config.molecule.name}, {config.schedule.kind} schedule, "
            f"{len(config.states)} state(s)")
    result = run_scenario(config, args.out_dir, cm1=args.cm1)
    for name, path in result.paths.items():
        print(f"  ✓ Saved {name:15s}: {path}")
    print()
    print("Invariant checks:")
    for key, value in result.checks.items():
        print(f"  {key:28s} {value:.3e}")
    if not result.passed:
        print("\nERROR: invariant checks exceed the configured budgets")
        return EXIT_BUDGET
    print("\n✓ All checks within budgets")
    return 0


def cmd_table1(args) -> int:
    _banner("SPECTROSCOPIC PARAMETERS: computed vs tabulated")
    report = table1_report()
    with pd.option_context('display.width', 200, 'display.max_columns', None):
        print(report.to_string(float_format=lambda v: f"{v:.4f}"))
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = write_csv(report.reset_index(), out_dir / 'table1.csv')
        print(f"\n  ✓ Saved table1: {path}")
    return 0


def cmd_compare(args) -> int:
    config = _load(args)
    _banner(f"SCHEDULE COMPARISON: {config.molecule.name}, polyad {args.polyad}")
    frame = compare_schedules(config, polyad=args.polyad, symmetric_only=not args.all_states,
                              out_dir=args.out_dir, cm1=args.cm1)
    print(frame.iloc[[0, -1]].T.to_string())
    print(f"\n  ✓ Saved compare: {Path(args.out_dir) / 'compare.csv'}")
    return 0


def cmd_correlate(args) -> int:
    config = _load(args)
    _banner(f"ENERGY CORRELATION: {config.molecule.name}")
    frame = correlate(config, out_dir=args.out_dir, cm1=args.cm1)
    print(f"  {len(frame)} angles from {frame['theta_deg'].iloc[0]:.2f} "
          f"to {frame['theta_deg'].iloc[-1]:.2f} deg, {len(config.states)} state(s)")
    print(f"\n  ✓ Saved correlation: {Path(args.out_dir) / 'correlation.csv'}")
    return 0


def cmd_locality(args) -> int:
    _banner(f"FINAL LOCALITY (adiabatic, k = {args.k} fs^-1)")
    cfg = SolverConfig()
    if args.tolerance_override is not None:
        cfg = cfg.with_tolerance(args.tolerance_override)
    report = final_locality_report(k=args.k, cfg=cfg)
    print(report.to_string(float_format=lambda v: f"{v:.4f}"))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = write_csv(report.reset_index(), out_dir / 'locality.csv')
    print(f"\n  ✓ Saved locality: {path}")
    return 0 if report['within_window'].all() else EXIT_BUDGET


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Simulate the time-dependent local-to-normal mode transition of A2B molecules',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s run configs/h2o_adiabatic.ini --out-dir results/h2o
  %(prog)s run configs/co2_sudden.ini --tolerance-override 1e-9
  %(prog)s table1
  %(prog)s compare configs/h2o_compare.ini --polyad 4
  %(prog)s correlate configs/o3_correlation.ini --cm1
  %(prog)s locality
        """
    )
    # Shared options, accepted after any subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--out-dir',
        default='results',
        help='Directory for CSV outputs and manifest (default: results)'
    )
    common.add_argument(
        '--tolerance-override',
        type=float,
        help='Replace rel_tol (abs_tol becomes rel_tol/100)'
    )
    common.add_argument(
        '--cm1',
        action='store_true',
        help='Append cm^-1 columns to energy tables'
    )
    common.add_argument(
        '--verbose',
        '-v',
        action='store_true',
        help='Log solver statistics and checks'
    )

    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', parents=[common], help='Run one configuration')
    run.add_argument('config', help='INI run configuration (or a previous manifest.ini)')
    run.set_defaults(func=cmd_run)

    table1 = sub.add_parser('table1', parents=[common], aliases=['reference'],
                            help='Recompute the built-in spectroscopic table')
    table1.set_defaults(func=cmd_table1)

    compare = sub.add_parser('compare', parents=[common], help='Compare sudden, linear and adiabatic schedules')
    compare.add_argument('config', help='INI run configuration')
    compare.add_argument('--polyad', type=int, default=4, help='Polyad to compare (default: 4)')
    compare.add_argument('--all-states', action='store_true',
                         help='Include antisymmetric polyad members')
    compare.set_defaults(func=cmd_compare)

    corr = sub.add_parser('correlate', parents=[common], help='Stationary energy correlation over a theta grid')
    corr.add_argument('config', help='INI run configuration')
    corr.set_defaults(func=cmd_correlate)

    locality = sub.add_parser('locality', parents=[common], help='Final zeta of the adiabatic runs of all molecules')
    locality.add_argument('--k', type=float, default=0.05, help='Adiabatic rate in fs^-1 (default: 0.05)')
    locality.set_defaults(func=cmd_locality)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        return args.func(args)
    except (ConfigError, SolverError, ValueError) as e:
        print(f"ERROR: {e}")
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
