#!/usr/bin/env python3
"""
Example usage of the local/normal mode transition library

This script shows how to build molecules, propagate the Ermakov widths along a
bond-angle schedule and read off energies, polyads and the locality parameter.
"""

from spectroscopy import (
    get_molecule,
    molecule_ratios,
    rs_params,
    polyad_coefficients,
    local_limit_diagnostics,
    angular_frequency_to_wavenumber,
    internal_energy_to_wavenumber,
    normal_frequencies
)
from propagation import (
    AngleSchedule,
    SolverConfig,
    ModeOccupation,
    integrate,
    observable_series,
    zeta_t,
    companion_linear_check,
    schrodinger_residual
)


def example_1_stationary_parameters():
    """Example 1: Stationary local/normal parameters of the built-in molecules"""
    print("\n" + "=" * 70)
    print("EXAMPLE 1: Stationary Parameters")
    print("=" * 70)

    for name in ('H2O', 'O3', 'CO2', 'NO2'):
        spec = get_molecule(name)
        x = molecule_ratios(spec)
        coeffs = polyad_coefficients(rs_params(x))
        diagnostics = local_limit_diagnostics(x)
        omega_g, omega_u = normal_frequencies(spec, spec.theta0)
        print(f"\n{name} at {spec.theta0} deg")
        print(f"  x_f = {x.x_f:+.4f}, x_g = {x.x_g:+.4f}")
        print(f"  omega_g = {angular_frequency_to_wavenumber(omega_g):.1f} cm^-1, "
              f"omega_u = {angular_frequency_to_wavenumber(omega_u):.1f} cm^-1")
        print(f"  zeta0 = {coeffs.zeta0:.2e}, beta0 - 1 = {coeffs.beta0 - 1:.2e}, "
              f"beta3 = {coeffs.beta3:.2e}")
        print(f"  |beta0 - 1| = {diagnostics.dev_beta0:.2e}")


def example_2_adiabatic_water():
    """Example 2: Energies of water while the bond angle opens"""
    print("\n" + "=" * 70)
    print("EXAMPLE 2: Adiabatic Opening of H2O")
    print("=" * 70)

    spec = get_molecule('H2O')
    sched = AngleSchedule('adiabatic', spec.theta0, spec.thetaf, k=0.05)
    trajs = integrate(spec, sched, SolverConfig(), t_end=200.0, t_start=-200.0)

    for occ in (ModeOccupation(0, 0), ModeOccupation(1, 0), ModeOccupation(0, 1)):
        series = observable_series(trajs, occ, spec)
        start = internal_energy_to_wavenumber(series.mean_H[0])
        end = internal_energy_to_wavenumber(series.mean_H[-1])
        print(f"  |{occ.n_g},{occ.n_u}>: {start:8.1f} -> {end:8.1f} cm^-1, "
              f"<P_L> amplitude {abs(series.mean_PL - occ.polyad).max():.2e}")

    for traj in trajs:
        print(f"  companion drift ({traj.mode}): {companion_linear_check(traj):.2e}")
    print(f"  Schrodinger residual (g, n=1): {schrodinger_residual(trajs[0], 1):.2e}")


def example_3_locality():
    """Example 3: Locality parameter along the three schedules"""
    print("\n" + "=" * 70)
    print("EXAMPLE 3: Locality of O3 for Each Schedule")
    print("=" * 70)

    spec = get_molecule('O3')
    schedules = [
        AngleSchedule('sudden', spec.theta0, spec.thetaf, t0=0.0),
        AngleSchedule('linear', spec.theta0, spec.thetaf, t0=0.0, tf=100.0),
        AngleSchedule('adiabatic', spec.theta0, spec.thetaf, k=0.05),
    ]
    for sched in schedules:
        zeta = zeta_t(spec, sched, t_end=300.0, t_start=-100.0)
        print(f"  {sched.kind:10s} zeta: {zeta.iloc[0]:.4f} -> {zeta.iloc[-1]:.4f} "
              f"(min {zeta.min():.4f} at t = {zeta.idxmin():.1f} fs)")


def main():
    """Run all examples"""
    print("\n" + "=" * 70)
    print("LOCAL/NORMAL MODE TRANSITION - USAGE EXAMPLES")
    print("=" * 70)
    print("\nThese examples demonstrate how to:")
    print("  1. Compute stationary local/normal parameters")
    print("  2. Propagate a molecule along an adiabatic schedule")
    print("  3. Track the locality parameter for each schedule")

    try:
        example_1_stationary_parameters()
        example_2_adiabatic_water()
        example_3_locality()

        print("\n" + "=" * 70)
        print("ALL EXAMPLES COMPLETED SUCCESSFULLY!")
        print("=" * 70)
        print("\nNext steps:")
        print("  - Write your own run configuration under configs/")
        print("  - Run it with: python simulate_transition.py run <config>")

    except Exception as e:
        print(f"\n❌ Error: {e}")
        import traceback
        traceback.print_exc()


if __name__ == "__main__":
    main()
