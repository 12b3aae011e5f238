#!/usr/bin/env python3
"""Reproduce every headline constant from one run.

Prints the optimized minimal-task table, the three-way agreement at the
symmetric point, the visibility thresholds of the equatorial ladder, the
full-sphere Monte Carlo limit, and the cutoff-protocol convergence ladder.
"""

import math

import numpy as np

from workbound.advantage import minimal_visibility_threshold, optimize_advantage
from workbound.alignment import equatorial_threshold, sphere_alignment_montecarlo
from workbound.commuting import commuting_lower_bound, law_upper_max, oracle_max
from workbound.operators import HermitianOperator, density_from_matrix
from workbound.task import MinimalTaskInstance
from workbound.thermo import ProtocolSpec, run_cutoff_protocol


def main():
    print("== optimized minimal task ==")
    report = optimize_advantage(grid_resolution=64, refine_tolerance=1e-6)
    print(f"quantum value    {report.quantum_value:.9f}")
    print(f"classical value  {report.classical_value:.9f}")
    print(f"advantage        {report.advantage:.9f}   target {(1 - 1/math.sqrt(2))/2:.9f}")
    print(f"optimal theta    {report.optimal_theta:.9f}   (pi/4 = {math.pi/4:.9f})")
    print(f"optimal mu       ({report.optimal_mu[0]:.6f}, {report.optimal_mu[1]:.6f})")

    print("\n== symmetric-point benchmark, three independent routes ==")
    symmetric = MinimalTaskInstance(theta=math.pi / 4, mu0=0.5, mu1=0.5)
    oracle = oracle_max(symmetric, point_count=8, restarts=64, seed=11)
    print(f"search over devices       {oracle.value:.9f}")
    print(f"two-point construction    {commuting_lower_bound(symmetric):.9f}")
    print(f"maximized law envelope    {law_upper_max(symmetric).value:.9f}")
    print(f"target (1 + 1/sqrt 2)/2   {(1 + 1/math.sqrt(2))/2:.9f}")

    print("\n== visibility thresholds ==")
    print(f"minimal task      {minimal_visibility_threshold():.9f}   (1/sqrt 2)")
    for n in (2, 3, 6, 12, 48, 200):
        print(f"equatorial n={n:<4d} {equatorial_threshold(n):.9f}")
    print(f"limit 2/pi        {2/math.pi:.9f}")
    estimate, std_error = sphere_alignment_montecarlo(1_000_000, seed=17)
    print(f"sphere MC         {estimate:.6f} +/- {std_error:.6f}   (limit 1/2)")

    print("\n== cutoff-protocol ladder (pure qubit, T = 1) ==")
    rho = density_from_matrix(np.diag([0.0, 1.0]))
    h = HermitianOperator(np.diag([0.0, 1.0]))
    for lam in (1.0, 2.0, 5.0, 10.0, 20.0):
        result = run_cutoff_protocol(
            ProtocolSpec(rho=rho, hamiltonian=h, temperature=1.0, cutoff_lambda=lam)
        )
        print(
            f"lambda {lam:>5.1f}  w_total {result.w_total:.12f}  "
            f"gap - w_total {result.free_energy_gap - result.w_total:.3e}"
        )


if __name__ == "__main__":
    main()
