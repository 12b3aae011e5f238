#!/usr/bin/env python3
"""Cutoff-protocol convergence experiment for a random rank-deficient state.

Usage: python scripts/protocol_convergence.py [SEED] [DIM] [RANK]
"""

import sys

import numpy as np

from workbound.operators import HermitianOperator, density_from_matrix
from workbound.thermo import ProtocolSpec, run_cutoff_protocol


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    dim = int(sys.argv[2]) if len(sys.argv) > 2 else 4
    rank = int(sys.argv[3]) if len(sys.argv) > 3 else 2
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    rho = density_from_matrix(m / np.trace(m).real)
    levels = rng.uniform(0.0, 1.0, dim)
    h = HermitianOperator(np.diag(levels))

    print(f"dim={dim} rank={rank} seed={seed}")
    print("lambda,w_quench,w_isothermal,w_total,gap,deficit")
    for lam in np.geomspace(1.0, 20.0, 9):
        result = run_cutoff_protocol(
            ProtocolSpec(rho=rho, hamiltonian=h, temperature=1.0, cutoff_lambda=float(lam))
        )
        deficit = result.free_energy_gap - result.w_total
        print(
            f"{lam:.4f},{result.w_quench:.12f},{result.w_isothermal:.12f},"
            f"{result.w_total:.12f},{result.free_energy_gap:.12f},{deficit:.3e}"
        )


if __name__ == "__main__":
    main()
