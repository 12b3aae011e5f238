"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints one PASS line (visible with ``pytest -s``) and enforces its
runtime budget. Tolerances are pinned here and nowhere else.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np

import workbound.thermo as thermo
from workbound.alignment import (
    best_alignment,
    equatorial_family,
    equatorial_threshold,
    sphere_alignment_montecarlo,
)
from workbound.commuting import (
    classical_benchmark,
    commuting_lower_bound,
    law_upper_max,
    oracle_max,
)
from workbound.operators import HermitianOperator, density_from_matrix
from workbound.task import MinimalTaskInstance
from workbound.verify import (
    ergotropy_suite,
    envelope_suite,
    law_suite,
)

SYMMETRIC = MinimalTaskInstance(theta=math.pi / 4, mu0=0.5, mu1=0.5)
TIGHT_VALUE = 0.85355339
OPTIMAL_ADVANTAGE = 0.14644661


def _announce(number, elapsed, detail):
    print(f"ACCEPTANCE {number} PASS: {detail} ({elapsed:.1f}s)")


def test_criterion_1_optimal_advantage_reproduction():
    start = time.perf_counter()
    result = subprocess.run(
        [sys.executable, "-m", "workbound", "benchmark", "minimal", "--resolution", "64", "--json"],
        capture_output=True,
        text=True,
    )
    elapsed = time.perf_counter() - start
    assert result.returncode == 0, result.stdout + result.stderr
    payload = json.loads(result.stdout)
    assert abs(payload["advantage"] - OPTIMAL_ADVANTAGE) < 1e-5
    assert abs(payload["optimal_theta"] - math.pi / 4) < 1e-3
    assert abs(payload["optimal_mu"][0] - 0.5) < 1e-3
    assert abs(payload["optimal_mu"][1] - 0.5) < 1e-3
    assert elapsed < 30.0
    _announce(1, elapsed, f"benchmark minimal advantage {payload['advantage']:.8f}")


def test_criterion_2_classical_benchmark_tightness():
    start = time.perf_counter()
    oracle = oracle_max(SYMMETRIC, point_count=8, restarts=64, seed=11)
    lower = commuting_lower_bound(SYMMETRIC)
    upper = law_upper_max(SYMMETRIC).value
    elapsed = time.perf_counter() - start
    for name, value in (("oracle", oracle.value), ("construction", lower), ("law", upper)):
        assert abs(value - TIGHT_VALUE) < 1e-5, (name, value)
    assert elapsed < 60.0
    _announce(
        2,
        elapsed,
        f"oracle {oracle.value:.8f} construction {lower:.8f} law {upper:.8f}",
    )


def test_criterion_3_law_soundness_suite():
    start = time.perf_counter()
    results = law_suite(trials=1000, seed=7)
    elapsed = time.perf_counter() - start
    by_name = {r.name: r for r in results}
    assert by_name["law.soundness"].checks == 50_000
    assert by_name["law.soundness"].failures == 0
    assert by_name["law.feasibility_ellipse"].failures == 0
    assert elapsed < 120.0
    _announce(3, elapsed, "50000 devices obey the law and stay in the ellipse")


def test_criterion_4_envelope_suite():
    start = time.perf_counter()
    results = envelope_suite(trials=1000, seed=5)
    elapsed = time.perf_counter() - start
    by_name = {r.name: r for r in results}
    assert by_name["envelope.compression_cap"].checks == 1000
    assert by_name["envelope.compression_cap"].failures == 0
    assert by_name["envelope.attainment_grid"].checks == 101
    assert by_name["envelope.attainment_grid"].failures == 0
    _announce(4, elapsed, "1000 span settings capped by min(1, 2 mu); 101-point grid exact")


def test_criterion_5_hierarchy_thresholds():
    start = time.perf_counter()
    for n in range(2, 13):
        enumerated = best_alignment(equatorial_family(n))
        assert enumerated.method == "enumeration"
        assert abs(enumerated.r_value - equatorial_threshold(n)) < 1e-9
    assert abs(equatorial_threshold(2) - 0.70710678) < 1e-8
    assert abs(equatorial_threshold(200) - 0.63661977) < 1e-4
    estimate, _ = sphere_alignment_montecarlo(1_000_000, seed=17)
    assert abs(estimate - 0.5) < 1e-3
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    _announce(
        5,
        elapsed,
        f"equatorial identities exact, v_c(2..200) limits hit, sphere MC {estimate:.5f}",
    )


def test_criterion_6_protocol_convergence():
    start = time.perf_counter()
    rho = density_from_matrix(np.diag([0.0, 1.0]))
    h = HermitianOperator(np.diag([0.0, 1.0]))
    previous = -math.inf
    for lam in (1.0, 2.0, 5.0, 10.0, 20.0):
        result = thermo.run_cutoff_protocol(
            thermo.ProtocolSpec(rho=rho, hamiltonian=h, temperature=1.0, cutoff_lambda=lam)
        )
        target = result.free_energy_gap - math.log1p(math.exp(-lam))
        assert abs(result.w_total - target) < 1e-9
        assert result.w_total > previous
        assert result.w_total < result.free_energy_gap
        previous = result.w_total
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _announce(6, elapsed, "stepwise work matches gap - log(1 + e^-lambda) on the ladder")


def test_criterion_7_ergotropy_ordering():
    start = time.perf_counter()
    results = ergotropy_suite(trials=1000, seed=3)
    elapsed = time.perf_counter() - start
    by_name = {r.name: r for r in results}
    assert by_name["ergotropy.free_energy_ordering"].checks == 1000
    assert by_name["ergotropy.free_energy_ordering"].failures == 0
    assert elapsed < 30.0
    _announce(7, elapsed, "1000 random triples satisfy ergotropy <= cyclic bound")


def test_criterion_8_determinism():
    start = time.perf_counter()
    command = [sys.executable, "-m", "workbound", "verify", "all", "--seed", "7"]
    first = subprocess.run(command, capture_output=True)
    second = subprocess.run(command, capture_output=True)
    elapsed = time.perf_counter() - start
    assert first.returncode == 0, first.stdout.decode() + first.stderr.decode()
    assert second.returncode == 0
    assert first.stdout == second.stdout
    _announce(8, elapsed, "verify all --seed 7 reports are byte-identical")
