"""Branch-level thermodynamics: free energy, maximum-work bounds, ergotropy,
and the cutoff-regularized quench / thermalize / isothermal protocol.

Energies are dimensionless with k_B = 1 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    DensityState,
    HermitianOperator,
    ValidationError,
    density_from_matrix,
    eigen_decompose,
    log_partition_function,
    operator_from_json,
    operator_to_json,
    von_neumann_entropy,
)

__all__ = [
    "ProtocolSpec",
    "ProtocolResult",
    "free_energy",
    "max_work_bound",
    "ergotropy",
    "run_cutoff_protocol",
    "protocol_spec_to_json",
    "protocol_spec_from_json",
    "protocol_result_to_json",
]

# eigenvalues of rho at or below this join the cutoff (kernel) subspace
RANK_TOL = 1e-12
RESULT_TOL = 1e-10
FORMULA_TOL = 1e-9


def _check_same_dim(a_dim: int, b_dim: int) -> None:
    if a_dim != b_dim:
        raise ValidationError(f"dimension mismatch: {a_dim} vs {b_dim}")


def free_energy(rho: DensityState, h: HermitianOperator, temperature: float) -> float:
    """Nonequilibrium free energy Tr(rho H) - T S(rho)."""
    _check_same_dim(rho.dim, h.dim)
    t = float(temperature)
    if t <= 0.0:
        raise ValidationError(f"temperature must be positive, got {temperature!r}")
    energy = float(np.trace(rho.matrix @ h.entries).real)
    return energy - t * von_neumann_entropy(rho)


def max_work_bound(
    rho: DensityState,
    h_initial: HermitianOperator,
    h_final: HermitianOperator,
    temperature: float,
) -> float:
    """Largest average work extractable from one branch: the free-energy drop
    from (rho, H_initial) to the thermal reference of H_final."""
    _check_same_dim(rho.dim, h_initial.dim)
    _check_same_dim(rho.dim, h_final.dim)
    t = float(temperature)
    # F of the thermal state equals -T log Z, evaluated stably
    return free_energy(rho, h_initial, t) + t * log_partition_function(h_final, t)


def ergotropy(rho: DensityState, h: HermitianOperator) -> tuple[float, DensityState]:
    """Unitary-extractable work and the passive rearrangement of ``rho``.

    The passive state pairs descending populations of rho with ascending
    levels of h, which minimizes energy over the unitary orbit.
    """
    _check_same_dim(rho.dim, h.dim)
    populations = rho.spectrum[::-1]  # descending
    levels, level_vectors = eigen_decompose(h)  # ascending
    passive_matrix = (level_vectors * populations) @ level_vectors.conj().T
    energy = float(np.trace(rho.matrix @ h.entries).real)
    passive_energy = float(np.dot(populations, levels))
    value = energy - passive_energy
    return value, density_from_matrix(passive_matrix)


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    """Input of one cutoff-protocol run: state, Hamiltonian, bath temperature,
    and the energy penalty assigned to the kernel of the state."""

    rho: DensityState
    hamiltonian: HermitianOperator
    temperature: float
    cutoff_lambda: float

    def __post_init__(self):
        _check_same_dim(self.rho.dim, self.hamiltonian.dim)
        if not (math.isfinite(self.temperature) and self.temperature > 0.0):
            raise ValidationError(f"temperature must be positive, got {self.temperature!r}")
        if not (math.isfinite(self.cutoff_lambda) and self.cutoff_lambda > 0.0):
            raise ValidationError(
                f"cutoff_lambda must be positive, got {self.cutoff_lambda!r}"
            )


@dataclass(frozen=True)
class ProtocolResult:
    w_quench: float
    w_isothermal: float
    w_total: float
    w_formula: float
    free_energy_gap: float
    rank_deficit_k: int

    def __post_init__(self):
        if abs(self.w_total - (self.w_quench + self.w_isothermal)) > RESULT_TOL:
            raise ValidationError("w_total does not decompose into quench + isothermal")
        if self.w_total > self.free_energy_gap + RESULT_TOL:
            raise ValidationError("protocol work exceeds the free-energy gap")


def run_cutoff_protocol(spec: ProtocolSpec) -> ProtocolResult:
    """Quench to the cutoff Hamiltonian, thermalize, return isothermally.

    The cutoff Hamiltonian puts level -T log r_i on each supported eigenvector
    of rho and the penalty Lambda on its kernel (eigenvalues <= 1e-12). The
    quench work is Tr(rho H) - Tr(rho G); the isothermal stroke contributes
    the endpoint free-energy difference. The total obeys the closed form
    gap - T log(1 + k exp(-Lambda/T)) with k the kernel dimension.
    """
    t = spec.temperature
    lam = spec.cutoff_lambda
    r, vectors = np.linalg.eigh(spec.rho.matrix)
    support = r > RANK_TOL
    k = int(np.count_nonzero(~support))
    r_safe = np.where(support, r, 1.0)
    levels = np.where(support, -t * np.log(r_safe), lam)
    cutoff_h = HermitianOperator((vectors * levels) @ vectors.conj().T)

    weights = np.exp(-levels / t)
    populations = weights / float(np.sum(weights))
    gamma = density_from_matrix((vectors * populations) @ vectors.conj().T)

    f_thermal = -t * log_partition_function(spec.hamiltonian, t)
    energy_initial = float(np.trace(spec.rho.matrix @ spec.hamiltonian.entries).real)
    w_quench = energy_initial - float(np.dot(r, levels))
    w_isothermal = free_energy(gamma, cutoff_h, t) - f_thermal
    w_total = w_quench + w_isothermal

    gap = free_energy(spec.rho, spec.hamiltonian, t) - f_thermal
    w_formula = gap - t * math.log1p(k * math.exp(-lam / t))
    if abs(w_total - w_formula) > FORMULA_TOL:
        raise ArithmeticError(
            f"stepwise work {w_total!r} disagrees with the closed form {w_formula!r}"
        )
    return ProtocolResult(
        w_quench=w_quench,
        w_isothermal=w_isothermal,
        w_total=w_total,
        w_formula=w_formula,
        free_energy_gap=gap,
        rank_deficit_k=k,
    )


def protocol_spec_to_json(spec: ProtocolSpec) -> dict:
    return {
        "rho": operator_to_json(spec.rho.op),
        "hamiltonian": operator_to_json(spec.hamiltonian),
        "temperature": spec.temperature,
        "cutoff_lambda": spec.cutoff_lambda,
    }


def protocol_spec_from_json(data: dict) -> ProtocolSpec:
    try:
        rho = DensityState(operator_from_json(data["rho"]))
        hamiltonian = operator_from_json(data["hamiltonian"])
        temperature = float(data["temperature"])
        cutoff_lambda = float(data["cutoff_lambda"])
    except KeyError as exc:
        raise ValidationError(f"protocol spec is missing field {exc}") from exc
    return ProtocolSpec(
        rho=rho,
        hamiltonian=hamiltonian,
        temperature=temperature,
        cutoff_lambda=cutoff_lambda,
    )


def protocol_result_to_json(result: ProtocolResult) -> dict:
    return {
        "w_quench": result.w_quench,
        "w_isothermal": result.w_isothermal,
        "w_total": result.w_total,
        "w_formula": result.w_formula,
        "free_energy_gap": result.free_energy_gap,
        "rank_deficit_k": result.rank_deficit_k,
    }
