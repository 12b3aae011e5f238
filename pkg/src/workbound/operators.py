"""Finite-dimensional Hermitian operator algebra and state utilities.

Small dense matrices only: spectra, entropies (natural log), Gibbs states,
relative entropy, and qubit Bloch-vector conversions. Every public type is
immutable and validated on construction; every function is pure, so the
module is safe to call from any number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ValidationError",
    "HermitianOperator",
    "DensityState",
    "PureState",
    "BoundedHamiltonian",
    "BlochVector",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "eigen_decompose",
    "von_neumann_entropy",
    "gibbs_state",
    "log_partition_function",
    "relative_entropy",
    "bloch_to_state",
    "state_to_bloch",
    "density_from_matrix",
    "operator_to_json",
    "operator_from_json",
]

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = 1e-12
BOUNDED_TOL = 1e-12
NORM_TOL = 1e-12
# sigma eigenvalues below this count as kernel directions in relative entropy
SUPPORT_CUTOFF = 1e-14
SUPPORT_WEIGHT_TOL = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class ValidationError(ValueError):
    """An operator, state, or argument violates a construction invariant."""


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A validated Hermitian matrix, stored symmetrized as (M + M†)/2."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValidationError("matrix entries must be finite")
        deviation = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if deviation > HERMITICITY_TOL:
            raise ValidationError(
                f"matrix is not Hermitian: max |M - M†| = {deviation:.3e} "
                f"exceeds tolerance {HERMITICITY_TOL:.0e}"
            )
        object.__setattr__(self, "entries", _frozen((m + m.conj().T) / 2.0))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class DensityState:
    """A unit-trace positive operator; tiny negative eigenvalues are clamped on read."""

    op: HermitianOperator

    def __post_init__(self):
        eigenvalues, eigenvectors = np.linalg.eigh(self.op.entries)
        if eigenvalues[0] < -EIGENVALUE_FLOOR:
            raise ValidationError(
                f"state has eigenvalue {eigenvalues[0]:.3e} below -{EIGENVALUE_FLOOR:.0e}"
            )
        trace = float(np.trace(self.op.entries).real)
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValidationError(f"state trace {trace!r} is not 1 within {TRACE_TOL:.0e}")
        object.__setattr__(self, "_spectrum", _frozen(np.clip(eigenvalues, 0.0, None)))
        object.__setattr__(self, "_basis", _frozen(eigenvectors))

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries

    @property
    def spectrum(self) -> np.ndarray:
        """Ascending eigenvalues, clamped to [0, inf)."""
        return self._spectrum

    @property
    def basis(self) -> np.ndarray:
        """Orthonormal eigenvectors as columns, aligned with ``spectrum``."""
        return self._basis


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size == 0:
            raise ValidationError("amplitude vector is empty")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ValidationError("amplitudes must be finite")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm {norm!r} is not 1 within {NORM_TOL:.0e}")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> DensityState:
        return DensityState(HermitianOperator(self.projector()))

    def overlap(self, other: "PureState") -> complex:
        if other.dim != self.dim:
            raise ValidationError("overlap requires matching dimensions")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class BoundedHamiltonian:
    """A Hamiltonian setting normalized to the unit work scale, 0 <= H <= I."""

    op: HermitianOperator

    def __post_init__(self):
        eigenvalues = np.linalg.eigvalsh(self.op.entries)
        if eigenvalues[0] < -BOUNDED_TOL or eigenvalues[-1] > 1.0 + BOUNDED_TOL:
            raise ValidationError(
                f"eigenvalues [{eigenvalues[0]!r}, {eigenvalues[-1]!r}] leave [0, 1] "
                f"beyond tolerance {BOUNDED_TOL:.0e}"
            )

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries


@dataclass(frozen=True, eq=False)
class BlochVector:
    """A real 3-vector of length at most 1 (unit length for pure states)."""

    components: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float).reshape(-1)
        if c.shape != (3,):
            raise ValidationError(f"expected a 3-vector, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValidationError("components must be finite")
        norm = float(np.linalg.norm(c))
        if norm > 1.0 + NORM_TOL:
            raise ValidationError(f"Bloch vector norm {norm!r} exceeds 1")
        object.__setattr__(self, "components", _frozen(c))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def density_from_matrix(matrix) -> DensityState:
    return DensityState(HermitianOperator(matrix))


def eigen_decompose(h: HermitianOperator) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvector columns of ``h``."""
    eigenvalues, eigenvectors = np.linalg.eigh(h.entries)
    return eigenvalues, eigenvectors


def von_neumann_entropy(rho: DensityState) -> float:
    """Entropy -sum(p log p) in nats, with 0 log 0 = 0."""
    p = rho.spectrum
    positive = p[p > 0.0]
    return float(-np.sum(positive * np.log(positive)))


def _check_temperature(temperature: float) -> float:
    t = float(temperature)
    if not math.isfinite(t) or t <= 0.0:
        raise ValidationError(f"temperature must be positive, got {temperature!r}")
    return t


def gibbs_state(h: HermitianOperator, temperature: float) -> tuple[DensityState, float]:
    """Thermal state exp(-H/T)/Z and the partition function Z = Tr exp(-H/T)."""
    t = _check_temperature(temperature)
    eigenvalues, eigenvectors = eigen_decompose(h)
    x = -eigenvalues / t
    shift = float(np.max(x))
    weights = np.exp(x - shift)
    total = float(np.sum(weights))
    populations = weights / total
    matrix = (eigenvectors * populations) @ eigenvectors.conj().T
    partition_function = float(math.exp(shift) * total)
    return density_from_matrix(matrix), partition_function


def log_partition_function(h: HermitianOperator, temperature: float) -> float:
    """log Tr exp(-H/T), evaluated stably through the spectrum."""
    t = _check_temperature(temperature)
    x = -np.linalg.eigvalsh(h.entries) / t
    shift = float(np.max(x))
    return shift + float(np.log(np.sum(np.exp(x - shift))))


def relative_entropy(rho: DensityState, sigma: DensityState) -> float:
    """D(rho || sigma) in nats; ``math.inf`` when rho leaves sigma's support."""
    if rho.dim != sigma.dim:
        raise ValidationError(
            f"dimension mismatch: rho is {rho.dim}-dimensional, sigma is {sigma.dim}"
        )
    s_eigs = sigma.spectrum
    s_vecs = sigma.basis
    # weight of rho along each sigma eigendirection
    weights = np.real(np.einsum("ij,jk,ki->i", s_vecs.conj().T, rho.matrix, s_vecs))
    kernel = s_eigs < SUPPORT_CUTOFF
    if np.any(weights[kernel] > SUPPORT_WEIGHT_TOL):
        return math.inf
    r = rho.spectrum
    r_pos = r[r > 0.0]
    term_rho = float(np.sum(r_pos * np.log(r_pos)))
    live = ~kernel
    term_sigma = float(np.sum(weights[live] * np.log(s_eigs[live])))
    return term_rho - term_sigma


def bloch_to_state(v: BlochVector) -> DensityState:
    """Qubit state (I + v . sigma)/2."""
    x, y, z = v.components
    matrix = 0.5 * (np.eye(2, dtype=complex) + x * PAULI_X + y * PAULI_Y + z * PAULI_Z)
    return density_from_matrix(matrix)


def state_to_bloch(rho: DensityState) -> BlochVector:
    if rho.dim != 2:
        raise ValidationError(f"Bloch conversion requires a qubit, got dimension {rho.dim}")
    m = rho.matrix
    x = 2.0 * float(m[0, 1].real)
    y = -2.0 * float(m[0, 1].imag)
    z = float((m[0, 0] - m[1, 1]).real)
    return BlochVector(np.array([x, y, z]))


def operator_to_json(h: HermitianOperator) -> dict:
    """Wire encoding {"dim": n, "re": [[..]], "im": [[..]]} shared by all modules."""
    return {
        "dim": h.dim,
        "re": h.entries.real.tolist(),
        "im": h.entries.imag.tolist(),
    }


def operator_from_json(data: dict) -> HermitianOperator:
    try:
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed operator JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValidationError(
            f"operator JSON shapes {re.shape}/{im.shape} do not match dim {dim}"
        )
    return HermitianOperator(re + 1j * im)
