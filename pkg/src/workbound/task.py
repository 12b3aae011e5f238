"""Work-extraction task data model.

A task supplies pure preparations to one device, queries bounded Hamiltonian
settings, and scores the prior-weighted average of the branch energies
<psi_x|H_y|psi_x>. The source side is specified only through pairwise
maximal-energy constraints; for the minimal three-preparation family those
constraints pin the geometry to a two-dimensional span, which
``solve_minimal_source`` reconstructs in a fixed real-amplitude gauge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import (
    BoundedHamiltonian,
    DensityState,
    PureState,
    ValidationError,
)

__all__ = [
    "SourceConstraint",
    "WorkTask",
    "MinimalTaskInstance",
    "InfeasibleSourceError",
    "CheckResult",
    "TaskReport",
    "pairwise_max_energy",
    "task_average",
    "solve_minimal_source",
    "validate_task",
    "minimal_source_constraints",
    "minimal_work_task",
    "work_task_to_json",
    "work_task_from_json",
]

ETA_TOL = 1e-12
BOUND_SLACK = 1e-9


class InfeasibleSourceError(ValueError):
    """No normalized preparation geometry satisfies the stated constraints."""


@dataclass(frozen=True)
class SourceConstraint:
    """Upper or lower bound on the pairwise maximal energy of one preparation pair."""

    pair: tuple[int, int]
    kind: str  # "upper" or "lower"
    bound: float

    def __post_init__(self):
        x, y = self.pair
        if x == y or x < 0 or y < 0:
            raise ValidationError(f"constraint pair {self.pair!r} must be two distinct indices")
        if self.kind not in ("upper", "lower"):
            raise ValidationError(f"constraint kind must be 'upper' or 'lower', got {self.kind!r}")
        if not (0.5 - ETA_TOL <= self.bound <= 1.0 + ETA_TOL):
            raise ValidationError(
                f"pairwise energy bound {self.bound!r} must lie in [1/2, 1]"
            )
        object.__setattr__(self, "pair", (int(x), int(y)))


@dataclass(frozen=True, eq=False)
class WorkTask:
    """Preparations, setting labels, branch prior, and source constraints.

    Index ranges and prior nonnegativity are enforced here; prior
    normalization and constraint consistency are soft checks reported by
    ``validate_task`` so defective tasks can still be inspected.
    """

    preparations: tuple[PureState, ...]
    setting_count: int
    prior: dict[tuple[int, int], float]
    constraints: tuple[SourceConstraint, ...]

    def __post_init__(self):
        preparations = tuple(self.preparations)
        if not preparations:
            raise ValidationError("task needs at least one preparation")
        dim = preparations[0].dim
        if any(p.dim != dim for p in preparations):
            raise ValidationError("all preparations must share one dimension")
        if self.setting_count < 1:
            raise ValidationError("setting_count must be positive")
        prior = {}
        for (x, y), p in self.prior.items():
            if not (0 <= x < len(preparations) and 0 <= y < self.setting_count):
                raise ValidationError(f"prior index ({x}, {y}) is out of range")
            if p < 0.0:
                raise ValidationError(f"prior weight for ({x}, {y}) is negative: {p!r}")
            prior[(int(x), int(y))] = float(p)
        for c in self.constraints:
            if max(c.pair) >= len(preparations):
                raise ValidationError(f"constraint pair {c.pair!r} is out of range")
        object.__setattr__(self, "preparations", preparations)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def dim(self) -> int:
        return self.preparations[0].dim


@dataclass(frozen=True)
class MinimalTaskInstance:
    """One member of the minimal three-preparation family: source angle and
    the two setting reference averages."""

    theta: float
    mu0: float
    mu1: float

    def __post_init__(self):
        if not (0.0 < self.theta < math.pi / 2):
            raise ValidationError(f"theta must lie strictly inside (0, pi/2), got {self.theta!r}")
        for name, mu in (("mu0", self.mu0), ("mu1", self.mu1)):
            if not (0.0 <= mu <= 1.0):
                raise ValidationError(f"{name} must lie in [0, 1], got {mu!r}")


def pairwise_max_energy(rho: DensityState, rho_prime: DensityState) -> float:
    """Best pair-averaged energy under one common trace-normalized Hamiltonian,
    lambda_max(rho + rho')/2."""
    if rho.dim != rho_prime.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {rho_prime.dim}")
    top = float(np.linalg.eigvalsh(rho.matrix + rho_prime.matrix)[-1])
    return top / 2.0


def task_average(task: WorkTask, settings: Sequence[BoundedHamiltonian]) -> float:
    """Prior-weighted average of the branch energies <psi_x|H_y|psi_x>."""
    if len(settings) != task.setting_count:
        raise ValidationError(
            f"expected {task.setting_count} settings, got {len(settings)}"
        )
    for h in settings:
        if h.dim != task.dim:
            raise ValidationError(f"setting dimension {h.dim} does not match task dim {task.dim}")
    total = 0.0
    for (x, y), p in task.prior.items():
        psi = task.preparations[x].amplitudes
        total += p * float(np.vdot(psi, settings[y].matrix @ psi).real)
    return total


def _parse_minimal_constraints(
    constraints: Sequence[SourceConstraint],
) -> tuple[tuple[int, int], int, dict[int, float]]:
    """Pick apart the minimal-task constraint shape.

    Returns the orthogonal pair, the third (solved-for) index, and the lower
    bounds keyed by which orthogonal-pair member they involve.
    """
    uppers = [c for c in constraints if c.kind == "upper"]
    lowers = [c for c in constraints if c.kind == "lower"]
    if len(uppers) != 1 or len(lowers) != 2:
        raise ValidationError(
            "minimal source needs exactly one upper and two lower constraints, "
            f"got {len(uppers)} upper / {len(lowers)} lower"
        )
    upper = uppers[0]
    if upper.bound > 0.5 + ETA_TOL:
        raise ValidationError(
            f"the upper constraint must force orthogonality (bound 1/2), got {upper.bound!r}"
        )
    ortho = set(upper.pair)
    targets = [set(c.pair) - ortho for c in lowers]
    if any(len(t) != 1 for t in targets) or targets[0] != targets[1]:
        raise ValidationError(
            "the two lower constraints must each pair one orthogonal member "
            "with a single common third preparation"
        )
    third = targets[0].pop()
    bounds: dict[int, float] = {}
    for c in lowers:
        member = (set(c.pair) - {third}).pop()
        if member in bounds:
            raise ValidationError("both lower constraints involve the same orthogonal member")
        bounds[member] = c.bound
    return upper.pair, third, bounds


def solve_minimal_source(
    constraints: Sequence[SourceConstraint], theta: float
) -> tuple[PureState, PureState, PureState]:
    """Reconstruct the forced two-dimensional source geometry.

    The upper constraint makes one pair orthogonal; the two lower constraints
    then demand amplitudes whose squares must sum to at most 1, so at the
    stated angle they are saturated and the third preparation is
    cos(theta) psi0 + sin(theta) psi_perp in the canonical basis. All phases
    are fixed real nonnegative so outputs are reproducible.
    """
    if not (0.0 < theta < math.pi / 2):
        raise ValidationError(f"theta must lie strictly inside (0, pi/2), got {theta!r}")
    ortho_pair, _, bounds = _parse_minimal_constraints(constraints)

    amp = {member: 2.0 * b - 1.0 for member, b in bounds.items()}
    total = sum(a * a for a in amp.values())
    if total > 1.0 + 1e-12:
        detail = ", ".join(f"amplitude >= {a!r}" for a in amp.values())
        raise InfeasibleSourceError(
            f"lower bounds require {detail} against an orthogonal pair, "
            f"but the squared amplitudes sum to {total!r} > 1"
        )

    c, s = math.cos(theta), math.sin(theta)
    members = list(ortho_pair)
    # orient so the cos(theta) amplitude sits on the better-matching member
    a0, a1 = amp[members[0]], amp[members[1]]
    if abs(a0 - c) + abs(a1 - s) > abs(a1 - c) + abs(a0 - s):
        members.reverse()

    psi0 = PureState(np.array([1.0, 0.0], dtype=complex))
    psi_perp = PureState(np.array([0.0, 1.0], dtype=complex))
    psi1 = PureState(np.array([c, s], dtype=complex))

    solved_eta = {
        members[0]: (1.0 + c) / 2.0,  # pair (psi0, psi1)
        members[1]: (1.0 + s) / 2.0,  # pair (psi_perp, psi1)
    }
    for constraint in constraints:
        pair = set(constraint.pair)
        if pair == set(ortho_pair):
            value = 0.5
        else:
            member = (pair & set(ortho_pair)).pop()
            value = solved_eta[member]
        if constraint.kind == "upper" and value > constraint.bound + ETA_TOL:
            raise InfeasibleSourceError(
                f"solved geometry gives pairwise energy {value!r} above the "
                f"upper bound {constraint.bound!r} for pair {constraint.pair!r}"
            )
        if constraint.kind == "lower" and value < constraint.bound - ETA_TOL:
            raise InfeasibleSourceError(
                f"solved geometry gives pairwise energy {value!r} below the "
                f"lower bound {constraint.bound!r} for pair {constraint.pair!r}"
            )
    return psi0, psi_perp, psi1


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class TaskReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def validate_task(task: WorkTask) -> TaskReport:
    """Soft validation report: prior normalization, minimal-shape feasibility,
    and per-pair consistency of the stored preparations with the constraints."""
    checks: list[CheckResult] = []

    total = sum(task.prior.values())
    checks.append(
        CheckResult(
            "prior_normalization",
            abs(total - 1.0) <= ETA_TOL,
            f"prior mass {total!r}",
        )
    )

    if len(task.preparations) == 3 and len(task.constraints) == 3:
        try:
            _, _, bounds = _parse_minimal_constraints(task.constraints)
            amp_sq = sum((2.0 * b - 1.0) ** 2 for b in bounds.values())
            checks.append(
                CheckResult(
                    "minimal_constraint_feasibility",
                    amp_sq <= 1.0 + 1e-12,
                    f"implied squared amplitudes sum to {amp_sq!r}",
                )
            )
        except ValidationError as exc:
            checks.append(CheckResult("minimal_constraint_feasibility", False, str(exc)))

    for constraint in task.constraints:
        x, y = constraint.pair
        value = pairwise_max_energy(
            task.preparations[x].density(), task.preparations[y].density()
        )
        if constraint.kind == "upper":
            ok = value <= constraint.bound + BOUND_SLACK
        else:
            ok = value >= constraint.bound - BOUND_SLACK
        checks.append(
            CheckResult(
                f"eta_consistency_{x}_{y}",
                ok,
                f"eta = {value!r} against {constraint.kind} bound {constraint.bound!r}",
            )
        )
    return TaskReport(tuple(checks))


def minimal_source_constraints(theta: float) -> tuple[SourceConstraint, ...]:
    """The three bounds of the minimal family at angle theta, with preparation
    indices 0 (psi0), 1 (psi1), 2 (psi_perp)."""
    return (
        SourceConstraint(pair=(0, 2), kind="upper", bound=0.5),
        SourceConstraint(pair=(0, 1), kind="lower", bound=(1.0 + math.cos(theta)) / 2.0),
        SourceConstraint(pair=(2, 1), kind="lower", bound=(1.0 + math.sin(theta)) / 2.0),
    )


def minimal_work_task(theta: float) -> WorkTask:
    """The two-setting minimal task: branches (0,0) and (1,1) scored with
    probability 1/2 each; preparation 2 is the unscored reference."""
    constraints = minimal_source_constraints(theta)
    psi0, psi_perp, psi1 = solve_minimal_source(constraints, theta)
    return WorkTask(
        preparations=(psi0, psi1, psi_perp),
        setting_count=2,
        prior={(0, 0): 0.5, (1, 1): 0.5},
        constraints=constraints,
    )


def work_task_to_json(task: WorkTask) -> dict:
    return {
        "preparations": [
            {"re": p.amplitudes.real.tolist(), "im": p.amplitudes.imag.tolist()}
            for p in task.preparations
        ],
        "setting_count": task.setting_count,
        "prior": [
            {"x": x, "y": y, "p": p} for (x, y), p in sorted(task.prior.items())
        ],
        "constraints": [
            {"pair": list(c.pair), "kind": c.kind, "bound": c.bound}
            for c in task.constraints
        ],
    }


def work_task_from_json(data: dict) -> WorkTask:
    try:
        preparations = tuple(
            PureState(np.asarray(p["re"], dtype=float) + 1j * np.asarray(p["im"], dtype=float))
            for p in data["preparations"]
        )
        prior = {(int(e["x"]), int(e["y"])): float(e["p"]) for e in data["prior"]}
        constraints = tuple(
            SourceConstraint(
                pair=(int(c["pair"][0]), int(c["pair"][1])),
                kind=str(c["kind"]),
                bound=float(c["bound"]),
            )
            for c in data["constraints"]
        )
        setting_count = int(data["setting_count"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed task JSON: {exc}") from exc
    return WorkTask(
        preparations=preparations,
        setting_count=setting_count,
        prior=prior,
        constraints=constraints,
    )
