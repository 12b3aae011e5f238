import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from workbound.advantage import saturating_hamiltonian
from workbound.operators import BoundedHamiltonian, HermitianOperator, PureState, ValidationError
from workbound.task import (
    InfeasibleSourceError,
    MinimalTaskInstance,
    SourceConstraint,
    WorkTask,
    minimal_source_constraints,
    minimal_work_task,
    pairwise_max_energy,
    solve_minimal_source,
    task_average,
    validate_task,
    work_task_from_json,
    work_task_to_json,
)


def pure(*amps):
    a = np.asarray(amps, dtype=complex)
    return PureState(a / np.linalg.norm(a))


def angled_pair(theta):
    return pure(1, 0), pure(math.cos(theta), math.sin(theta))


class TestPairwiseMaxEnergy:
    def test_orthogonal_pair(self):
        a, b = pure(1, 0), pure(0, 1)
        assert abs(pairwise_max_energy(a.density(), b.density()) - 0.5) < 1e-12

    def test_identical_states(self):
        a = pure(0.6, 0.8j)
        assert abs(pairwise_max_energy(a.density(), a.density()) - 1.0) < 1e-12

    def test_quarter_turn_overlap(self):
        a, b = angled_pair(math.pi / 4)
        expected = (1.0 + 1.0 / math.sqrt(2.0)) / 2.0
        value = pairwise_max_energy(a.density(), b.density())
        assert abs(value - expected) < 1e-12
        assert abs(expected - 0.853553) < 1e-6

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            pairwise_max_energy(pure(1, 0).density(), pure(1, 0, 0).density())

    @given(seed=st.integers(0, 100_000))
    @settings(max_examples=150, deadline=None)
    def test_pure_overlap_identity_and_symmetry(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 5))
        a = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        b = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi = PureState(a / np.linalg.norm(a))
        phi = PureState(b / np.linalg.norm(b))
        forward = pairwise_max_energy(psi.density(), phi.density())
        backward = pairwise_max_energy(phi.density(), psi.density())
        overlap = abs(psi.overlap(phi))
        assert forward == backward
        assert abs(forward - (1.0 + overlap) / 2.0) < 1e-10

    def test_pure_overlap_identity_bulk(self):
        rng = np.random.default_rng(41)
        for _ in range(1000):
            dim = int(rng.integers(2, 5))
            a = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            b = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            psi = PureState(a / np.linalg.norm(a))
            phi = PureState(b / np.linalg.norm(b))
            value = pairwise_max_energy(psi.density(), phi.density())
            assert abs(value - (1.0 + abs(psi.overlap(phi))) / 2.0) < 1e-10


class TestTaskAverage:
    def test_zero_settings(self):
        task = minimal_work_task(math.pi / 4)
        zeros = [BoundedHamiltonian(HermitianOperator(np.zeros((2, 2))))] * 2
        assert abs(task_average(task, zeros)) < 1e-15

    def test_identity_settings(self):
        task = minimal_work_task(math.pi / 4)
        ones = [BoundedHamiltonian(HermitianOperator(np.eye(2)))] * 2
        assert abs(task_average(task, ones) - 1.0) < 1e-12

    def test_rank_one_optimum(self):
        task = minimal_work_task(math.pi / 4)
        settings_list = [
            BoundedHamiltonian(HermitianOperator(task.preparations[0].projector())),
            BoundedHamiltonian(HermitianOperator(task.preparations[1].projector())),
        ]
        assert abs(task_average(task, settings_list) - 1.0) < 1e-12

    def test_linearity_in_prior_and_settings(self):
        rng = np.random.default_rng(3)
        theta = 0.9
        base = minimal_work_task(theta)
        h0 = saturating_hamiltonian(0.4, base.preparations[0])
        h1 = saturating_hamiltonian(0.7, base.preparations[1])
        ha = [h0, h1]
        hb = [h1, h0]
        value_a = task_average(base, ha)
        value_b = task_average(base, hb)
        for _ in range(10):
            lam = float(rng.uniform(0, 1))
            mixed = [
                BoundedHamiltonian(
                    HermitianOperator(lam * ha[j].matrix + (1 - lam) * hb[j].matrix)
                )
                for j in range(2)
            ]
            expected = lam * value_a + (1 - lam) * value_b
            assert abs(task_average(base, mixed) - expected) < 1e-12

    def test_wrong_setting_count(self):
        task = minimal_work_task(1.0)
        with pytest.raises(ValidationError):
            task_average(task, [BoundedHamiltonian(HermitianOperator(np.eye(2)))])


class TestSolveMinimalSource:
    def test_symmetric_point(self):
        theta = math.pi / 4
        psi0, psi_perp, psi1 = solve_minimal_source(minimal_source_constraints(theta), theta)
        assert np.allclose(psi1.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
        assert abs(psi0.overlap(psi_perp)) < 1e-15

    def test_collinear_limit(self):
        theta = 0.01
        psi0, _, psi1 = solve_minimal_source(minimal_source_constraints(theta), theta)
        assert abs(abs(psi0.overlap(psi1)) - math.cos(theta)) < 1e-12
        eta = pairwise_max_energy(psi0.density(), psi1.density())
        assert eta > 0.9999

    def test_infeasible_mismatch(self):
        theta, theta_prime = 0.3, 1.2  # cos^2(0.3) + sin^2(1.2) > 1
        constraints = (
            SourceConstraint(pair=(0, 2), kind="upper", bound=0.5),
            SourceConstraint(pair=(0, 1), kind="lower", bound=(1 + math.cos(theta)) / 2),
            SourceConstraint(pair=(2, 1), kind="lower", bound=(1 + math.sin(theta_prime)) / 2),
        )
        with pytest.raises(InfeasibleSourceError, match="> 1"):
            solve_minimal_source(constraints, theta)

    @given(theta=st.floats(0.05, math.pi / 2 - 0.05))
    @settings(max_examples=100, deadline=None)
    def test_gauge_and_overlaps(self, theta):
        psi0, psi_perp, psi1 = solve_minimal_source(minimal_source_constraints(theta), theta)
        assert abs(psi0.overlap(psi_perp)) < 1e-12
        assert abs(abs(psi0.overlap(psi1)) - math.cos(theta)) < 1e-12
        assert abs(abs(psi_perp.overlap(psi1)) - math.sin(theta)) < 1e-12
        # fixed gauge: real nonnegative amplitudes
        assert np.all(psi1.amplitudes.imag == 0)
        assert np.all(psi1.amplitudes.real >= 0)


class TestValidateTask:
    def test_constructed_task_passes(self):
        report = validate_task(minimal_work_task(math.pi / 4))
        assert report.passed

    def test_unnormalized_prior_flagged(self):
        good = minimal_work_task(1.0)
        bad = WorkTask(
            preparations=good.preparations,
            setting_count=2,
            prior={(0, 0): 0.5, (1, 1): 0.4},
            constraints=good.constraints,
        )
        report = validate_task(bad)
        failed = {c.name for c in report.checks if not c.passed}
        assert failed == {"prior_normalization"}

    def test_overlap_violation_flagged(self):
        a, b = angled_pair(0.45)  # overlap 0.9
        task = WorkTask(
            preparations=(a, b),
            setting_count=1,
            prior={(0, 0): 1.0},
            constraints=(SourceConstraint(pair=(0, 1), kind="upper", bound=0.8),),
        )
        report = validate_task(task)
        assert not report.passed
        failing = [c for c in report.checks if not c.passed]
        assert any("eta_consistency" in c.name for c in failing)

    def test_json_roundtrip(self):
        task = minimal_work_task(0.7)
        back = work_task_from_json(work_task_to_json(task))
        assert back.setting_count == task.setting_count
        assert back.prior == task.prior
        assert len(back.constraints) == 3
        for p, q in zip(back.preparations, task.preparations):
            assert np.allclose(p.amplitudes, q.amplitudes)


class TestInstanceValidation:
    @pytest.mark.parametrize("theta", [0.0, math.pi / 2, -0.1])
    def test_rejects_boundary_theta(self, theta):
        with pytest.raises(ValidationError):
            MinimalTaskInstance(theta=theta, mu0=0.5, mu1=0.5)

    def test_rejects_out_of_range_mu(self):
        with pytest.raises(ValidationError):
            MinimalTaskInstance(theta=1.0, mu0=1.5, mu1=0.5)

    def test_constraint_bounds(self):
        with pytest.raises(ValidationError):
            SourceConstraint(pair=(0, 1), kind="upper", bound=0.3)
        with pytest.raises(ValidationError):
            SourceConstraint(pair=(1, 1), kind="upper", bound=0.6)
