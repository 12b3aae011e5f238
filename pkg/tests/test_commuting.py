import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from workbound.commuting import (
    CommutingDevice,
    InfeasibleWorkValuesError,
    classical_benchmark,
    commuting_lower_bound,
    device_from_json,
    device_to_json,
    device_work_values,
    law_bound,
    law_upper_max,
    oracle_max,
    rotated_residual,
    two_point_device,
    variance_radius,
)
from workbound.operators import ValidationError
from workbound.task import MinimalTaskInstance
from workbound.verify import random_instance, sample_device_arrays

SYMMETRIC = MinimalTaskInstance(theta=math.pi / 4, mu0=0.5, mu1=0.5)
TIGHT_VALUE = 0.5 * (1.0 + 1.0 / math.sqrt(2.0))


class TestRotatedResidual:
    def test_symmetric_point_reduces_to_minus_x(self):
        for x in (-0.3, 0.0, 0.2):
            z = rotated_residual(0.5 + x, 0.9, SYMMETRIC)
            assert abs(z - (-x)) < 1e-15

    def test_centered_values_vanish(self):
        inst = MinimalTaskInstance(theta=0.8, mu0=0.37, mu1=0.6)
        assert rotated_residual(0.37, 0.37, inst) == 0.0

    def test_direct_arithmetic(self):
        inst = MinimalTaskInstance(theta=math.pi / 3, mu0=0.4, mu1=0.5)
        expected = (math.cos(2 * math.pi / 3) * (0.5 - 0.4) - (0.7 - 0.4)) / math.sin(
            2 * math.pi / 3
        )
        assert abs(rotated_residual(0.7, 0.5, inst) - expected) < 1e-15


class TestLawBound:
    def test_centered_symmetric_value(self):
        result = law_bound(SYMMETRIC, a00=0.5, a10=0.5)
        assert abs(result.bound - 0.75) < 1e-15
        assert not result.endpoint_case

    def test_maximizing_offset_hits_benchmark(self):
        # stationary offset of (1 + x + sqrt(1 - 4 x^2)/2)/2 over x
        x = 1.0 / (2.0 * math.sqrt(2.0))
        result = law_bound(SYMMETRIC, a00=0.5 + x, a10=0.5)
        assert abs(result.bound - TIGHT_VALUE) < 1e-12

    def test_endpoint_form(self):
        inst = MinimalTaskInstance(theta=1.0, mu0=1.0, mu1=0.4)
        result = law_bound(inst, a00=1.0, a10=1.0)
        assert result.endpoint_case
        expected = 0.5 * (1.0 + 0.4 + variance_radius(0.4))
        assert abs(result.bound - expected) < 1e-15

    def test_infeasible_values_raise(self):
        inst = MinimalTaskInstance(theta=math.pi / 4, mu0=0.1, mu1=0.5)
        with pytest.raises(InfeasibleWorkValuesError):
            law_bound(inst, a00=0.9, a10=0.1)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            law_bound(SYMMETRIC, a00=1.2, a10=0.5)

    @given(
        theta=st.floats(0.05, math.pi / 2 - 0.05),
        mu0=st.floats(0.05, 0.95),
        mu1=st.floats(0.05, 0.95),
        offset=st.floats(-1.0, 1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_bound_range_on_feasible_inputs(self, theta, mu0, mu1, offset):
        inst = MinimalTaskInstance(theta=theta, mu0=mu0, mu1=mu1)
        # a10 = mu0 + C q and a00 = mu0 + q stay inside the ellipse; scale q
        # down until both work values also stay inside [0, 1]
        c = math.cos(2 * theta)
        q = offset * variance_radius(mu0)
        scale = 1.0
        for value in (q, c * q):
            if value > 1.0 - mu0:
                scale = min(scale, (1.0 - mu0) / value)
            elif value < -mu0:
                scale = min(scale, -mu0 / value)
        q *= scale
        a00 = min(1.0, max(0.0, mu0 + q))
        a10 = min(1.0, max(0.0, mu0 + c * q))
        result = law_bound(inst, a00=a00, a10=a10)
        assert 0.0 <= result.bound <= 1.0

    def test_endpoint_continuity(self):
        # interior evaluation converges to the endpoint clause as mu0 -> {0, 1}
        for mu0_edge in (2e-12, 1.0 - 2e-12):
            for theta in (0.3, math.pi / 4, 1.4):
                interior = law_upper_max(
                    MinimalTaskInstance(theta=theta, mu0=mu0_edge, mu1=0.6),
                    grid_points=301,
                ).value
                endpoint = min(1.0, 0.5 * (round(mu0_edge) + 0.6 + variance_radius(0.6)))
                assert abs(interior - endpoint) < 1e-6


class TestCommutingDevice:
    def test_two_point_device_valid_and_attains_lower(self):
        for inst in (
            SYMMETRIC,
            MinimalTaskInstance(theta=0.4, mu0=0.3, mu1=0.7),
            MinimalTaskInstance(theta=1.2, mu0=0.9, mu1=0.2),
        ):
            device = two_point_device(inst)
            values = device_work_values(device, inst.theta)
            assert abs(values.scored_average - commuting_lower_bound(inst)) < 1e-12
            assert abs(values.mu0 - inst.mu0) < 1e-12
            assert abs(values.mu1 - inst.mu1) < 1e-12

    def test_json_roundtrip(self):
        device = two_point_device(SYMMETRIC)
        back = device_from_json(device_to_json(device))
        assert np.allclose(back.weights, device.weights)
        assert np.allclose(back.disk, device.disk)
        assert np.allclose(back.values, device.values)

    def test_rejects_unnormalized_weights(self):
        with pytest.raises(ValidationError, match="sum"):
            CommutingDevice(
                weights=np.array([0.5, 0.4]),
                disk=np.array([[0.5, 0.0], [-0.625, 0.0]]),
                values=np.full((2, 2), 0.5),
            )

    def test_rejects_off_disk_points(self):
        with pytest.raises(ValidationError, match="disk"):
            CommutingDevice(
                weights=np.array([0.5, 0.5]),
                disk=np.array([[1.2, 0.0], [-1.2, 0.0]]),
                values=np.full((2, 2), 0.5),
            )

    def test_rejects_nonzero_reference_means(self):
        with pytest.raises(ValidationError, match="means"):
            CommutingDevice(
                weights=np.array([0.5, 0.5]),
                disk=np.array([[0.5, 0.0], [0.5, 0.0]]),
                values=np.full((2, 2), 0.5),
            )

    def test_sampled_devices_satisfy_law(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            inst = random_instance(rng)
            w, u, v, alpha, beta = sample_device_arrays(rng, 25, 8, inst.mu0, inst.mu1)
            for k in range(25):
                device = CommutingDevice(
                    weights=w[k],
                    disk=np.column_stack([u[k], v[k]]),
                    values=np.column_stack([alpha[k], beta[k]]),
                )
                values = device_work_values(device, inst.theta)
                own = MinimalTaskInstance(inst.theta, values.mu0, values.mu1)
                bound = law_bound(own, values.a00, values.a10)
                assert values.scored_average <= bound.bound + 1e-9
                residual = rotated_residual(values.a00, values.a10, own)
                ellipse = (values.a10 - values.mu0) ** 2 + residual**2
                assert ellipse <= values.mu0 * (1.0 - values.mu0) + 1e-9


class TestOracle:
    def test_symmetric_point_reaches_tight_value(self):
        result = oracle_max(SYMMETRIC, point_count=8, restarts=8, seed=5)
        assert abs(result.value - TIGHT_VALUE) < 1e-6

    def test_near_collinear_source_reaches_one(self):
        inst = MinimalTaskInstance(theta=0.01, mu0=0.5, mu1=0.5)
        result = oracle_max(inst, point_count=8, restarts=4, seed=5)
        assert result.value > 1.0 - 1e-4

    def test_never_beats_law_envelope(self):
        rng = np.random.default_rng(10)
        for _ in range(6):
            inst = random_instance(rng)
            result = oracle_max(inst, point_count=8, restarts=6, seed=int(rng.integers(1000)))
            envelope = law_upper_max(inst, grid_points=301).value
            assert result.value <= envelope + 1e-6

    def test_at_least_two_point_construction(self):
        rng = np.random.default_rng(12)
        for _ in range(8):
            inst = random_instance(rng)
            result = oracle_max(inst, point_count=8, restarts=4, seed=0)
            assert result.value >= commuting_lower_bound(inst) - 1e-12

    def test_deterministic_given_seed(self):
        a = oracle_max(SYMMETRIC, point_count=8, restarts=6, seed=42)
        b = oracle_max(SYMMETRIC, point_count=8, restarts=6, seed=42)
        assert a.value == b.value
        assert a.restart_values == b.restart_values
        assert np.array_equal(a.device.disk, b.device.disk)

    def test_point_count_doubling_stable(self):
        # finite support suffices: doubling the points should not move the max
        for inst in (SYMMETRIC, MinimalTaskInstance(theta=0.7, mu0=0.35, mu1=0.6)):
            small = oracle_max(inst, point_count=8, restarts=16, seed=1).value
            large = oracle_max(inst, point_count=16, restarts=16, seed=1).value
            assert abs(small - large) < 2e-4

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValidationError):
            oracle_max(SYMMETRIC, point_count=1, restarts=4, seed=0)
        with pytest.raises(ValidationError):
            oracle_max(SYMMETRIC, point_count=4, restarts=0, seed=0)


class TestClassicalBenchmark:
    def test_symmetric_point_tight(self):
        result = classical_benchmark(SYMMETRIC, grid_points=601)
        assert abs(result.value - TIGHT_VALUE) < 1e-8
        assert abs(result.upper - TIGHT_VALUE) < 1e-8
        assert not result.gap_flag

    def test_balanced_third_angle(self):
        inst = MinimalTaskInstance(theta=math.pi / 3, mu0=0.5, mu1=0.5)
        expected = 0.5 * (1.0 + math.sqrt(0.5 + 0.5 * abs(math.cos(2 * math.pi / 3))))
        result = classical_benchmark(inst, grid_points=601)
        assert abs(result.value - expected) < 1e-12
        assert abs(result.upper - result.value) < 1e-6
        assert abs(expected - 0.5 * (1.0 + math.sqrt(3.0) / 2.0)) < 1e-15

    def test_degenerate_reference_average(self):
        inst = MinimalTaskInstance(theta=0.9, mu0=0.0, mu1=0.7)
        result = classical_benchmark(inst)
        expected = 0.5 * (0.7 + 0.3)  # l0 = 0, radical collapses to l1
        assert abs(result.value - expected) < 1e-12

    def test_unbalanced_gap_is_flagged(self):
        # away from balanced references the law envelope exceeds every device
        inst = MinimalTaskInstance(theta=math.pi / 4, mu0=0.25, mu1=0.25)
        result = classical_benchmark(inst, grid_points=601)
        assert result.gap_flag
        assert result.upper > result.value

    def test_monotone_in_alignment(self):
        # balanced-reference value grows with |cos 2 theta|
        thetas = [math.pi / 4, 0.6, 0.45, 0.3, 0.15]
        cosines = [abs(math.cos(2 * t)) for t in thetas]
        assert all(b > a - 1e-15 for a, b in zip(cosines, cosines[1:]))
        values = [
            commuting_lower_bound(MinimalTaskInstance(theta=t, mu0=0.5, mu1=0.5))
            for t in thetas
        ]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


class TestLawUpperMax:
    def test_balanced_closed_form_sweep(self):
        # at balanced references the envelope max is mu + R max(cos, sin)
        for theta in (0.2, 0.7, math.pi / 4, 1.3):
            inst = MinimalTaskInstance(theta=theta, mu0=0.5, mu1=0.5)
            expected = 0.5 + 0.5 * max(math.cos(theta), math.sin(theta))
            value = law_upper_max(inst, grid_points=601).value
            assert abs(value - expected) < 1e-7


class TestOracleLawAgreement:
    def test_sweep_oracle_sandwiched_by_law(self):
        # 20x20 (theta, mu) sweep with mu0 = mu1 = mu: the oracle never beats
        # the maximized law and never falls below the attainable construction
        thetas = np.linspace(0.08, math.pi / 2 - 0.08, 20)
        mus = np.linspace(0.1, 0.9, 20)
        for theta in thetas:
            for mu in mus:
                inst = MinimalTaskInstance(float(theta), float(mu), float(mu))
                value = oracle_max(inst, point_count=8, restarts=2, seed=0).value
                assert value <= law_upper_max(inst, grid_points=201).value + 1e-6
                assert value >= commuting_lower_bound(inst) - 1e-9

    def test_balanced_line_agreement(self):
        # on the balanced reference line mu = 1/2 the law envelope is
        # attained, so oracle and grid-maximized law must coincide
        for theta in np.linspace(0.08, math.pi / 2 - 0.08, 20):
            inst = MinimalTaskInstance(float(theta), 0.5, 0.5)
            oracle = oracle_max(inst, point_count=8, restarts=2, seed=0).value
            envelope = law_upper_max(inst, grid_points=601).value
            assert abs(oracle - envelope) < 1e-5
