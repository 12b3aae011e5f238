import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from workbound.alignment import (
    BlochDirectionFamily,
    best_alignment,
    equatorial_family,
    equatorial_threshold,
    family_from_json,
    family_to_json,
    hierarchy_benchmark,
    hierarchy_threshold,
    minimal_pair_family,
    sphere_alignment_montecarlo,
    two_point_witness,
)
from workbound.operators import ValidationError


def random_family(rng, n):
    g = rng.normal(size=(n, 3))
    return BlochDirectionFamily(g / np.linalg.norm(g, axis=1, keepdims=True))


class TestBestAlignment:
    def test_single_direction(self):
        family = BlochDirectionFamily(np.array([[0.0, 0.0, 1.0]]))
        result = best_alignment(family)
        assert abs(result.r_value - 1.0) < 1e-12
        assert result.method == "enumeration"

    def test_minimal_pair(self):
        result = best_alignment(minimal_pair_family())
        assert abs(result.r_value - 1.0 / math.sqrt(2.0)) < 1e-12

    def test_three_equatorial(self):
        # independent closed form: csc(pi/6)/3 = 2/3
        expected = 1.0 / (3.0 * math.sin(math.pi / 6.0))
        result = best_alignment(equatorial_family(3))
        assert abs(result.r_value - expected) < 1e-12
        assert abs(expected - 2.0 / 3.0) < 1e-15

    def test_antipodal_pair(self):
        family = BlochDirectionFamily(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))
        assert abs(best_alignment(family).r_value - 1.0) < 1e-12

    @given(seed=st.integers(0, 100_000), n=st.integers(2, 10))
    @settings(max_examples=60, deadline=None)
    def test_duality_identity(self, seed, n):
        family = random_family(np.random.default_rng(seed), n)
        result = best_alignment(family)
        signs = np.asarray(result.best_signs, dtype=float)
        dual = float(np.linalg.norm(signs @ family.directions)) / n
        assert abs(dual - result.r_value) < 1e-9

    def test_search_path_consistency(self):
        # above the enumeration cutoff the search flag flips and the value
        # stays consistent with its witness direction
        family = random_family(np.random.default_rng(4), 24)
        result = best_alignment(family)
        assert result.method == "search"
        direct = float(np.mean(np.abs(family.directions @ result.best_direction)))
        assert abs(direct - result.r_value) < 1e-12
        baseline = float(np.max(np.mean(np.abs(family.directions @ family.directions.T), axis=0)))
        assert result.r_value >= baseline - 1e-9
        assert result.r_value <= 1.0

    def test_search_matches_enumeration_at_cutoff(self):
        from workbound.alignment import _search_alignment

        family = random_family(np.random.default_rng(9), 14)
        exact = best_alignment(family)
        searched, _, _, _ = _search_alignment(family.directions)
        assert searched <= exact.r_value + 1e-12
        assert abs(searched - exact.r_value) < 1e-6


class TestHierarchyBenchmark:
    def test_minimal_pair(self):
        value = hierarchy_benchmark(minimal_pair_family())
        assert abs(value - 0.853553) < 1e-6

    def test_six_equatorial(self):
        expected = 0.5 * (1.0 + equatorial_threshold(6))
        assert abs(hierarchy_benchmark(equatorial_family(6)) - expected) < 1e-9

    def test_antipodal_fully_alignable(self):
        family = BlochDirectionFamily(np.array([[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]]))
        assert abs(hierarchy_benchmark(family) - 1.0) < 1e-12

    def test_witness_structure(self):
        witness, alignment = two_point_witness(equatorial_family(5))
        assert np.allclose(witness.weights, [0.5, 0.5])
        assert np.allclose(witness.points[0], -witness.points[1])
        assert set(np.unique(witness.values)) <= {0.0, 1.0}
        assert abs(witness.scored_average(equatorial_family(5)) - 0.5 * (1 + alignment.r_value)) < 1e-9


class TestEquatorialThreshold:
    def test_two_directions(self):
        assert abs(equatorial_threshold(2) - 1.0 / math.sqrt(2.0)) < 1e-15

    def test_three_directions(self):
        assert abs(equatorial_threshold(3) - 2.0 / 3.0) < 1e-15

    def test_large_n_limit(self):
        assert abs(equatorial_threshold(200) - 2.0 / math.pi) < 1e-4

    def test_rejects_zero(self):
        with pytest.raises(ValidationError):
            equatorial_threshold(0)

    def test_matches_enumeration(self):
        for n in range(2, 13):
            enumerated = best_alignment(equatorial_family(n)).r_value
            assert abs(enumerated - equatorial_threshold(n)) < 1e-9

    def test_monotone_decreasing(self):
        values = [equatorial_threshold(n) for n in range(2, 201)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] > 2.0 / math.pi


class TestSphereMonteCarlo:
    def test_large_sample_estimate(self):
        estimate, std_error = sphere_alignment_montecarlo(1_000_000, seed=17)
        assert abs(estimate - 0.5) < 1e-3
        assert std_error < 5e-4

    def test_deterministic(self):
        a = sphere_alignment_montecarlo(10_000, seed=3)
        b = sphere_alignment_montecarlo(10_000, seed=3)
        assert a == b

    def test_small_sample_within_errors(self):
        estimate, std_error = sphere_alignment_montecarlo(1000, seed=5)
        assert abs(estimate - 0.5) < 3.0 * std_error + 1e-12

    def test_rejects_tiny_sample(self):
        with pytest.raises(ValidationError):
            sphere_alignment_montecarlo(10, seed=0)


class TestHierarchyThreshold:
    def test_minimal_pair_above_threshold(self):
        report = hierarchy_threshold(minimal_pair_family(), visibility=0.8)
        assert report.advantageous
        assert abs(report.v_c - 1.0 / math.sqrt(2.0)) < 1e-12

    def test_noiseless_always_wins(self):
        report = hierarchy_threshold(equatorial_family(7), visibility=1.0)
        assert report.advantageous
        assert report.quantum == 1.0

    def test_exact_threshold_not_advantageous(self):
        family = minimal_pair_family()
        v_c = best_alignment(family).r_value
        report = hierarchy_threshold(family, visibility=v_c)
        assert not report.advantageous

    def test_values_formula(self):
        report = hierarchy_threshold(equatorial_family(4), visibility=0.9)
        assert abs(report.quantum - 0.95) < 1e-15
        assert abs(report.classical - 0.5 * (1.0 + equatorial_threshold(4))) < 1e-9


class TestFamilyValidation:
    def test_rejects_non_unit(self):
        with pytest.raises(ValidationError):
            BlochDirectionFamily(np.array([[0.5, 0.0, 0.0]]))

    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            BlochDirectionFamily(np.zeros((0, 3)))

    def test_json_roundtrip(self):
        family = equatorial_family(5)
        back = family_from_json(family_to_json(family))
        assert np.allclose(back.directions, family.directions)
