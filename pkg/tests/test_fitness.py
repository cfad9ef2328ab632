import random

import pytest
from hypothesis import given, settings, strategies as st

from robustnet.errors import ConfigError
from robustnet.fitness import (
    AffParams,
    adaptive_fitness,
    degree_deviation,
    edge_deviation,
    penalty_weight,
    score_term,
    structural_deviation,
)
from robustnet.graph import Graph
from robustnet.robustness import robustness_r

from conftest import complete_graph, make_graph, random_graph


class TestDegreeDeviation:
    def test_identity(self, triangle):
        assert degree_deviation(triangle, triangle.copy()) == (0.0, 0)

    def test_path_vs_triangle(self, path3, triangle):
        assert degree_deviation(path3, triangle) == (2 / 3, 1)

    def test_star_vs_isolated(self, star5):
        assert degree_deviation(star5, Graph(5)) == (8 / 5, 4)

    def test_size_mismatch(self, path3, k4):
        with pytest.raises(ValueError):
            degree_deviation(path3, k4)


class TestEdgeDeviation:
    def test_identity(self, triangle):
        assert edge_deviation(triangle, triangle.copy()) == (0, 3)

    def test_path_vs_triangle(self, path3, triangle):
        assert edge_deviation(path3, triangle) == (1, 3)

    def test_both_empty(self):
        assert edge_deviation(Graph(4), Graph(4)) == (0, 0)


class TestStructuralDeviation:
    def test_identity_is_zero(self, k4):
        assert structural_deviation(k4, k4.copy()).y == 0.0

    def test_path_vs_triangle(self, path3, triangle):
        assert structural_deviation(path3, triangle).y == pytest.approx(1.0)

    def test_star_vs_isolated(self, star5):
        assert structural_deviation(star5, Graph(5)).y == pytest.approx(1.4)

    @given(st.integers(0, 10_000), st.integers(0, 10_000))
    @settings(max_examples=100)
    def test_y_bounds(self, s1, s2):
        g1 = random_graph(random.Random(s1), n=8)
        g2 = random_graph(random.Random(s2), n=8)
        assert 0.0 <= structural_deviation(g1, g2).y <= 2.0


class TestPenaltyWeight:
    def test_zero_at_start(self):
        assert penalty_weight(0, AffParams(50)) == 0.0

    def test_one_at_end(self):
        assert penalty_weight(50, AffParams(50)) == 1.0

    def test_reference_value(self):
        assert penalty_weight(25, AffParams(50, 1.5)) == pytest.approx(0.353553, abs=1e-6)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            penalty_weight(-1, AffParams(10))
        with pytest.raises(ValueError):
            penalty_weight(11, AffParams(10))

    def test_invalid_params(self):
        with pytest.raises(ConfigError):
            AffParams(0)
        with pytest.raises(ConfigError):
            AffParams(10, 0.0)

    @given(st.integers(1, 60), st.floats(0.5, 2.0))
    @settings(max_examples=60)
    def test_monotone_in_t(self, t, p):
        params = AffParams(60, p)
        assert penalty_weight(t - 1, params) <= penalty_weight(t, params)

    @given(st.integers(1, 59))
    @settings(max_examples=30)
    def test_larger_exponent_shrinks_midrange_weight(self, t):
        assert penalty_weight(t, AffParams(60, 2.0)) <= penalty_weight(t, AffParams(60, 0.5))


class TestAdaptiveFitness:
    def test_identity_doubles_base_score(self, path3, k4, star5):
        originals = [path3, k4, star5]
        optimizeds = [g.copy() for g in originals]
        expected = 2 * sum(robustness_r(g) for g in originals)
        for t in (0, 3, 50):
            assert adaptive_fitness(originals, optimizeds, t, AffParams(50)) == pytest.approx(expected)

    def test_path_to_triangle_full_penalty(self, path3, triangle):
        f = adaptive_fitness([path3], [triangle], 50, AffParams(50, 1.5))
        assert f == pytest.approx(1 / 3)

    def test_path_to_triangle_no_penalty(self, path3, triangle):
        f = adaptive_fitness([path3], [triangle], 0, AffParams(50, 1.5))
        assert f == pytest.approx(2 / 3)

    def test_length_mismatch(self, path3):
        with pytest.raises(ValueError):
            adaptive_fitness([path3], [], 0, AffParams(10))

    def test_non_increasing_in_t_when_deviating(self, path3, triangle):
        params = AffParams(20, 1.5)
        values = [adaptive_fitness([path3], [triangle], t, params) for t in range(21)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert values[0] > values[-1]

    def test_term_bounds(self):
        rng = random.Random(5)
        params = AffParams(10, 1.5)
        for _ in range(30):
            g1 = random_graph(rng, n=7)
            g2 = random_graph(rng, n=7)
            r = robustness_r(g2)
            y = structural_deviation(g1, g2).y
            for t in (0, 5, 10):
                assert 0.0 <= score_term(r, y, t, params) <= 2 * r + 1e-12

    def test_constraint_satisfied_gives_exact_double(self, k4):
        # same degree sequence and edge count, different labeling
        other = complete_graph(4)
        term = score_term(robustness_r(other),
                          structural_deviation(k4, other).y, 7, AffParams(10))
        assert term == 2 * robustness_r(other)
