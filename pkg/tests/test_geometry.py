import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from metastab.geometry import (
    Ball,
    Box,
    ContractViolation,
    contains,
    convex_combination,
    inner,
    norm,
    point,
    project,
    total_boundedness_modulus,
)

finite_coord = st.floats(min_value=-100, max_value=100, allow_nan=False)


def vec(d):
    return st.lists(finite_coord, min_size=d, max_size=d).map(point)


class TestInnerNorm:
    def test_orthogonal(self):
        assert inner(point(1, 0), point(0, 1)) == 0.0

    def test_hand_computed(self):
        assert inner(point(1, 2), point(3, 4)) == 11.0

    def test_self_inner_is_norm_squared(self):
        u = point(1.5, -2.0, 0.25)
        assert inner(u, u) == pytest.approx(norm(u) ** 2)

    def test_norm_zero(self):
        assert norm(point(0, 0, 0)) == 0.0

    def test_pythagorean(self):
        assert norm(point(3, 4)) == pytest.approx(5.0)

    def test_unit_scalar(self):
        assert norm(point(1)) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ContractViolation):
            inner(point(1, 2), point(1, 2, 3))


class TestConvexCombination:
    def test_endpoints(self):
        u, v = point(2.0, 0.0), point(0.0, 2.0)
        assert np.allclose(convex_combination(0.0, u, v), v)
        assert np.allclose(convex_combination(1.0, u, v), u)

    def test_midpoint(self):
        got = convex_combination(0.5, point(2, 0), point(0, 2))
        assert np.allclose(got, point(1, 1))

    def test_weight_out_of_range(self):
        with pytest.raises(ContractViolation):
            convex_combination(1.5, point(0), point(1))


class TestContainsProject:
    def test_box_interior(self):
        assert contains(Box(point(0, 0), point(1, 1)), point(0.5, 0.5), 0.0)

    def test_ball_boundary_within_slack(self):
        assert contains(Ball(point(0, 0), 1.0), point(1.0000000001, 0.0), 1e-9)

    def test_box_exterior(self):
        assert not contains(Box(point(0), point(1)), point(2), 0.0)

    def test_box_clamp(self):
        assert np.allclose(project(Box(point(0), point(1)), point(2)), point(1))

    def test_ball_radial(self):
        assert np.allclose(project(Ball(point(0, 0), 1.0), point(2, 0)), point(1, 0))

    def test_project_identity_inside(self):
        s = Ball(point(0, 0), 1.0)
        x = point(0.3, -0.4)
        assert np.allclose(project(s, x), x)

    @given(vec(2), vec(2))
    @settings(max_examples=200, deadline=None)
    def test_projection_idempotent_and_nonexpansive(self, u, v):
        for s in (Box(point(-3, -5), point(4, 2)), Ball(point(1, -1), 2.5)):
            pu, pv = project(s, u), project(s, v)
            assert np.allclose(project(s, pu), pu, atol=1e-12)
            assert norm(pu - pv) <= norm(u - v) + 1e-9 * (1 + norm(u - v))

    def test_invalid_box(self):
        with pytest.raises(ContractViolation):
            Box(point(1.0), point(0.0))

    def test_invalid_ball(self):
        with pytest.raises(ContractViolation):
            Ball(point(0.0), -1.0)


class TestHilbertIdentities:
    @given(vec(3), vec(3))
    @settings(max_examples=200, deadline=None)
    def test_convex_combination_identity(self, u, v):
        for lam in (0.0, 0.25, 0.5, 0.75, 1.0):
            lhs = norm(convex_combination(lam, u, v)) ** 2
            rhs = lam * norm(u) ** 2 + (1 - lam) * norm(v) ** 2 - lam * (1 - lam) * norm(u - v) ** 2
            scale = 1e-9 * (1 + max(norm(u), norm(v)) ** 2)
            assert abs(lhs - rhs) <= scale

    @given(vec(3), vec(3))
    @settings(max_examples=200, deadline=None)
    def test_parallelogram_expansions(self, u, v):
        scale = 1e-9 * (1 + max(norm(u), norm(v)) ** 2)
        assert abs(norm(u + v) ** 2 - (norm(u) ** 2 + norm(v) ** 2 + 2 * inner(u, v))) <= scale
        assert abs(norm(u - v) ** 2 - (norm(u) ** 2 + norm(v) ** 2 - 2 * inner(u, v))) <= scale


SETS = {
    "box1": Box(point(0.0), point(1.0)),
    "box2": Box(point(0.0, 0.0), point(1.0, 1.0)),
    "box3": Box(point(-1.0, 0.0, 2.0), point(1.0, 2.0, 3.5)),
    "ball1": Ball(point(0.5), 0.75),
    "ball2": Ball(point(0.0, 0.0), 1.0),
    "ball3": Ball(point(1.0, -1.0, 0.0), 1.25),
}


class TestTotalBoundedness:
    def test_unit_interval_values(self):
        gamma = total_boundedness_modulus(Box(point(0.0), point(1.0)))
        assert gamma(0) == 1
        for k in range(6):
            assert gamma(k) == k + 1

    def test_unit_square_k0(self):
        gamma = total_boundedness_modulus(Box(point(0, 0), point(1, 1)))
        assert gamma(0) == 4

    def test_one_cell_covers_interval(self):
        # brute-force check of the k=0 guarantee on the unit interval:
        # any two points are within 1 of each other
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = rng.uniform(0, 1, size=2)
            assert abs(u[0] - u[1]) <= 1.0

    @pytest.mark.parametrize("name", sorted(SETS))
    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_pigeonhole(self, name, k):
        ambient = SETS[name]
        gamma = total_boundedness_modulus(ambient)
        count = gamma(k) + 1
        rng = np.random.default_rng(abs(hash((name, k))) % 2**32)
        threshold = 1.0 / (k + 1)
        for _ in range(20):
            pts = ambient.sample(rng, count)
            if count <= 400:
                nearest = pdist(pts).min()
            else:
                tree = cKDTree(pts)
                dist, _ = tree.query(pts, k=2)
                nearest = dist[:, 1].min()
            assert nearest <= threshold + 1e-12

    def test_diameter_bound_soundness(self):
        rng = np.random.default_rng(5)
        for name, ambient in SETS.items():
            b = ambient.diameter_bound
            pts = ambient.sample(rng, 400)
            assert pdist(pts).max() <= b + 1e-9, name

    def test_diameter_values(self):
        assert Box(point(-1.0), point(1.0)).diameter_bound == 2
        assert Ball(point(0, 0), 1.0).diameter_bound == 2
        assert Box(point(0, 0), point(1, 1)).diameter_bound == 2  # ceil(sqrt(2))
