import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vecmeasure import ConvexPolygon, EmptyBody, Zonotope
from vecmeasure.errors import DimError
from vecmeasure.geometry import (
    circle_directions,
    contains,
    directed_hausdorff,
    hausdorff_distance,
    point_to_convex_distance,
    sampled_hausdorff,
    support,
)

from conftest import polygons, vec

SQRT1_2 = math.sqrt(0.5)
DIAGONAL = ConvexPolygon([[0, 0], [1, 1]])


class TestConvexPolygon:
    def test_vertices_are_ccw_and_deduplicated(self):
        p = ConvexPolygon([[0, 0], [1, 0], [1, 0], [1, 1], [0.5, 1], [0, 1]])
        assert len(p) == 4
        x, y = p.vertices.T
        area2 = float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
        assert area2 > 0

    def test_hull_drops_interior_and_collinear_points(self):
        pts = [[0, 0], [2, 0], [1, 0], [2, 2], [0, 2], [1, 1]]
        assert sorted(map(tuple, ConvexPolygon.hull(pts).vertices)) == [(0, 0), (0, 2), (2, 0), (2, 2)]

    def test_segment_keeps_both_endpoints(self):
        seg = ConvexPolygon.hull([[0, 0], [0.5, 0.5], [1, 1]])
        assert len(seg) == 2

    def test_near_duplicates_merge(self):
        assert len(ConvexPolygon.hull([[0, 0], [1e-14, 0], [1, 0]])) == 2

    @pytest.mark.parametrize("bad", [[[0, 0, 0]], [[np.nan, 0]], [1, 2]])
    def test_rejects_bad_input(self, bad):
        with pytest.raises((DimError, ValueError)):
            ConvexPolygon(bad)

    def test_vertices_are_read_only(self, unit_square):
        with pytest.raises(ValueError):
            unit_square.vertices[0, 0] = 5.0


class TestSupport:
    def test_unit_square(self, unit_square):
        assert support(unit_square, [1, 0]) == 1.0

    def test_zero_functional(self, unit_square):
        assert support(unit_square, [0, 0]) == 0.0

    def test_zonotope(self):
        assert support(Zonotope([[1, 0], [0, 1], [1, 1]]), [1, 1]) == 4.0

    def test_empty_body(self):
        with pytest.raises(EmptyBody):
            support(ConvexPolygon(np.zeros((0, 2))), [1, 0])

    @given(polygons(), vec(2), st.floats(0, 100))
    def test_positively_homogeneous(self, p, u, lam):
        assert support(p, lam * u) == pytest.approx(lam * support(p, u), rel=1e-12, abs=1e-9)

    @given(polygons(), vec(2), vec(2))
    def test_subadditive(self, p, u, w):
        assert support(p, u + w) <= support(p, u) + support(p, w) + 1e-9


class TestDistances:
    def test_point_to_segment(self):
        assert point_to_convex_distance([1, 0], DIAGONAL) == pytest.approx(SQRT1_2, abs=1e-15)

    def test_point_inside(self, unit_square):
        assert point_to_convex_distance([0.3, 0.6], unit_square) == 0.0

    def test_point_outside_square(self, unit_square):
        assert point_to_convex_distance([2, 0], unit_square) == 1.0

    def test_hausdorff_examples(self, unit_square):
        assert hausdorff_distance(unit_square, unit_square) == 0.0
        assert hausdorff_distance(DIAGONAL, unit_square) == pytest.approx(SQRT1_2, abs=1e-15)
        point = ConvexPolygon([[0, 0]])
        assert hausdorff_distance(point, ConvexPolygon([[-1, 0], [1, 0]])) == 1.0

    def test_directed_examples(self, unit_square):
        assert directed_hausdorff(unit_square, DIAGONAL) == pytest.approx(SQRT1_2, abs=1e-15)
        assert directed_hausdorff(DIAGONAL, unit_square) == 0.0

    def test_empty(self, unit_square):
        with pytest.raises(EmptyBody):
            hausdorff_distance(unit_square, ConvexPolygon(np.zeros((0, 2))))

    @given(polygons(), polygons())
    def test_symmetric(self, a, b):
        assert hausdorff_distance(a, b) == hausdorff_distance(b, a)

    @given(polygons())
    def test_identity(self, a):
        assert hausdorff_distance(a, ConvexPolygon(a.vertices[::-1])) <= 1e-12 * max(a.scale(), 1.0)

    @given(polygons(), polygons(), polygons())
    def test_triangle_inequality(self, a, b, c):
        assert hausdorff_distance(a, c) <= hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-9

    @given(polygons(), polygons())
    def test_directed_zero_iff_contained(self, a, b):
        assert (directed_hausdorff(a, b) <= 1e-12 * max(a.scale(), b.scale(), 1)) == contains(b, a)

    @given(polygons(), polygons())
    def test_support_oracle_is_lower_bound_and_converges(self, a, b):
        exact = hausdorff_distance(a, b)
        coarse = sampled_hausdorff(a, b, circle_directions(64))
        fine = sampled_hausdorff(a, b, circle_directions(20_000))
        scale = max(a.scale(), b.scale(), 1.0)
        assert coarse <= exact + 1e-9 * scale
        assert fine <= exact + 1e-9 * scale
        # the worst-direction error of a grid with spacing h is O(h) times the diameter
        assert exact - fine <= 2 * math.pi / 20_000 * 4 * scale


class TestContains:
    def test_square_contains_its_diagonal(self, unit_square):
        assert contains(unit_square, DIAGONAL)
        assert not contains(DIAGONAL, unit_square)

    @given(polygons(), polygons())
    def test_agrees_with_dense_sampling(self, a, b):
        dirs = circle_directions(10_000)
        sampled = bool(np.all(b.support(dirs) <= a.support(dirs) + 1e-9))
        if contains(a, b):
            assert sampled
        else:
            assert directed_hausdorff(b, a) > 0
