import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vecmeasure import (
    Euclidean,
    Lp,
    Polygonal,
    SumOfCircles,
    ZonalMeasure,
    dual_eval,
    is_strictly_convex,
    strict_convexity_probe,
    validate_zonal,
    zonal_approx_2d,
    zonal_euclidean,
    zonal_from_polygonal_2d,
)
from vecmeasure.errors import DimError, WrongKind
from vecmeasure.geometry import circle_directions
from vecmeasure.norms import EUCLIDEAN_ZONAL_KAPPA, convexity_witness, zonal_equality_witness_2d

from conftest import norms, vec


class TestEval:
    def test_examples(self):
        assert Euclidean()([3, 4]) == 5.0
        assert Lp(1)([1, -1]) == 2.0
        assert SumOfCircles()([1, 0, 0]) == 2.0

    def test_vectorised(self):
        assert np.allclose(Lp(math.inf)(np.array([[1, -3], [2, 0.5]])), [3, 2])

    def test_weighted_lp(self):
        # weights multiply |v_i|^p
        assert Lp(2, [4, 1])([1, 1]) == pytest.approx(math.sqrt(5))
        assert Lp(math.inf, [2, 1])([1, 1]) == 2.0

    def test_dim_mismatch(self):
        with pytest.raises(DimError):
            Polygonal([[1, 0]])([1, 2, 3])
        with pytest.raises(DimError):
            SumOfCircles()([1, 0])

    @given(norms(), vec(2), vec(2))
    def test_subadditive(self, n, v, w):
        assert n(v + w) <= (n(v) + n(w)) * (1 + 1e-12) + 1e-300

    @given(norms(), vec(2), st.floats(-100, 100))
    def test_absolutely_homogeneous(self, n, v, lam):
        assert n(lam * v) == pytest.approx(abs(lam) * n(v), rel=1e-12, abs=1e-300)

    @given(norms(), vec(2))
    def test_nonnegative(self, n, v):
        assert n(v) >= 0


class TestDual:
    def test_examples(self):
        assert dual_eval(Euclidean(), [3, 4]) == 5.0
        assert dual_eval(Lp(1), [1, -2]) == 2.0
        assert dual_eval(Polygonal([[1, 0], [0, 1]]), [1, 1]) == pytest.approx(1.0, abs=1e-15)

    def test_kernel_gives_infinity(self):
        seminorm = Polygonal([[1, 0]])
        assert dual_eval(seminorm, [0, 1]) == math.inf
        assert dual_eval(seminorm, [3, 0]) == pytest.approx(3.0)

    def test_sum_of_circles_dual(self):
        # the norm is at least 2 max|v_i|, with equality on the axes
        assert dual_eval(SumOfCircles(), [1, 0, 0]) == pytest.approx(0.5, rel=1e-6)

    def test_polygonal_3d_rejected(self):
        with pytest.raises(DimError):
            dual_eval(Polygonal(np.eye(3)), [1, 0, 0])

    @pytest.mark.parametrize("n", [Euclidean(), Lp(1), Lp(3), Lp(math.inf, [1, 2]),
                                   Polygonal([[1, 0], [0.3, 1], [-1, 2]])])
    def test_bipolar(self, n):
        """n(v) = max <eta, v> over the dual unit ball, sampled on its boundary."""
        dirs = circle_directions(20_000)
        h = 2 * math.pi / 20_000
        ball = dirs / np.array([dual_eval(n, u) for u in dirs])[:, None]
        rng = np.random.default_rng(7)
        for v in rng.standard_normal((20, 2)):
            assert np.max(ball @ v) == pytest.approx(n(v), rel=h)
            assert np.max(ball @ v) <= n(v) * (1 + 1e-12)


class TestStrictConvexity:
    def test_exact_classification(self):
        assert is_strictly_convex(Euclidean())
        assert not is_strictly_convex(Lp(1))
        assert not is_strictly_convex(Lp(math.inf))
        assert is_strictly_convex(Lp(3))
        assert is_strictly_convex(SumOfCircles())
        assert not is_strictly_convex(Polygonal([[1, 0], [0, 1]]))
        assert not is_strictly_convex(Lp(2, [1, 0]))  # kernel

    def test_probe(self):
        assert strict_convexity_probe(Euclidean(), dim=2)
        assert not strict_convexity_probe(Lp(1), dim=2)
        assert not strict_convexity_probe(Polygonal([[0.5, 0.5], [0.5, -0.5]]))

    def test_l1_witness_is_basis_pair(self):
        v, w = convexity_witness(Lp(1), dim=2)
        assert {tuple(v), tuple(w)} == {(1.0, 0.0), (0.0, 1.0)}

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_finite_zonal_norms_are_never_strictly_convex(self, k, seed):
        rng = np.random.default_rng(seed)
        sigma = ZonalMeasure(rng.standard_normal((k, 2)), rng.uniform(0.1, 2, k))
        v, w = zonal_equality_witness_2d(sigma)
        assert abs(v[0] * w[1] - v[1] * w[0]) > 1e-9
        signs = np.sign(sigma.etas @ v) * np.sign(sigma.etas @ w)
        assert np.all(signs >= 0)
        n = sigma.as_seminorm()
        assert n(v + w) == pytest.approx(n(v) + n(w), rel=1e-12)
        assert not strict_convexity_probe(n)


class TestZonal:
    def test_from_polygonal_examples(self):
        sigma = zonal_from_polygonal_2d(Polygonal([[1, 0], [0, 1]]))
        assert sigma == ZonalMeasure([[1, 0], [0, 1]], [1, 1])
        assert sigma.induced_norm([1, 1]) == 2.0
        assert zonal_from_polygonal_2d(Polygonal([[1, 0]])) == ZonalMeasure([[1, 0]])
        assert zonal_from_polygonal_2d(Polygonal([[1, 0], [0, 1], [1, 1]])).induced_norm([1, 0]) == 2.0

    def test_from_polygonal_rejects(self):
        with pytest.raises(WrongKind):
            zonal_from_polygonal_2d(Euclidean())
        with pytest.raises(DimError):
            zonal_from_polygonal_2d(Polygonal(np.eye(3)))

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1), vec(2))
    def test_round_trip(self, k, seed, v):
        n = Polygonal(np.random.default_rng(seed).standard_normal((k, 2)))
        assert zonal_from_polygonal_2d(n).induced_norm(v) == pytest.approx(n(v), rel=1e-12, abs=1e-300)

    def test_normal_form(self):
        a = ZonalMeasure([[1, -1], [0, 2], [-1, 1]], [1, 1, 2])
        assert a == ZonalMeasure([[-1, 1], [0, 2]], [3, 1])
        with pytest.raises(ValueError):
            ZonalMeasure([[1, 0]], [-1])

    def test_approx_euclidean(self):
        sigma = zonal_approx_2d(Euclidean(), 1e-3)
        assert 0.999 <= sigma.induced_norm([1, 0]) <= 1.0
        assert len(sigma) < 200

    def test_approx_bounds_lp4(self):
        n = Lp(4)
        sigma = zonal_approx_2d(n, 1e-2)
        d = circle_directions(360)
        ratio = sigma.induced_norm(d) / n(d)
        assert np.all(ratio >= 0.99) and np.all(ratio <= 1 + 1e-12)

    def test_approx_delegates_for_polygonal(self):
        n = Polygonal([[1, 0], [1, 2]])
        assert zonal_approx_2d(n, 0.5) == zonal_from_polygonal_2d(n)

    def test_euclidean_constants(self):
        assert EUCLIDEAN_ZONAL_KAPPA[2] == 0.25
        assert EUCLIDEAN_ZONAL_KAPPA[3] == pytest.approx(1 / (2 * math.pi))

    def test_euclidean_quadrature_2d(self):
        sigma, kappa = zonal_euclidean(2, 10_000)
        assert kappa == 0.25
        assert sigma.induced_norm([1, 0]) == pytest.approx(1.0, abs=1e-6)

    def test_euclidean_quadrature_3d(self):
        sigma, _ = zonal_euclidean(3, 20_000)
        rng = np.random.default_rng(3)
        v = rng.standard_normal((50, 3))
        assert np.allclose(sigma.induced_norm(v), np.linalg.norm(v, axis=1), rtol=1e-3)

    def test_euclidean_bad_dim(self):
        with pytest.raises(DimError):
            zonal_euclidean(4, 100)

    def test_validate(self):
        assert validate_zonal(Lp(1), zonal_from_polygonal_2d(Lp(1).as_polygonal(2))).max_rel_error == 0.0
        coarse, _ = zonal_euclidean(2, 4)
        assert not validate_zonal(Euclidean(), coarse, tol=1e-6).passed
        fine, _ = zonal_euclidean(2, 10_000)
        assert validate_zonal(Euclidean(), fine, tol=1e-5).passed
