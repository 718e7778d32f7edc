import sys

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from vecmeasure import ConvexPolygon, Euclidean, Lp, Polygonal, VectorMeasure

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


def vec(dim):
    return st.lists(coord, min_size=dim, max_size=dim).map(lambda v: np.array(v))


@st.composite
def measures(draw, dim=2, min_atoms=0, max_atoms=8, space_dim=1):
    k = draw(st.integers(min_atoms, max_atoms))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal((k, dim)) * draw(st.sampled_from([1e-3, 1.0, 1e3]))
    sites = rng.uniform(-1, 1, size=(k, space_dim))
    return VectorMeasure(sites, vals, space_dim=space_dim, dim=dim)


@st.composite
def norms(draw, dim=2):
    kind = draw(st.sampled_from(["euclidean", "lp", "polygonal"]))
    if kind == "euclidean":
        return Euclidean()
    if kind == "lp":
        p = draw(st.sampled_from([1.0, 1.5, 2.0, 3.0, 4.0, float("inf")]))
        w = draw(st.one_of(st.none(), st.lists(st.floats(0.1, 5), min_size=dim, max_size=dim)))
        return Lp(p, w)
    k = draw(st.integers(1, 5))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return Polygonal(rng.standard_normal((k, dim)))


@st.composite
def polygons(draw, min_points=1, max_points=12):
    k = draw(st.integers(min_points, max_points))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return ConvexPolygon.hull(rng.standard_normal((k, 2)) * 3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_square():
    return ConvexPolygon([[0, 0], [1, 0], [1, 1], [0, 1]])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
