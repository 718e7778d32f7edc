"""Zonotopes ``b + [0, g_1] + ... + [0, g_k]`` and planar perimeter identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import geometry
from .errors import DimError, EmptyBody, NotContained
from .geometry import ConvexPolygon, as_polygon
from .norms import Seminorm, ZonalMeasure

if TYPE_CHECKING:
    from .measures import VectorMeasure


def _flip_sign(g: np.ndarray) -> np.ndarray:
    """+1/-1 per row so that the last nonzero coordinate becomes positive
    (planar case: the generator points into the upper half-plane, or along +x)."""
    s = np.ones(len(g))
    for i, row in enumerate(g):
        nz = np.flatnonzero(row)
        if len(nz) and row[nz[-1]] < 0:
            s[i] = -1.0
    return s


class Zonotope:
    """Minkowski sum of segments plus an offset, kept in canonical form.

    Zero generators are dropped. A generator ``g`` pointing into the lower
    half-space is replaced by ``-g`` with the offset shifted by ``g``, since
    ``[0, g] = g + [0, -g]``. In the plane generators are then sorted by
    angle in ``[0, pi)``.
    """

    __slots__ = ("generators", "offset")

    def __init__(self, generators, offset=None, *, dim: int | None = None):
        g = np.asarray(generators, dtype=float)
        if g.size == 0:
            if dim is None:
                if offset is None:
                    raise DimError("an empty zonotope needs a dimension")
                dim = len(np.atleast_1d(offset))
            g = np.zeros((0, dim))
        if g.ndim != 2:
            raise DimError("generators must have shape (k, d)")
        d = g.shape[1]
        if dim is not None and d != dim:
            raise DimError(f"generators must lie in R^{dim}")
        b = np.zeros(d) if offset is None else np.asarray(offset, dtype=float).copy()
        if b.shape != (d,):
            raise DimError("offset dimension differs from generator dimension")
        g = g[np.any(g != 0, axis=1)]
        s = _flip_sign(g)
        b = b + g[s < 0].sum(axis=0)
        g = g * s[:, None]
        if d == 2 and len(g):
            ang = np.arctan2(g[:, 1], g[:, 0])
            g = g[np.lexsort((np.hypot(g[:, 0], g[:, 1]), ang))]
        g.setflags(write=False)
        b.setflags(write=False)
        self.generators = g
        self.offset = b

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def __repr__(self):
        return f"Zonotope({len(self.generators)} generators, dim={self.dim})"

    def support(self, u):
        """h(u) = <u, b> + sum_i max(0, <u, g_i>), vectorised over rows of u."""
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim:
            raise DimError(f"direction must lie in R^{self.dim}")
        val = u @ self.offset + np.maximum(0.0, u @ self.generators.T).sum(axis=-1)
        return float(val) if u.ndim == 1 else val

    def center(self) -> np.ndarray:
        return self.offset + 0.5 * self.generators.sum(axis=0)

    def polygon(self) -> ConvexPolygon:
        return vertices_2d(self)

    def translate(self, t) -> "Zonotope":
        return Zonotope(self.generators, self.offset + np.asarray(t, dtype=float))

    def linear_image(self, T) -> "Zonotope":
        T = np.atleast_2d(np.asarray(T, dtype=float))
        return Zonotope(self.generators @ T.T, T @ self.offset, dim=T.shape[0])


def vertices_2d(z: Zonotope) -> ConvexPolygon:
    """CCW vertex cycle of a planar zonotope.

    With generators sorted by angle in [0, pi) the boundary is walked as
    g_1, ..., g_k, -g_1, ..., -g_k starting from the offset, which is the
    lowest (then leftmost) vertex. Parallel generators collapse into one
    edge during polygon cleanup.
    """
    if z.dim != 2:
        raise DimError("vertex enumeration is planar")
    if len(z.generators) == 0:
        return ConvexPolygon(z.offset.reshape(1, 2))
    steps = np.vstack([z.generators, -z.generators])
    pts = z.offset + np.vstack([np.zeros((1, 2)), np.cumsum(steps, axis=0)[:-1]])
    return ConvexPolygon(pts)


def minkowski_sum(z1: Zonotope, z2: Zonotope) -> Zonotope:
    if z1.dim != z2.dim:
        raise DimError("Minkowski sum of zonotopes in different dimensions")
    return Zonotope(np.vstack([z1.generators, z2.generators]), z1.offset + z2.offset, dim=z1.dim)


def contains_2d(outer, inner) -> bool:
    """Exact planar containment via support functions on the common normal fan."""
    for body in (outer, inner):
        if isinstance(body, Zonotope) and body.dim != 2:
            raise DimError("containment is only decided in the plane")
    return geometry.contains(as_polygon(outer), as_polygon(inner))


def _check_planar_norm(n: Seminorm):
    if n.dim not in (None, 2):
        raise DimError("perimeters are defined for planar seminorms")


def perimeter(body, n: Seminorm) -> float:
    """Anisotropic perimeter: sum of n over the edge vectors of the vertex cycle.

    A segment [a, b] has perimeter 2 n(b - a), a point 0.
    """
    _check_planar_norm(n)
    if isinstance(body, Zonotope) and body.dim != 2:
        raise DimError("perimeters are defined for planar bodies")
    poly = as_polygon(body)
    if poly.is_empty:
        raise EmptyBody("perimeter of an empty body")
    return math.fsum(np.asarray(n(poly.edges())).tolist())


@dataclass(frozen=True)
class IdentityReport:
    total_variation: float
    half_perimeter: float
    abs_gap: float
    rel_gap: float


def mass_perimeter_identity_check(mu: "VectorMeasure", n: Seminorm) -> IdentityReport:
    """Compare |mu|_n(X) with half the n-perimeter of range(mu)."""
    from .measures import range_of, total_variation

    if mu.dim != 2:
        raise DimError("the mass/perimeter identity is planar")
    tv = total_variation(mu, n)
    half = 0.5 * perimeter(range_of(mu), n)
    gap = abs(tv - half)
    return IdentityReport(tv, half, gap, gap / tv if tv > 0 else gap)


def crofton_perimeter(body, sigma: ZonalMeasure) -> float:
    """2 * sum_j w_j * width of the body in direction eta_j."""
    if sigma.dim != 2:
        raise DimError("Crofton formula is planar here")
    poly = as_polygon(body)
    if poly.is_empty:
        raise EmptyBody("perimeter of an empty body")
    proj = poly.vertices @ sigma.etas.T
    widths = proj.max(axis=0) - proj.min(axis=0)
    return 2.0 * math.fsum((sigma.weights * widths).tolist())


@dataclass(frozen=True)
class MonotonicityReport:
    per_inner: float
    per_outer: float
    hausdorff: float
    monotone: bool
    strict_required: bool
    strict_ok: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.strict_ok


def perimeter_monotonicity_check(inner, outer, n: Seminorm) -> MonotonicityReport:
    """Check Per(inner) <= Per(outer) and, for strictly convex n, strictness when the sets differ."""
    if not contains_2d(outer, inner):
        raise NotContained("inner body is not contained in outer body")
    pi_, po = as_polygon(inner), as_polygon(outer)
    scale = max(pi_.scale(), po.scale(), 1e-300)
    a, b = perimeter(pi_, n), perimeter(po, n)
    dh = geometry.hausdorff_distance(pi_, po)
    strict_required = n.is_strictly_convex() and dh > 1e-9 * scale
    monotone = a <= b + 1e-12 * max(scale, b)
    return MonotonicityReport(a, b, dh, monotone, strict_required, (a < b) if strict_required else True)
