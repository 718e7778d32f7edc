"""Low-dimensional convex geometry.

Convex polygons, support functions, point/body distances and the
Hausdorff distance. Distances are always Euclidean, whatever seminorm is
used elsewhere to measure masses or perimeters.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimError, EmptyBody

#: points closer than this are merged when cleaning vertex lists
DEDUP_TOL = 1e-12
#: relative sine below which a vertex is treated as lying on a straight edge
COLLINEAR_TOL = 1e-12


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _clean_ccw(points: np.ndarray) -> np.ndarray:
    """Drop duplicate and straight-through vertices from a CCW convex cycle."""
    pts = [p for p in points]
    # merge near-duplicates, cyclically
    out: list[np.ndarray] = []
    for p in pts:
        if not out or np.max(np.abs(p - out[-1])) >= DEDUP_TOL:
            out.append(p)
    while len(out) > 1 and np.max(np.abs(out[0] - out[-1])) < DEDUP_TOL:
        out.pop()
    changed = True
    while changed and len(out) > 2:
        changed = False
        k = len(out)
        for i in range(k):
            a, b, c = out[i - 1], out[i], out[(i + 1) % k]
            e1, e2 = b - a, c - b
            scale = math.hypot(*e1) * math.hypot(*e2)
            if abs(_cross(e1, e2)) <= COLLINEAR_TOL * scale and float(e1 @ e2) > 0:
                del out[i]
                changed = True
                break
    if not out:
        return np.zeros((0, 2))
    return np.array(out, dtype=float)


class ConvexPolygon:
    """A compact convex subset of the plane given by its CCW vertex cycle.

    Degenerate bodies are allowed: two vertices describe a segment and a
    single vertex a point. The vertex list never holds repeated points or
    vertices lying in the middle of an edge.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.size == 0:
            v = np.zeros((0, 2))
        if v.ndim != 2 or v.shape[1] != 2:
            raise DimError(f"polygon vertices must have shape (k, 2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("polygon vertices must be finite")
        v = _clean_ccw(v)
        v.setflags(write=False)
        self.vertices = v

    @classmethod
    def hull(cls, points) -> "ConvexPolygon":
        """Convex hull of arbitrary points (Andrew's monotone chain)."""
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            return cls(np.zeros((0, 2)))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DimError(f"hull points must have shape (k, 2), got {pts.shape}")
        uniq = sorted(set(map(tuple, pts.tolist())))
        if len(uniq) <= 2:
            return cls(np.array(uniq))

        def half(seq):
            chain: list[tuple[float, float]] = []
            for p in seq:
                while len(chain) >= 2:
                    o, a = chain[-2], chain[-1]
                    if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) <= 0:
                        chain.pop()
                    else:
                        break
                chain.append(p)
            return chain

        lower = half(uniq)
        upper = half(reversed(uniq))
        return cls(np.array(lower[:-1] + upper[:-1]))

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"ConvexPolygon({self.vertices.tolist()!r})"

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    def _require(self):
        if self.is_empty:
            raise EmptyBody("operation on an empty polygon")

    def support(self, u) -> float | np.ndarray:
        self._require()
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != 2:
            raise DimError("direction must be 2-dimensional")
        return np.max(u @ self.vertices.T, axis=-1) if u.ndim > 1 else float(np.max(self.vertices @ u))

    def polygon(self) -> "ConvexPolygon":
        return self

    def edges(self) -> np.ndarray:
        """Edge vectors v_{i+1} - v_i, cyclically."""
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    def outward_normals(self) -> np.ndarray:
        """Unit outward normals of all edges; both sides for a segment."""
        e = self.edges()
        if len(self.vertices) < 2:
            return np.zeros((0, 2))
        n = np.stack([e[:, 1], -e[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def scale(self) -> float:
        return float(np.max(np.abs(self.vertices))) if len(self.vertices) else 0.0


def as_polygon(body) -> ConvexPolygon:
    """Coerce a polygon or a planar zonotope to a :class:`ConvexPolygon`."""
    if isinstance(body, ConvexPolygon):
        return body
    poly = getattr(body, "polygon", None)
    if poly is None:
        raise TypeError(f"cannot interpret {type(body).__name__} as a convex polygon")
    return poly()


def support(body, u) -> float:
    """Support function h(u) = max over the body of <u, x>."""
    return body.support(u)


def _point_segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.hypot(*(p - (a + t * ab))))


def point_to_convex_distance(p, body) -> float:
    """Euclidean distance from a point to a convex polygon (0 inside)."""
    poly = as_polygon(body)
    poly._require()
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise DimError("point must be 2-dimensional")
    v = poly.vertices
    if len(v) == 1:
        return float(np.hypot(*(p - v[0])))
    if len(v) == 2:
        return _point_segment_distance(p, v[0], v[1])
    e = poly.edges()
    if np.all(_cross(e, p - v) >= 0.0):
        return 0.0
    return min(_point_segment_distance(p, v[i], v[(i + 1) % len(v)]) for i in range(len(v)))


def directed_hausdorff(a, b) -> float:
    """sup over x in a of dist(x, b); zero exactly when a lies inside b.

    The distance to a convex set is convex, so the supremum over the convex
    set ``a`` is reached at one of its vertices.
    """
    pa, pb = as_polygon(a), as_polygon(b)
    pa._require()
    pb._require()
    return max(point_to_convex_distance(x, pb) for x in pa.vertices)


def hausdorff_distance(a, b) -> float:
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def circle_directions(n: int, half: bool = False) -> np.ndarray:
    """``n`` equally spaced unit vectors on the circle (or half circle)."""
    span = math.pi if half else 2.0 * math.pi
    t = np.arange(n) * (span / n)
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def sphere_directions(n: int) -> np.ndarray:
    """Fibonacci lattice of ``n`` nearly uniform unit vectors in R^3."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def unit_directions(dim: int, n: int) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        return circle_directions(n)
    if dim == 3:
        return sphere_directions(n)
    raise DimError(f"unsupported dimension {dim}")


def sampled_hausdorff(a, b, directions) -> float:
    """max_u |h_a(u) - h_b(u)| over unit ``directions``.

    Equals the Hausdorff distance when taken over the whole sphere, so a
    finite sample gives a lower bound. Works in any dimension.
    """
    u = np.asarray(directions, dtype=float)
    return float(np.max(np.abs(np.asarray(a.support(u)) - np.asarray(b.support(u)))))


def contains(outer, inner, rel_tol: float = 1e-12) -> bool:
    """Exact containment test for planar convex bodies via support functions.

    h_outer - h_inner is linear on each cone of the common normal fan, so
    it suffices to test the edge normals of both bodies; the four axis
    directions split any cone of angle >= pi.
    """
    po, pi_ = as_polygon(outer), as_polygon(inner)
    po._require()
    pi_._require()
    dirs = np.vstack([po.outward_normals(), pi_.outward_normals(),
                      [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]])
    scale = max(po.scale(), pi_.scale(), 1e-300)
    return bool(np.all(pi_.support(dirs) <= po.support(dirs) + rel_tol * scale))
