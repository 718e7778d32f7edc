"""Seminorms on V, their duals, and zonal representations.

A zonal representation of a seminorm is a nonnegative measure ``sigma``
on the dual space with ``|v| = sum_j w_j |<eta_j, v>|``; here ``sigma``
is always finitely supported, see :class:`ZonalMeasure`.

All seminorms evaluate vectorised over leading axes: ``n(v)`` accepts an
array of shape ``(..., d)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimError, NoConvergence, NotANorm, WrongKind
from .geometry import circle_directions, sphere_directions

_INF = math.inf


def _as_scalar(x):
    return float(x) if np.ndim(x) == 0 else x


class Seminorm:
    """Base class. Subclasses set ``kind`` and implement ``_eval``."""

    kind = ""
    dim: int | None = None

    def __call__(self, v):
        return self.eval(v)

    def _check(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 0:
            raise DimError("expected a vector, got a scalar")
        if self.dim is not None and arr.shape[-1] != self.dim:
            raise DimError(f"{self.kind} seminorm acts on R^{self.dim}, got vectors in R^{arr.shape[-1]}")
        return arr

    def eval(self, v):
        return _as_scalar(self._eval(self._check(v)))

    def _eval(self, v):
        raise NotImplementedError

    def dual(self, eta) -> float:
        """Dual norm ``sup{<eta, v> : |v| <= 1}``; ``inf`` off the annihilator of the kernel."""
        raise NotImplementedError

    def subgradient(self, v) -> np.ndarray:
        """Some ``eta`` with ``<eta, v> = |v|`` and dual norm at most one."""
        raise NotImplementedError

    def is_norm(self) -> bool:
        return True

    def is_strictly_convex(self) -> bool:
        raise NotImplementedError

    def as_polygonal(self, dim: int | None = None) -> "Polygonal | None":
        """Exact rewriting as a sum of absolute linear forms, when one is known."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Euclidean(Seminorm):
    dim: int | None = None
    kind = "euclidean"

    def _eval(self, v):
        return Lp._pnorm(v, 2.0)

    def dual(self, eta) -> float:
        return float(Lp._pnorm(self._check(eta), 2.0))

    def subgradient(self, v):
        v = self._check(v)
        r = Lp._pnorm(v, 2.0)
        return v / r if r > 0 else np.zeros_like(v)

    def is_strictly_convex(self) -> bool:
        return True

    def to_json(self):
        return {"kind": "euclidean"}


class Lp(Seminorm):
    """Weighted l^p seminorm ``v -> (sum_i w_i |v_i|^p)^(1/p)``.

    For ``p = inf`` it is ``max_i w_i |v_i|``. Zero weights give a kernel.
    Internally ``|v| = ||s * v||_p`` with ``s_i = w_i^(1/p)`` (``s = w`` for
    ``p = inf``).
    """

    kind = "lp"

    def __init__(self, p: float, weights=None):
        p = float(p)
        if not p >= 1.0:
            raise ValueError(f"p must lie in [1, inf], got {p}")
        self.p = p
        if weights is None:
            self.weights = None
            self.dim = None
            self._s = None
        else:
            w = np.asarray(weights, dtype=float)
            if w.ndim != 1 or len(w) == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be a nonempty list of finite nonnegative numbers")
            w.setflags(write=False)
            self.weights = w
            self.dim = len(w)
            self._s = w if math.isinf(p) else w ** (1.0 / p)

    def __repr__(self):
        w = None if self.weights is None else self.weights.tolist()
        return f"Lp(p={self.p}, weights={w})"

    @property
    def conjugate(self) -> float:
        if self.p == 1.0:
            return _INF
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def _scaled(self, v):
        return v if self._s is None else v * self._s

    @staticmethod
    def _pnorm(y, p):
        a = np.abs(y)
        if math.isinf(p):
            return np.max(a, axis=-1)
        if p == 1.0:
            return np.sum(a, axis=-1)
        m = np.max(a, axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        return (np.sum((a / safe) ** p, axis=-1) ** (1.0 / p)) * m[..., 0]

    def _eval(self, v):
        return self._pnorm(self._scaled(v), self.p)

    def dual(self, eta) -> float:
        eta = self._check(eta)
        if self._s is None:
            return float(self._pnorm(eta, self.conjugate))
        dead = self._s == 0
        if np.any(eta[dead] != 0):
            return _INF
        return float(self._pnorm(eta[~dead] / self._s[~dead], self.conjugate)) if np.any(~dead) else 0.0

    def subgradient(self, v):
        v = self._check(v)
        y = self._scaled(v)
        total = self._pnorm(y, self.p)
        g = np.zeros_like(y)
        if total > 0:
            if self.p == 1.0:
                g = np.sign(y)
            elif math.isinf(self.p):
                j = int(np.argmax(np.abs(y)))
                g[j] = np.sign(y[j])
            else:
                g = np.sign(y) * (np.abs(y) / total) ** (self.p - 1.0)
        return g if self._s is None else g * self._s

    def is_norm(self) -> bool:
        return self.weights is None or bool(np.all(self.weights > 0))

    def is_strictly_convex(self) -> bool:
        if not self.is_norm():
            return False
        if self.dim == 1:
            return True
        return 1.0 < self.p < _INF

    def as_polygonal(self, dim=None):
        d = self.dim or dim
        if d is None:
            return None
        s = np.ones(d) if self._s is None else self._s
        if self.p == 1.0:
            return Polygonal(np.diag(s))
        if d == 1:
            return Polygonal(s.reshape(1, 1))
        if math.isinf(self.p) and d == 2:
            # max(|a|, |b|) = (|a + b| + |a - b|) / 2
            return Polygonal([[s[0] / 2, s[1] / 2], [s[0] / 2, -s[1] / 2]])
        return None

    def to_json(self):
        out = {"kind": "lp", "p": self.p}
        if self.weights is not None:
            out["weights"] = self.weights.tolist()
        return out


class Polygonal(Seminorm):
    """``v -> sum_i |<u_i, v>|`` over a finite list of dual generators ``u_i``."""

    kind = "polygonal"

    def __init__(self, generators):
        g = np.asarray(generators, dtype=float)
        if g.ndim != 2 or g.shape[1] == 0:
            raise DimError("polygonal generators must have shape (k, d) with d >= 1")
        if not np.all(np.isfinite(g)):
            raise ValueError("polygonal generators must be finite")
        g.setflags(write=False)
        self.generators = g
        self.dim = g.shape[1]

    def __repr__(self):
        return f"Polygonal({self.generators.tolist()!r})"

    def _eval(self, v):
        return np.sum(np.abs(v @ self.generators.T), axis=-1)

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.generators)) if len(self.generators) else 0

    def is_norm(self) -> bool:
        return self.rank == self.dim

    def is_strictly_convex(self) -> bool:
        # vacuous in dimension one: there are no independent pairs
        return self.dim == 1 and self.is_norm()

    def subgradient(self, v):
        v = self._check(v)
        return np.sign(self.generators @ v) @ self.generators

    def dual(self, eta) -> float:
        eta = self._check(eta)
        g = self.generators
        if self.dim == 1:
            c = float(np.sum(np.abs(g)))
            if c == 0:
                return 0.0 if eta[0] == 0 else _INF
            return abs(float(eta[0])) / c
        if self.dim != 2:
            raise DimError("dual of a polygonal seminorm is only implemented for d <= 2")
        rank = self.rank
        if rank == 0:
            return 0.0 if not np.any(eta) else _INF
        if rank == 1:
            u = g[np.argmax(np.linalg.norm(g, axis=1))]
            u = u / np.linalg.norm(u)
            c = float(np.sum(np.abs(g @ u)))
            off = abs(float(eta[0] * u[1] - eta[1] * u[0]))
            if off > 1e-12 * max(float(np.linalg.norm(eta)), 1e-300):
                return _INF
            return abs(float(eta @ u)) / c
        # the unit ball is a polygon whose vertices lie on the rays where
        # some <u_i, .> changes sign
        rays = np.stack([-g[:, 1], g[:, 0]], axis=1)
        rays = rays[np.linalg.norm(rays, axis=1) > 0]
        verts = rays / self._eval(rays)[:, None]
        return float(np.max(np.abs(verts @ eta)))

    def as_polygonal(self, dim=None):
        return self

    def to_json(self):
        return {"kind": "polygonal", "generators": self.generators.tolist()}


class SumOfCircles(Seminorm):
    """The norm ``sqrt(v1^2+v2^2) + sqrt(v1^2+v3^2) + sqrt(v2^2+v3^2)`` on R^3.

    Strictly convex, yet its natural zonal measure (three great-circle
    measures) has nowhere dense support.
    """

    kind = "sum_of_circles"
    dim = 3
    _PAIRS = ((0, 1), (0, 2), (1, 2))

    def __repr__(self):
        return "SumOfCircles()"

    def _eval(self, v):
        return sum(np.hypot(v[..., a], v[..., b]) for a, b in self._PAIRS)

    def subgradient(self, v):
        v = self._check(v)
        g = np.zeros(3)
        for a, b in self._PAIRS:
            r = math.hypot(v[a], v[b])
            if r > 0:
                g[a] += v[a] / r
                g[b] += v[b] / r
        return g

    def dual(self, eta) -> float:
        """Numerical dual norm: multistart maximisation of <eta, x>/|x| on the sphere."""
        eta = self._check(eta)
        if not np.any(eta):
            return 0.0
        dirs = sphere_directions(2000)
        ratio = dirs @ eta / self._eval(dirs)
        x0 = dirs[int(np.argmax(ratio))]
        res = minimize(lambda x: -float(x @ eta) / max(float(self._eval(x)), 1e-300), x0,
                       method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 4000})
        return float(max(-res.fun, ratio.max()))

    def is_strictly_convex(self) -> bool:
        return True

    def to_json(self):
        return {"kind": "sum_of_circles"}


def dual_eval(n: Seminorm, eta) -> float:
    return n.dual(eta)


def is_strictly_convex(n: Seminorm) -> bool:
    return n.is_strictly_convex()


def convexity_witness(n: Seminorm, trials: int = 10_000, margin: float = 1e-9,
                      seed: int = 0, dim: int | None = None):
    """Search for independent ``(v, w)`` with ``|v+w| >= (1 - margin)(|v|+|w|)``.

    Basis pairs are tried first, then random Gaussian pairs whose angle has
    sine at least 0.05 (nearly parallel pairs would make any norm look flat).
    Returns the first witness or ``None``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = n.dim or dim or 2
    if d == 1:
        return None
    rng = np.random.default_rng(seed)
    eye = np.eye(d)
    fixed = [(eye[i], eye[j]) for i in range(d) for j in range(i + 1, d)]
    fixed += [(eye[i] + eye[j], eye[i] - 0.5 * eye[j]) for i in range(d) for j in range(d) if i != j]

    def pairs():
        yield from fixed
        for _ in range(trials):
            yield rng.standard_normal(d), rng.standard_normal(d)

    for v, w in pairs():
        nv, nw = np.linalg.norm(v), np.linalg.norm(w)
        if nv == 0 or nw == 0:
            continue
        cos = float(v @ w) / (nv * nw)
        if 1.0 - cos * cos < 0.05 ** 2:
            continue
        a, b = n(v), n(w)
        if n(v + w) >= a + b - margin * (a + b):
            return v, w
    return None


def strict_convexity_probe(n: Seminorm, trials: int = 10_000, margin: float = 1e-9,
                           seed: int = 0, dim: int | None = None) -> bool:
    """Randomised cross-check of :func:`is_strictly_convex`; False iff a flat pair is found."""
    return convexity_witness(n, trials, margin, seed, dim) is None


class ZonalMeasure:
    """Finite nonnegative measure ``sum_j w_j delta_{eta_j}`` on the dual space.

    Normal form: each ``eta`` is flipped so that its last nonzero coordinate
    is positive (``|<-eta, v>| = |<eta, v>|``), zero atoms are dropped, exact
    duplicates are merged and atoms are sorted lexicographically. Directions
    and magnitudes are otherwise kept as given.
    """

    __slots__ = ("etas", "weights")

    def __init__(self, etas, weights=None):
        e = np.asarray(etas, dtype=float)
        if e.ndim != 2:
            raise DimError("zonal atoms must have shape (k, d)")
        w = np.ones(len(e)) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (len(e),):
            raise ValueError("one weight per atom is required")
        if np.any(w <= 0) or not np.all(np.isfinite(w)) or not np.all(np.isfinite(e)):
            raise ValueError("zonal weights must be finite and positive, atoms finite")
        merged: dict[tuple, float] = {}
        for eta, wt in zip(e, w):
            nz = np.flatnonzero(eta)
            if len(nz) == 0:
                continue
            if eta[nz[-1]] < 0:
                eta = -eta
            key = tuple((eta + 0.0).tolist())
            merged[key] = merged.get(key, 0.0) + float(wt)
        keys = sorted(merged)
        self.etas = np.array(keys, dtype=float).reshape(len(keys), e.shape[1])
        self.weights = np.array([merged[k] for k in keys])
        self.etas.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.etas.shape[1]

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f"ZonalMeasure({len(self)} atoms, dim={self.dim})"

    def __eq__(self, other):
        return (isinstance(other, ZonalMeasure) and self.etas.shape == other.etas.shape
                and np.array_equal(self.etas, other.etas) and np.array_equal(self.weights, other.weights))

    def induced_norm(self, v):
        """``sum_j w_j |<eta_j, v>|``, vectorised over leading axes."""
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.dim:
            raise DimError("dimension mismatch between zonal measure and vector")
        return _as_scalar(np.abs(v @ self.etas.T) @ self.weights)

    def as_seminorm(self) -> Polygonal:
        return Polygonal(self.etas * self.weights[:, None])

    def total_weight(self) -> float:
        return float(self.weights.sum())


def zonal_from_polygonal_2d(n: Seminorm) -> ZonalMeasure:
    """Exact zonal measure of a planar polygonal seminorm: its generators, weight one each."""
    if not isinstance(n, Polygonal):
        raise WrongKind(f"expected a polygonal seminorm, got {n.kind}")
    if n.dim != 2:
        raise DimError("zonal_from_polygonal_2d needs a planar seminorm")
    return ZonalMeasure(n.generators)


def _certify_grid(n_grid: int) -> np.ndarray:
    return circle_directions(n_grid, half=True)


def zonal_approx_2d(n: Seminorm, eps: float, max_doublings: int = 16) -> ZonalMeasure:
    """Zonal measure whose induced norm N satisfies (1 - eps) n <= N <= n.

    Samples boundary points of the dual unit ball at equally spaced angles,
    takes the inscribed centrally symmetric polygon, and reads it as the
    zonotope generated by half of its edges on one side. The number of
    samples doubles until the lower bound holds on a fine direction grid.
    Norms with an exact polygonal form are returned exactly.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n.dim not in (None, 2):
        raise DimError("zonal_approx_2d needs a planar norm")
    exact = n.as_polygonal(2)
    if exact is not None:
        return zonal_from_polygonal_2d(exact)
    if not n.is_norm():
        raise NotANorm("zonal approximation requires a norm")
    k = 8
    for _ in range(max_doublings):
        u = circle_directions(2 * k)
        radii = np.array([n.dual(x) for x in u])
        pts = u / radii[:, None]
        # pts[j + k] is -pts[j] up to rounding; the first half of the edges spans P
        edges = pts[1:k + 1] - pts[:k]
        keep = np.linalg.norm(edges, axis=1) > 0
        sigma = ZonalMeasure(edges[keep] / 2.0)
        grid = _certify_grid(max(3600, 32 * k))
        ratio = sigma.induced_norm(grid) / n(grid)
        if ratio.min() >= 1.0 - eps:
            return sigma
        k *= 2
    raise NoConvergence(f"zonal approximation did not reach eps={eps} with {k} samples")


#: analytic constants: integral of |<eta, e>| over the unit sphere is 4 (d=2), 2*pi (d=3)
EUCLIDEAN_ZONAL_KAPPA = {2: 0.25, 3: 1.0 / (2.0 * math.pi)}


def zonal_euclidean(dim: int, nodes: int) -> tuple[ZonalMeasure, float]:
    """Quadrature of the uniform sphere measure reproducing the Euclidean norm.

    d=2: midpoint rule in angle with arc-length weights times 1/4.
    d=3: equal-area latitude/longitude midpoint cells times 1/(2 pi).
    ``nodes`` counts nodes on the whole sphere. The integrand |<eta, v>| is
    even, so antipodal nodes are folded into one atom of doubled weight
    (exactly the same quadrature, half the atoms). Returns the measure and
    the constant kappa.
    """
    if dim not in EUCLIDEAN_ZONAL_KAPPA:
        raise DimError(f"Euclidean zonal quadrature is provided for d in (2, 3), got {dim}")
    if nodes < 4:
        raise ValueError("nodes must be >= 4")
    kappa = EUCLIDEAN_ZONAL_KAPPA[dim]
    if dim == 2:
        if nodes % 2:
            t = (np.arange(nodes) + 0.5) * (2.0 * math.pi / nodes)
            w = np.full(nodes, kappa * 2.0 * math.pi / nodes)
        else:
            half = nodes // 2
            t = (np.arange(half) + 0.5) * (math.pi / half)
            w = np.full(half, kappa * 4.0 * math.pi / nodes)
        etas = np.stack([np.cos(t), np.sin(t)], axis=1)
    else:
        # even band and longitude counts make the grid antipodally symmetric
        nz = max(2, 2 * round(math.sqrt(nodes / math.pi) / 2))
        nphi = max(4, 2 * round(nodes / nz / 2))
        z = -1.0 + (np.arange(nz // 2, nz) + 0.5) * (2.0 / nz)
        phi = (np.arange(nphi) + 0.5) * (2.0 * math.pi / nphi)
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        r = np.sqrt(1.0 - zz ** 2)
        etas = np.stack([r * np.cos(pp), r * np.sin(pp), zz], axis=-1).reshape(-1, 3)
        w = np.full(len(etas), kappa * 8.0 * math.pi / (nz * nphi))
    return ZonalMeasure(etas, w), kappa


@dataclass(frozen=True)
class ZonalReport:
    max_rel_error: float
    worst_direction: tuple
    grid: int
    tol: float
    passed: bool


def _direction_grid(dim: int, grid: int) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0]])
    if dim == 2:
        return circle_directions(grid, half=True)
    if dim == 3:
        return sphere_directions(grid)
    raise DimError(f"unsupported dimension {dim}")


def validate_zonal(n: Seminorm, sigma: ZonalMeasure, grid: int = 720, tol: float = 1e-12) -> ZonalReport:
    """Max relative error of the induced norm against ``n`` over a direction grid."""
    if n.dim is not None and n.dim != sigma.dim:
        raise DimError("seminorm and zonal measure live in different dimensions")
    dirs = _direction_grid(sigma.dim, grid)
    ref = np.asarray(n(dirs))
    got = np.asarray(sigma.induced_norm(dirs))
    err = np.abs(got - ref) / np.where(ref > 0, ref, 1.0)
    i = int(np.argmax(err))
    worst = float(err[i])
    return ZonalReport(worst, tuple(dirs[i].tolist()), len(dirs), tol, worst <= tol)


def zonal_equality_witness_2d(sigma: ZonalMeasure):
    """Independent ``(v, w)`` on which the induced norm is additive.

    Both vectors sit in one open sector cut out by the lines ``<eta_j, .> = 0``,
    so every ``<eta_j, v>`` and ``<eta_j, w>`` share a sign. Exists for every
    finitely supported planar ``sigma``.
    """
    if sigma.dim != 2:
        raise DimError("witness search is planar")
    if len(sigma) == 0:
        return np.array([1.0, 0.0]), np.array([0.0, 1.0])
    lines = np.sort(np.mod(np.arctan2(sigma.etas[:, 0], -sigma.etas[:, 1]), math.pi))
    lines = np.append(lines, lines[0] + math.pi)
    gaps = np.diff(lines)
    j = int(np.argmax(gaps))
    a, gap = lines[j], gaps[j]
    v = np.array([math.cos(a + gap / 3), math.sin(a + gap / 3)])
    w = np.array([math.cos(a + 2 * gap / 3), math.sin(a + 2 * gap / 3)])
    return v, w
