"""Finitely atomic vector measures ``mu = sum_i v_i delta_{x_i}`` on R^m with values in R^d."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimError, NoCertificate, TooManyAtoms
from .norms import Seminorm
from .zonotopes import Zonotope

#: largest atom count accepted by the partition oracle (Bell(10) = 115975)
ORACLE_MAX_ATOMS = 10


class VectorMeasure:
    """Immutable atomic vector measure in canonical form.

    Atoms sharing a site (exact coordinate equality, with -0.0 read as 0.0)
    are merged by adding their values; atoms whose value is exactly zero are
    dropped; atoms are sorted by site.
    """

    __slots__ = ("sites", "values", "space_dim", "dim")

    def __init__(self, sites, values, *, space_dim: int | None = None, dim: int | None = None):
        x = np.asarray(sites, dtype=float)
        v = np.asarray(values, dtype=float)
        if x.size == 0 and v.size == 0:
            if space_dim is None or dim is None:
                raise DimError("an empty measure needs explicit space_dim and dim")
            x, v = np.zeros((0, space_dim)), np.zeros((0, dim))
        if x.ndim != 2 or v.ndim != 2 or len(x) != len(v):
            raise DimError(f"sites and values must be (k, m) and (k, d) arrays, got {x.shape} and {v.shape}")
        if space_dim is not None and x.shape[1] != space_dim:
            raise DimError(f"sites must lie in R^{space_dim}")
        if dim is not None and v.shape[1] != dim:
            raise DimError(f"values must lie in R^{dim}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise ValueError("sites and values must be finite")
        m, d = x.shape[1], v.shape[1]
        merged: dict[tuple, np.ndarray] = {}
        for site, val in zip(x + 0.0, v):
            key = tuple(site.tolist())
            merged[key] = merged[key] + val if key in merged else val.copy()
        keys = sorted(k for k, val in merged.items() if np.any(val != 0))
        self.sites = np.array(keys, dtype=float).reshape(len(keys), m)
        self.values = np.array([merged[k] for k in keys], dtype=float).reshape(len(keys), d)
        self.sites.setflags(write=False)
        self.values.setflags(write=False)
        self.space_dim = m
        self.dim = d

    @classmethod
    def zero(cls, space_dim: int, dim: int) -> "VectorMeasure":
        return cls(np.zeros((0, space_dim)), np.zeros((0, dim)), space_dim=space_dim, dim=dim)

    @classmethod
    def dirac(cls, site, value) -> "VectorMeasure":
        return cls([np.atleast_1d(site)], [np.atleast_1d(value)])

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f"VectorMeasure({len(self)} atoms, space_dim={self.space_dim}, dim={self.dim})"

    def __eq__(self, other):
        return (isinstance(other, VectorMeasure) and self.space_dim == other.space_dim
                and self.dim == other.dim and np.array_equal(self.sites, other.sites)
                and np.array_equal(self.values, other.values))

    def __add__(self, other):
        return add(self, other)

    def __neg__(self):
        return scale(self, -1.0)

    def __sub__(self, other):
        return add(self, scale(other, -1.0))

    def __rmul__(self, lam):
        return scale(self, lam)

    def total(self, A: "MeasurableSet | None" = None) -> np.ndarray:
        """The vector mu(A)."""
        return self._values_in(A).sum(axis=0)

    def _values_in(self, A):
        if A is None:
            return self.values
        return self.values[A.contains(self.sites)]


@dataclass(frozen=True, eq=False)
class MeasurableSet:
    """All of X, a finite union of closed axis-aligned boxes, or an explicit site list."""

    kind: str = "all"
    boxes: tuple = ()
    sites: tuple = field(default=())

    @classmethod
    def all(cls):
        return cls("all")

    @classmethod
    def from_boxes(cls, boxes):
        out = []
        for lo, hi in boxes:
            lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
            if lo.shape != hi.shape or lo.ndim != 1:
                raise DimError("box corners must be vectors of equal length")
            out.append((tuple(lo.tolist()), tuple(hi.tolist())))
        return cls("boxes", boxes=tuple(out))

    @classmethod
    def from_sites(cls, sites):
        return cls("sites", sites=tuple(tuple((np.asarray(s, dtype=float) + 0.0).tolist()) for s in sites))

    def contains(self, points) -> np.ndarray:
        """Boolean membership mask for an ``(k, m)`` array of points."""
        pts = np.asarray(points, dtype=float)
        if self.kind == "all":
            return np.ones(len(pts), dtype=bool)
        if self.kind == "boxes":
            mask = np.zeros(len(pts), dtype=bool)
            for lo, hi in self.boxes:
                if len(lo) != pts.shape[1]:
                    raise DimError("box dimension differs from the base space dimension")
                mask |= np.all((pts >= np.array(lo)) & (pts <= np.array(hi)), axis=1)
            return mask
        wanted = set(self.sites)
        return np.array([tuple((p + 0.0).tolist()) in wanted for p in pts], dtype=bool)


ALL = MeasurableSet.all()


def _check_norm(mu: VectorMeasure, n: Seminorm):
    if n.dim is not None and n.dim != mu.dim:
        raise DimError(f"seminorm acts on R^{n.dim} but the measure takes values in R^{mu.dim}")


def total_variation(mu: VectorMeasure, n: Seminorm, A: MeasurableSet | None = None) -> float:
    """|mu|_n(A) = sum of n(v_i) over atoms in A.

    Splitting a partition block into its atoms never lowers the sum by the
    triangle inequality, so the singleton partition attains the supremum.
    """
    _check_norm(mu, n)
    vals = mu._values_in(A)
    if len(vals) == 0:
        return 0.0
    return math.fsum(np.asarray(n(vals)).tolist())


def tv_bruteforce_oracle(mu: VectorMeasure, n: Seminorm, A: MeasurableSet | None = None) -> float:
    """Maximise ``sum_E n(mu(E))`` over every set partition of the atoms in A.

    Exhaustive: dynamic programming over subsets, where the block holding the
    lowest remaining atom ranges over all subsets containing it. Each subset
    sum is evaluated with the seminorm directly; nothing assumes singleton
    optimality.
    """
    _check_norm(mu, n)
    vals = mu._values_in(A)
    k = len(vals)
    if k > ORACLE_MAX_ATOMS:
        raise TooManyAtoms(f"partition oracle accepts at most {ORACLE_MAX_ATOMS} atoms, got {k}")
    if k == 0:
        return 0.0
    full = 1 << k
    sums = np.zeros((full, mu.dim))
    for mask in range(1, full):
        low = (mask & -mask).bit_length() - 1
        sums[mask] = sums[mask & (mask - 1)] + vals[low]
    block = np.asarray(n(sums)).tolist()
    best = [0.0] * full
    for mask in range(1, full):
        low = mask & -mask
        rest = mask ^ low
        top = -1.0
        sub = rest
        while True:
            b = sub | low
            cand = block[b] + best[mask ^ b]
            if cand > top:
                top = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = top
    return best[full - 1]


def projected_variation(mu: VectorMeasure, eta, A: MeasurableSet | None = None) -> float:
    """Total variation of the signed measure <eta, mu> on A."""
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (mu.dim,):
        raise DimError(f"dual vector must lie in R^{mu.dim}")
    vals = mu._values_in(A)
    return math.fsum(np.abs(vals @ eta).tolist())


def range_of(mu: VectorMeasure, A: MeasurableSet | None = None) -> Zonotope:
    """range_A(mu) = {sum t_i v_i : 0 <= t_i <= 1, x_i in A}, a zonotope."""
    if mu.dim > 3:
        raise DimError("ranges are supported for d <= 3")
    return Zonotope(mu._values_in(A), dim=mu.dim)


def pushforward(mu: VectorMeasure, T) -> VectorMeasure:
    """T o mu for a linear map given as a (d', d) matrix."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    if T.ndim != 2 or T.shape[1] != mu.dim:
        raise DimError(f"linear map must have shape (d', {mu.dim}), got {T.shape}")
    return VectorMeasure(mu.sites, mu.values @ T.T, space_dim=mu.space_dim, dim=T.shape[0])


def add(mu: VectorMeasure, nu: VectorMeasure) -> VectorMeasure:
    if (mu.space_dim, mu.dim) != (nu.space_dim, nu.dim):
        raise DimError("measures must share space_dim and dim")
    return VectorMeasure(np.vstack([mu.sites, nu.sites]), np.vstack([mu.values, nu.values]),
                         space_dim=mu.space_dim, dim=mu.dim)


def scale(mu: VectorMeasure, lam: float) -> VectorMeasure:
    return VectorMeasure(mu.sites, float(lam) * mu.values, space_dim=mu.space_dim, dim=mu.dim)


def restrict(mu: VectorMeasure, A: MeasurableSet) -> VectorMeasure:
    mask = A.contains(mu.sites)
    return VectorMeasure(mu.sites[mask], mu.values[mask], space_dim=mu.space_dim, dim=mu.dim)


def dual_certificate(mu: VectorMeasure, n: Seminorm, A: MeasurableSet | None = None):
    """Per-atom dual vectors of unit dual norm attaining each atom's seminorm.

    Returns ``(etas, value)`` with ``value = sum <eta_i, v_i>``, which equals
    the total variation on A. Raises :class:`NoCertificate` for atoms in the
    kernel of ``n``.
    """
    _check_norm(mu, n)
    vals = mu._values_in(A)
    etas = np.zeros_like(vals)
    for i, v in enumerate(vals):
        if n(v) == 0.0:
            raise NoCertificate(f"atom {i} with value {v.tolist()} lies in the kernel of the seminorm")
        etas[i] = n.subgradient(v)
    return etas, math.fsum(np.einsum("ij,ij->i", etas, vals).tolist())
