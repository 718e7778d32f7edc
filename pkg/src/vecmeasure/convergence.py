"""Diagnostics for wide, strict and range convergence of measure sequences.

A finite sequence can never prove a limit statement; every column here is
a diagnostic and every verdict a heuristic trend classification.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import DimError, UnknownScenario
from .measures import VectorMeasure, projected_variation, range_of, total_variation
from .norms import Seminorm
from .zonotopes import Zonotope

CONVERGING = "converging"
NOT_CONVERGING = "not-converging"
INCONCLUSIVE = "inconclusive"

#: directions used for projected variations and for sampled Hausdorff bounds
DEFAULT_DIRECTIONS = 64
SPHERE_SAMPLES = 2000


@dataclass
class Scenario:
    name: str
    sequence: list[VectorMeasure]
    limit: VectorMeasure
    norm: Seminorm
    anchor: np.ndarray | None = None

    def __post_init__(self):
        if not self.sequence:
            raise ValueError("a scenario needs at least one term")
        shape = (self.limit.space_dim, self.limit.dim)
        for i, mu in enumerate(self.sequence, start=1):
            if (mu.space_dim, mu.dim) != shape:
                raise DimError(f"term {i} has (space_dim, dim) = {(mu.space_dim, mu.dim)}, limit has {shape}")
        if self.norm.dim is not None and self.norm.dim != self.limit.dim:
            raise DimError("scenario norm and measures live in different dimensions")


def _hat_centers(lo, hi, h):
    axes = [np.arange(a, b + 0.5 * h, h) for a, b in zip(lo, hi)]
    return np.array(list(itertools.product(*axes)))


def hat_dictionary(limit: VectorMeasure, resolution: float, anchor=None, margin: float = 1.0):
    """Centers of the hat test functions: a grid at spacing ``resolution`` over
    the bounding box of the limit's sites and ``anchor`` (default origin),
    widened by ``margin``, plus one center at each limit atom. The box is
    fixed independently of the sequence, so mass escaping to infinity is
    invisible to it, as it should be."""
    m = limit.space_dim
    pts = [np.zeros(m) if anchor is None else np.asarray(anchor, dtype=float)]
    pts.extend(limit.sites)
    pts = np.array(pts)
    lo, hi = pts.min(axis=0) - margin, pts.max(axis=0) + margin
    return np.vstack([_hat_centers(lo, hi, resolution), limit.sites])


def _hats(centers, h, sites):
    # tensor-product hat: prod_k max(0, 1 - |x_k - c_k| / h)
    if len(sites) == 0:
        return np.zeros((len(centers), 0))
    diff = np.abs(centers[:, None, :] - sites[None, :, :]) / h
    return np.prod(np.maximum(0.0, 1.0 - diff), axis=2)


def wide_proxy(mu_n: VectorMeasure, mu: VectorMeasure, resolution: float = 0.25,
               anchor=None, centers=None) -> float:
    """max over a finite hat dictionary of |int phi dmu_n - int phi dmu|.

    A probe, not a certificate: C_c cannot be exhausted by finitely many
    test functions.
    """
    if (mu_n.space_dim, mu_n.dim) != (mu.space_dim, mu.dim):
        raise DimError("measures must share space_dim and dim")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    c = hat_dictionary(mu, resolution, anchor) if centers is None else centers
    diff = _hats(c, resolution, mu_n.sites) @ mu_n.values - _hats(c, resolution, mu.sites) @ mu.values
    return float(np.max(np.linalg.norm(diff, axis=1))) if len(diff) else 0.0


def dual_direction_grid(dim: int, count: int = DEFAULT_DIRECTIONS) -> np.ndarray:
    """Unit dual directions for projected variations (even in eta, so half a sphere)."""
    if dim == 1:
        return np.array([[1.0]])
    if dim == 2:
        return geometry.circle_directions(count, half=True)
    if dim == 3:
        d = geometry.sphere_directions(2 * count)
        return d[d[:, 2] >= 0][:count]
    raise DimError(f"unsupported dimension {dim}")


def range_distance(a: Zonotope, b: Zonotope, directed: bool = False) -> float:
    """(Directed) Hausdorff distance between ranges.

    Exact for d <= 2. For d = 3 this is the direction-sampled lower bound
    max_u (h_a(u) - h_b(u)) over a Fibonacci sphere.
    """
    if a.dim != b.dim:
        raise DimError("ranges in different dimensions")
    if a.dim == 2:
        return (geometry.directed_hausdorff(a, b) if directed else geometry.hausdorff_distance(a, b))
    u = geometry.unit_directions(a.dim, SPHERE_SAMPLES)
    diff = np.asarray(a.support(u)) - np.asarray(b.support(u))
    if directed:
        return float(max(0.0, diff.max()))
    return float(np.abs(diff).max())


@dataclass
class DiagnosticsReport:
    scenario: str
    n: list[int]
    wide_proxy: list[float]
    mass_n: list[float]
    mass_limit: float
    mass_gap: list[float]
    range_dH: list[float]
    range_lsc_deficiency: list[float]
    directions: np.ndarray
    projected_gaps: np.ndarray  # (N, n_directions)
    range_exact: bool = True
    verdict: dict = field(default_factory=dict)

    @property
    def projected_gap_max(self) -> list[float]:
        return self.projected_gaps.max(axis=1).tolist()

    def column(self, name: str) -> list[float]:
        if name == "projected_gap_max":
            return self.projected_gap_max
        return getattr(self, name)

    def rows(self):
        for i, n in enumerate(self.n):
            row = {
                "n": n,
                "wide_proxy": self.wide_proxy[i],
                "mass_n": self.mass_n[i],
                "mass_gap": self.mass_gap[i],
                "range_dH": self.range_dH[i],
                "range_lsc_deficiency": self.range_lsc_deficiency[i],
                "projected_gap_max": float(self.projected_gaps[i].max()),
            }
            for k, g in enumerate(self.projected_gaps[i]):
                row[f"proj_gap_{k:02d}"] = float(g)
            yield row

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "mass_limit": self.mass_limit,
            "range_metric": "exact" if self.range_exact else "sampled-lower-bound",
            "wide_metric": "proxy",
            "directions": self.directions.tolist(),
            "verdicts": dict(self.verdict),
            "rows": list(self.rows()),
        }


def run_diagnostics(s: Scenario, directions: int = DEFAULT_DIRECTIONS, resolution: float = 0.25,
                    window: int | None = None, tol: float = 1e-9) -> DiagnosticsReport:
    lim = s.limit
    centers = hat_dictionary(lim, resolution, s.anchor)
    etas = dual_direction_grid(lim.dim, directions)
    lim_range = range_of(lim)
    lim_mass = total_variation(lim, s.norm)
    lim_proj = np.array([projected_variation(lim, e) for e in etas])
    rows = {k: [] for k in ("wide", "mass", "gap", "dh", "lsc")}
    proj = []
    for mu in s.sequence:
        r = range_of(mu)
        m = total_variation(mu, s.norm)
        rows["wide"].append(wide_proxy(mu, lim, resolution, centers=centers))
        rows["mass"].append(m)
        rows["gap"].append(abs(m - lim_mass))
        rows["dh"].append(range_distance(r, lim_range))
        rows["lsc"].append(range_distance(lim_range, r, directed=True))
        proj.append(np.abs(np.array([projected_variation(mu, e) for e in etas]) - lim_proj))
    report = DiagnosticsReport(
        scenario=s.name, n=list(range(1, len(s.sequence) + 1)), wide_proxy=rows["wide"],
        mass_n=rows["mass"], mass_limit=lim_mass, mass_gap=rows["gap"], range_dH=rows["dh"],
        range_lsc_deficiency=rows["lsc"], directions=etas, projected_gaps=np.array(proj),
        range_exact=lim.dim <= 2,
    )
    report.verdict = verdicts(report, window, tol)
    return report


def classify(column, window: int | None = None, tol: float = 1e-9) -> str:
    """Trend rule on the last ``window`` values (default: the whole column).

    converging: all values <= tol, or non-increasing with first/last >= 10.
    not-converging: min > tol and (max - min) / max < 0.1.
    Otherwise inconclusive.
    """
    col = [float(x) for x in column]
    if window is not None:
        if window < 1 or window > len(col):
            raise ValueError("window must lie in [1, N]")
        col = col[-window:]
    if max(col) <= tol:
        return CONVERGING
    if all(b <= a for a, b in zip(col, col[1:])) and (col[-1] == 0 or col[0] / col[-1] >= 10):
        return CONVERGING
    lo, hi = min(col), max(col)
    if lo > tol and (hi - lo) / hi < 0.1:
        return NOT_CONVERGING
    return INCONCLUSIVE


def verdicts(report: DiagnosticsReport, window: int | None = None, tol: float = 1e-9) -> dict:
    """Verdicts for wide, strict and range convergence, plus the projected-gap criterion."""
    return {
        "wide": classify(report.wide_proxy, window, tol),
        "strict": classify(report.mass_gap, window, tol),
        "range": classify(report.range_dH, window, tol),
        "projected": classify(report.projected_gap_max, window, tol),
    }


BUILTIN_SCENARIOS = ("dirac_split", "aligned_merge", "cancelling_pair", "mass_escape")


def builtin_scenario(name: str, params: dict | None = None, N: int = 100,
                     norm: Seminorm | None = None) -> Scenario:
    """Reference sequences.

    dirac_split      v d_x + w d_{x+u/n}  ->  (v+w) d_x
    aligned_merge    v d_x + v d_{x+u/n}  ->  2v d_x
    cancelling_pair  v d_x - v d_{x+u/n}  ->  0
    mass_escape      v d_{n u}            ->  0

    Defaults: v = e1, w = e2 in R^2, x = 0 and u = e1 in R^1.
    """
    from .norms import Euclidean

    if name not in BUILTIN_SCENARIOS:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {', '.join(BUILTIN_SCENARIOS)}")
    if N < 1:
        raise ValueError("N must be >= 1")
    p = dict(params or {})
    v = np.asarray(p.pop("v", [1.0, 0.0]), dtype=float)
    w = np.asarray(p.pop("w", np.eye(len(v))[1 % len(v)]), dtype=float)
    x = np.atleast_1d(np.asarray(p.pop("x", [0.0]), dtype=float))
    u = np.asarray(p.pop("u", np.eye(len(x))[0]), dtype=float)
    if p:
        raise ValueError(f"unknown scenario parameters: {sorted(p)}")
    if w.shape != v.shape or u.shape != x.shape:
        raise DimError("v/w and x/u must have matching dimensions")
    m, d = len(x), len(v)
    seq = []
    for n in range(1, N + 1):
        if name == "dirac_split":
            seq.append(VectorMeasure([x, x + u / n], [v, w]))
        elif name == "aligned_merge":
            seq.append(VectorMeasure([x, x + u / n], [v, v]))
        elif name == "cancelling_pair":
            seq.append(VectorMeasure([x, x + u / n], [v, -v]))
        else:
            seq.append(VectorMeasure([n * u], [v]))
    if name == "dirac_split":
        limit = VectorMeasure([x], [v + w])
    elif name == "aligned_merge":
        limit = VectorMeasure([x], [2 * v])
    else:
        limit = VectorMeasure.zero(m, d)
    return Scenario(name, seq, limit, norm or Euclidean(), anchor=x)


def perturbed_scenario(rng: np.random.Generator, N: int = 100, atoms: int = 4, dim: int = 2,
                       space_dim: int = 1, norm: Seminorm | None = None) -> Scenario:
    """Random sequence converging strictly to a random atomic limit.

    Each limit atom v at x becomes (1 + c/n) v at x + b/n with c in [0.1, 1],
    and one atom is additionally split into aligned pieces s v at x and
    (1 - s) v at x + b'/n. Values move by O(1/n) along their own direction,
    so ranges, masses and projected masses all converge at rate 1/n.
    """
    from .norms import Euclidean

    x = rng.uniform(-1, 1, size=(atoms, space_dim))
    v = rng.standard_normal((atoms, dim))
    c = rng.uniform(0.1, 1.0, size=atoms)
    b = rng.uniform(-1, 1, size=(atoms, space_dim))
    s = rng.uniform(0.2, 0.8)
    b_split = rng.uniform(-1, 1, size=space_dim)
    seq = []
    for n in range(1, N + 1):
        vals = (1.0 + c / n)[:, None] * v
        sites = x + b / n
        seq.append(VectorMeasure(np.vstack([sites, x[:1] + b_split / n]),
                                 np.vstack([vals[:1] * s, vals[1:], vals[:1] * (1 - s)])))
    return Scenario("perturbed", seq, VectorMeasure(x, v), norm or Euclidean(), anchor=x.mean(axis=0))


def mass_lsc_holds(report: DiagnosticsReport, window: int | None = None, tol: float = 1e-9) -> bool:
    """|mu|(X) <= min of the tail masses + tol."""
    tail = report.mass_n[-window:] if window else report.mass_n
    return report.mass_limit <= min(tail) + tol * max(1.0, report.mass_limit)
