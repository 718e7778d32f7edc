"""Seeded randomized verification suites.

Trial ``i`` of a run with seed ``s`` draws from
``numpy.random.Generator(PCG64(SeedSequence(s).spawn(trials)[i]))``, so every
trial is reproducible on its own and results do not depend on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import convergence as conv
from .errors import InputError
from .geometry import hausdorff_distance, unit_directions
from .measures import (
    MeasurableSet,
    VectorMeasure,
    add,
    pushforward,
    range_of,
    total_variation,
    tv_bruteforce_oracle,
)
from .norms import Euclidean, Lp, Polygonal, Seminorm, ZonalMeasure, zonal_euclidean, zonal_from_polygonal_2d
from .schema import measure_to_json, scenario_to_json, zonal_to_json
from .zonotopes import (
    Zonotope,
    contains_2d,
    crofton_perimeter,
    mass_perimeter_identity_check,
    perimeter,
)
from .geometry import ConvexPolygon

RNG_ALGORITHM = "numpy PCG64, streams from SeedSequence(seed).spawn(trials)"
THREADS_ENV = "VECMEASURE_THREADS"
EUCLIDEAN_QUADRATURE_NODES = 10_000


@dataclass
class Trial:
    passed: bool
    error: float
    instance: dict
    notes: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class Suite:
    name: str
    invariant: str
    default_tol: float
    default_trials: int
    run: Callable[[np.random.Generator, float, Seminorm | None], Trial]


# --- random instances ----------------------------------------------------------

def random_measure(rng: np.random.Generator, atoms: int, dim: int, space_dim: int = 1,
                   parallel_share: float = 0.2) -> VectorMeasure:
    """Gaussian values at distinct uniform sites; some values are multiples of earlier ones."""
    vals = rng.standard_normal((atoms, dim))
    for i in range(1, atoms):
        if rng.random() < parallel_share:
            vals[i] = rng.uniform(-2, 2) * vals[rng.integers(i)]
    sites = rng.uniform(-1, 1, size=(atoms, space_dim))
    return VectorMeasure(sites, vals, space_dim=space_dim, dim=dim)


def random_polygonal(rng: np.random.Generator, dim: int, max_gens: int = 6) -> Polygonal:
    return Polygonal(rng.standard_normal((int(rng.integers(1, max_gens + 1)), dim)))


def random_lp(rng: np.random.Generator, dim: int) -> Lp:
    p = float(rng.choice([1.0, 1.5, 2.0, 3.0, 4.0, math.inf]))
    weights = rng.uniform(0.5, 2.0, size=dim) if rng.random() < 0.5 else None
    return Lp(p, weights)


def random_norm(rng: np.random.Generator, dim: int, family: str | None = None) -> Seminorm:
    family = family or str(rng.choice(["euclidean", "lp", "polygonal"]))
    if family == "euclidean":
        return Euclidean()
    if family == "lp":
        return random_lp(rng, dim)
    return random_polygonal(rng, dim)


def _rel(a: float, b: float) -> float:
    gap = abs(a - b)
    scale = max(abs(a), abs(b))
    return gap / scale if scale > 0 else gap


def _inst(**kw) -> dict:
    out = {}
    for k, v in kw.items():
        if isinstance(v, VectorMeasure):
            v = measure_to_json(v)
        elif isinstance(v, Seminorm):
            v = v.to_json()
        elif isinstance(v, ZonalMeasure):
            v = zonal_to_json(v)
        elif isinstance(v, np.ndarray):
            v = v.tolist()
        out[k] = v
    return out


def _check_norm_dim(norm: Seminorm | None, dim: int):
    if norm is not None and norm.dim not in (None, dim):
        raise InputError(f"this suite needs a norm on R^{dim}, got one on R^{norm.dim}")


# --- suites --------------------------------------------------------------------

def _tv_oracle(rng, tol, norm):
    dim = norm.dim if norm is not None and norm.dim else int(rng.integers(1, 4))
    n = norm or random_norm(rng, dim)
    mu = random_measure(rng, int(rng.integers(0, 9)), dim)
    tv, oracle = total_variation(mu, n), tv_bruteforce_oracle(mu, n)
    err = _rel(tv, oracle)
    return Trial(err <= tol, err, _inst(measure=mu, norm=n, total_variation=tv, oracle=oracle))


_PERIMETER_FAMILIES = ("euclidean", "l1", "l4", "polygonal")


def _perimeter_identity(rng, tol, norm):
    _check_norm_dim(norm, 2)
    if norm is None:
        fam = str(rng.choice(_PERIMETER_FAMILIES))
        norm = {"euclidean": Euclidean(), "l1": Lp(1), "l4": Lp(4)}.get(fam) or random_polygonal(rng, 2)
    mu = random_measure(rng, int(rng.integers(1, 51)), 2)
    rep = mass_perimeter_identity_check(mu, norm)
    gens = range_of(mu).generators
    lemma = 2.0 * math.fsum(np.asarray(norm(gens)).tolist()) if len(gens) else 0.0
    per = perimeter(range_of(mu), norm)
    lemma_err = _rel(per, lemma)
    err = max(rep.rel_gap, lemma_err)
    return Trial(err <= tol, err, _inst(measure=mu, norm=norm, total_variation=rep.total_variation,
                                        half_perimeter=rep.half_perimeter, lemma_rel_gap=lemma_err))


_EUCLIDEAN_SIGMA: dict[int, ZonalMeasure] = {}


def _exact_sigma(norm: Seminorm) -> ZonalMeasure:
    if isinstance(norm, Euclidean):
        if 2 not in _EUCLIDEAN_SIGMA:
            _EUCLIDEAN_SIGMA[2] = zonal_euclidean(2, EUCLIDEAN_QUADRATURE_NODES)[0]
        return _EUCLIDEAN_SIGMA[2]
    if norm.as_polygonal(2) is None:
        raise InputError(f"{norm!r} has no finite zonal representation; use euclidean, lp with p in {{1, inf}}, "
                         "or polygonal")
    return zonal_from_polygonal_2d(norm.as_polygonal(2))


def _zonal_identity(rng, tol, norm):
    if norm is not None:
        _check_norm_dim(norm, 2)
        sigma, dim = _exact_sigma(norm), 2
    elif rng.random() < 0.5:
        norm = random_polygonal(rng, 2)
        sigma, dim = zonal_from_polygonal_2d(norm), 2
    else:
        dim = int(rng.integers(1, 4))
        k = int(rng.integers(1, 7))
        sigma = ZonalMeasure(rng.standard_normal((k, dim)), rng.uniform(0.1, 2.0, size=k))
        norm = sigma.as_seminorm()
    mu = random_measure(rng, int(rng.integers(1, 21)), dim)
    tv = total_variation(mu, norm)
    proj = np.abs(mu.values @ sigma.etas.T)  # (atoms, directions)
    rep = math.fsum((proj * sigma.weights).ravel().tolist())
    err = _rel(tv, rep)
    return Trial(err <= tol, err, _inst(measure=mu, norm=norm, sigma=sigma, total_variation=tv, representation=rep))


def _random_body(rng):
    if rng.random() < 0.5:
        return ConvexPolygon.hull(rng.standard_normal((int(rng.integers(3, 16)), 2)))
    return Zonotope(rng.standard_normal((int(rng.integers(1, 9)), 2)), rng.standard_normal(2))


def _crofton(rng, tol, norm):
    _check_norm_dim(norm, 2)
    if norm is None:
        norm = random_polygonal(rng, 2)
    sigma = _exact_sigma(norm)
    body = _random_body(rng)
    per = perimeter(body, sigma.as_seminorm())
    cro = crofton_perimeter(body, sigma)
    err = _rel(per, cro)
    return Trial(err <= tol, err, _inst(vertices=body.polygon().vertices, norm=norm, sigma=sigma,
                                        perimeter=per, crofton=cro))


def contained_pair(rng, atoms: int) -> tuple[VectorMeasure, VectorMeasure, str]:
    """(mu, nu) with range(nu) inside range(mu) by construction."""
    mu = random_measure(rng, atoms, 2)
    if rng.random() < 0.5:
        t = rng.uniform(0, 1, size=len(mu))
        t[rng.random(len(mu)) < 0.2] = 1.0
        return mu, VectorMeasure(mu.sites, t[:, None] * mu.values, space_dim=1, dim=2), "scaled"
    groups = rng.integers(0, max(1, len(mu) // 2), size=len(mu))
    keep = rng.random(len(mu)) < 0.8
    sites = np.array([[float(g)] for g in groups[keep]]).reshape(-1, 1)
    return mu, VectorMeasure(sites, mu.values[keep], space_dim=1, dim=2), "grouped"


def _monotonicity(rng, tol, norm):
    _check_norm_dim(norm, 2)
    n = norm or random_norm(rng, 2)
    strict = n.is_strictly_convex()
    pairs = [contained_pair(rng, int(rng.integers(1, 13)))]
    a, b = random_measure(rng, int(rng.integers(1, 7)), 2), random_measure(rng, int(rng.integers(1, 7)), 2)
    if contains_2d(range_of(a), range_of(b)):
        pairs.append((a, b, "independent"))
    elif contains_2d(range_of(b), range_of(a)):
        pairs.append((b, a, "independent"))
    err, ok, notes = 0.0, True, []
    for mu, nu, how in pairs:
        t_mu, t_nu = total_variation(mu, n), total_variation(nu, n)
        excess = t_nu - t_mu
        err = max(err, excess)
        if excess > tol:
            ok = False
            notes.append(f"{how}: TV(nu) exceeds TV(mu) by {excess:.3e}")
        if strict and hausdorff_distance(range_of(mu).polygon(), range_of(nu).polygon()) > 1e-6 and not t_nu < t_mu:
            ok = False
            notes.append(f"{how}: ranges differ but TV gap is {t_mu - t_nu:.3e}")
    return Trial(ok, err, _inst(norm=n, pairs=[{"mu": measure_to_json(m), "nu": measure_to_json(v), "kind": k}
                                               for m, v, k in pairs]), notes)


def _continuity_bound(rng, tol, norm):
    dim = int(rng.integers(1, 3))
    mu = random_measure(rng, int(rng.integers(1, 11)), dim)
    bump = rng.standard_normal(mu.values.shape) * float(rng.choice([1e-6, 1e-2, 1.0]))
    nu = VectorMeasure(mu.sites, mu.values + bump, space_dim=1, dim=dim)
    dh = conv.range_distance(range_of(nu), range_of(mu))
    bound = total_variation(nu - mu, Euclidean())
    excess = dh - bound
    return Trial(excess <= tol, max(excess, 0.0), _inst(mu=mu, nu=nu, hausdorff=dh, bound=bound))


def _support_gap(h1, h2) -> float:
    return float(np.max(np.abs(np.asarray(h1) - np.asarray(h2)))) if np.size(h1) else 0.0


def _split_atom(mu: VectorMeasure, i: int, rng) -> VectorMeasure:
    fresh = mu.sites.max(axis=0) + 1.0 + rng.random(mu.space_dim)
    sites = np.vstack([np.delete(mu.sites, i, axis=0), mu.sites[i:i + 1], fresh[None]])
    vals = np.vstack([np.delete(mu.values, i, axis=0), 0.5 * mu.values[i:i + 1], 0.5 * mu.values[i:i + 1]])
    return VectorMeasure(sites, vals, space_dim=mu.space_dim, dim=mu.dim)


def same_range_variants(mu: VectorMeasure, rng) -> dict[str, VectorMeasure]:
    """Measures with the same range as mu: split an atom, permute sites, merge a parallel pair."""
    out = {}
    k = len(mu)
    if k == 0:
        return out
    out["split"] = _split_atom(mu, int(rng.integers(k)), rng)
    perm = rng.permutation(k)
    out["permute"] = VectorMeasure(mu.sites[perm], mu.values, space_dim=mu.space_dim, dim=mu.dim)
    g = mu.values
    # merge two atoms whose values point the same way: [0, a] + [0, b] = [0, a + b]
    for i in range(k):
        for j in range(i + 1, k):
            parallel = np.linalg.matrix_rank(np.vstack([g[i], g[j]]), tol=1e-12 * np.abs(g).max()) == 1
            if parallel and g[i] @ g[j] > 0:
                vals = np.vstack([np.delete(g, [i, j], axis=0), (g[i] + g[j])[None]])
                out["merge"] = VectorMeasure(np.arange(len(vals), dtype=float)[:, None], vals, space_dim=1,
                                             dim=mu.dim)
                return out
    return out


def _range_laws(rng, tol, norm):
    dim = int(rng.integers(1, 4))
    n = norm if norm is not None and norm.dim in (None, dim) else random_norm(rng, dim)
    mu = random_measure(rng, int(rng.integers(1, 13)), dim)
    nu = VectorMeasure(np.vstack([mu.sites[: len(mu) // 2], rng.uniform(-1, 1, (3, 1))]),
                       rng.standard_normal((len(mu) // 2 + 3, dim)), space_dim=1, dim=dim)
    U = unit_directions(dim, 64)
    z = range_of(mu)
    errs: dict[str, float] = {}
    errs["symmetry"] = _support_gap(z.support(U) - U @ mu.total(), z.support(-U))
    errs["sublinearity"] = max(0.0, float(np.max(range_of(mu + nu).support(U) - z.support(U)
                                                  - range_of(nu).support(U))))
    mask = rng.random(len(mu)) < 0.5
    A = MeasurableSet.from_sites(mu.sites[mask])
    B = MeasurableSet.from_sites(mu.sites[~mask])
    errs["additivity"] = _support_gap(z.support(U), range_of(mu, A).support(U) + range_of(mu, B).support(U))
    d2 = int(rng.integers(1, 4))
    T = rng.standard_normal((d2, dim))
    V = unit_directions(d2, 64)
    errs["pushforward"] = _support_gap(range_of(pushforward(mu, T)).support(V), z.support(V @ T))
    if dim == 1:
        errs["tv_equals_diameter"] = abs(total_variation(mu, Euclidean()) - (z.support([1.0]) + z.support([-1.0])))
    base = total_variation(mu, n)
    for name, alt in same_range_variants(mu, rng).items():
        errs[f"invariance_{name}"] = _rel(total_variation(alt, n), base)
        errs[f"invariance_{name}_range"] = _support_gap(range_of(alt).support(U), z.support(U))
    scale = max(1.0, total_variation(mu, Euclidean()) + total_variation(nu, Euclidean()))
    bad = [k for k, e in errs.items() if e > (tol if k.startswith("invariance") and not k.endswith("range")
                                             else tol * scale)]
    return Trial(not bad, max(errs.values()), _inst(measure=mu, other=nu, norm=n, pushforward=T,
                                                   errors=errs), bad)


def _convergence_theorems(rng, tol, norm):
    n = norm or Euclidean()
    dim = n.dim or 2
    s = conv.perturbed_scenario(rng, N=100, atoms=int(rng.integers(2, 6)), dim=dim, norm=n)
    rep = conv.run_diagnostics(s, tol=tol)
    v = rep.verdict
    bad = []
    if v["projected"] != v["range"]:
        bad.append(f"projected verdict {v['projected']} differs from range verdict {v['range']}")
    if v["range"] == conv.CONVERGING and v["strict"] != conv.CONVERGING:
        bad.append("range converges but mass does not")
    if n.is_strictly_convex() and v["strict"] != v["range"]:
        bad.append(f"strictly convex norm but strict={v['strict']} and range={v['range']}")
    if v["wide"] == conv.CONVERGING and not conv.mass_lsc_holds(rep, tol=tol):
        bad.append("mass lower semicontinuity violated")
    return Trial(not bad, float(len(bad)), _inst(scenario=scenario_to_json(s), verdicts=dict(v)), bad)


SUITES: dict[str, Suite] = {s.name: s for s in (
    Suite("tv-oracle", "total_variation equals the partition oracle", 1e-12, 500, _tv_oracle),
    Suite("perimeter-identity", "TV = half perimeter of the range; zonotope perimeter = 2 sum |g|", 1e-9, 500,
          _perimeter_identity),
    Suite("zonal-identity", "TV = sum_j w_j |<eta_j, mu>| for the zonal measure of the norm", 1e-12, 500,
          _zonal_identity),
    Suite("crofton", "perimeter = 2 sum_j w_j width_{eta_j}", 1e-12, 500, _crofton),
    Suite("monotonicity", "range(nu) in range(mu) implies TV(nu) <= TV(mu), strictly for strictly convex norms",
          1e-12, 500, _monotonicity),
    Suite("continuity-bound", "d_H(range nu, range mu) <= |nu - mu|(X)", 1e-12, 500, _continuity_bound),
    Suite("range-laws", "symmetry, sublinearity, additivity, pushforward, 1-D diameter, range determines TV",
          1e-9, 200, _range_laws),
    Suite("convergence-theorems", "range convergence implies strict; equivalence for strictly convex norms",
          1e-9, 20, _convergence_theorems),
)}


def _threads(trials: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    cap = os.cpu_count() or 1
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    return max(1, min(cap, trials))


def run_suite(name: str, seed: int = 0, trials: int | None = None, tol: float | None = None,
              norm: Seminorm | None = None) -> dict:
    """Run a suite and return a JSON-ready report ordered by trial index."""
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    suite = SUITES[name]
    trials = suite.default_trials if trials is None else trials
    tol = suite.default_tol if tol is None else tol
    if name == "zonal-identity" and isinstance(norm, Euclidean) and tol < 1e-5:
        tol = 1e-5  # quadrature with 10^4 nodes
    if not 0 <= seed < 2 ** 64:
        raise InputError("seed must be an unsigned 64-bit integer")
    if trials < 1:
        raise InputError("trials must be positive")
    if not tol > 0:
        raise InputError("tolerance must be positive")
    streams = np.random.SeedSequence(seed).spawn(trials)

    def one(i: int) -> Trial:
        return suite.run(np.random.Generator(np.random.PCG64(streams[i])), tol, norm)

    if name == "zonal-identity" and isinstance(norm, Euclidean):
        _exact_sigma(norm)  # build the shared quadrature before threads start
    workers = _threads(trials)
    if workers == 1:
        results = [one(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(trials)))
    failures = [i for i, r in enumerate(results) if not r.passed]
    return {
        "suite": name,
        "invariant": suite.invariant,
        "seed": seed,
        "trials": trials,
        "tol": tol,
        "norm": None if norm is None else norm.to_json(),
        "rng": RNG_ALGORITHM,
        "passed": not failures,
        "failures": len(failures),
        "max_error": max(r.error for r in results),
        "errors": [r.error for r in results],
        "counterexamples": [{"trial": i, "notes": results[i].notes, "instance": results[i].instance}
                            for i in failures],
    }
