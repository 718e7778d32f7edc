"""JSON input schemas and deterministic JSON/CSV output."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError
from .geometry import ConvexPolygon
from .measures import MeasurableSet, VectorMeasure
from .norms import Euclidean, Lp, Polygonal, Seminorm, SumOfCircles, ZonalMeasure


def load_json(source, what: str = "input"):
    """Parse a path, an inline JSON string, or an already-decoded object."""
    if not isinstance(source, (str, Path)):
        return source
    text = str(source)
    origin = "inline"
    if not text.lstrip().startswith(("{", "[")):
        path = Path(text)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None
        origin = str(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} ({origin}): invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _fields(obj, where: str, required: set, optional: set = frozenset()):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    unknown = set(obj) - required - set(optional)
    if unknown:
        raise InputError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise InputError(f"{where}: missing field(s) {sorted(missing)}")


def _number(x, where: str) -> float:
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return math.inf
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _vector(x, where: str, length: int | None = None) -> list[float]:
    if not isinstance(x, list):
        raise InputError(f"{where}: expected an array of numbers")
    out = [_number(c, f"{where}[{i}]") for i, c in enumerate(x)]
    if any(not math.isfinite(c) for c in out):
        raise InputError(f"{where}: entries must be finite")
    if length is not None and len(out) != length:
        raise InputError(f"{where}: expected length {length}, got {len(out)}")
    return out


def _matrix(x, where: str, cols: int | None = None) -> list[list[float]]:
    if not isinstance(x, list):
        raise InputError(f"{where}: expected an array of arrays")
    rows = [_vector(r, f"{where}[{i}]", cols) for i, r in enumerate(x)]
    if rows and len({len(r) for r in rows}) != 1:
        raise InputError(f"{where}: rows have different lengths")
    return rows


def parse_norm(obj, where: str = "norm") -> Seminorm:
    obj = load_json(obj, "norm")
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError(f"{where}: expected an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "euclidean":
        _fields(obj, where, {"kind"})
        return Euclidean()
    if kind == "lp":
        _fields(obj, where, {"kind", "p"}, {"weights"})
        p = _number(obj["p"], f"{where}.p")
        weights = _vector(obj["weights"], f"{where}.weights") if "weights" in obj else None
        try:
            return Lp(p, weights)
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from None
    if kind == "polygonal":
        _fields(obj, where, {"kind", "generators"})
        gens = _matrix(obj["generators"], f"{where}.generators")
        if not gens:
            raise InputError(f"{where}.generators: at least one generator is needed to fix the dimension")
        return Polygonal(gens)
    if kind == "sum_of_circles":
        _fields(obj, where, {"kind"})
        return SumOfCircles()
    raise InputError(f"{where}.kind: unknown norm kind {kind!r}")


def parse_measure(obj, where: str = "measure") -> VectorMeasure:
    obj = load_json(obj, "measure")
    _fields(obj, where, {"space_dim", "dim", "atoms"})
    m, d = obj["space_dim"], obj["dim"]
    for key, val in (("space_dim", m), ("dim", d)):
        if isinstance(val, bool) or not isinstance(val, int) or val < 1:
            raise InputError(f"{where}.{key}: expected a positive integer")
    if not isinstance(obj["atoms"], list):
        raise InputError(f"{where}.atoms: expected an array")
    sites, values = [], []
    for i, atom in enumerate(obj["atoms"]):
        loc = f"{where}.atoms[{i}]"
        _fields(atom, loc, {"x", "v"})
        sites.append(_vector(atom["x"], f"{loc}.x", m))
        values.append(_vector(atom["v"], f"{loc}.v", d))
    if not sites:
        return VectorMeasure.zero(m, d)
    return VectorMeasure(sites, values, space_dim=m, dim=d)


def measure_to_json(mu: VectorMeasure) -> dict:
    return {"space_dim": mu.space_dim, "dim": mu.dim,
            "atoms": [{"x": x.tolist(), "v": v.tolist()} for x, v in zip(mu.sites, mu.values)]}


def parse_set(obj, space_dim: int | None = None, where: str = "set") -> MeasurableSet:
    obj = load_json(obj, "set")
    if not isinstance(obj, dict) or len(obj) != 1:
        raise InputError(f"{where}: expected exactly one of 'all', 'boxes', 'sites'")
    (key, val), = obj.items()
    if key == "all":
        if val is not True:
            raise InputError(f"{where}.all: must be true")
        return MeasurableSet.all()
    if key == "boxes":
        if not isinstance(val, list):
            raise InputError(f"{where}.boxes: expected an array")
        boxes = []
        for i, box in enumerate(val):
            loc = f"{where}.boxes[{i}]"
            _fields(box, loc, {"lo", "hi"})
            boxes.append((_vector(box["lo"], f"{loc}.lo", space_dim), _vector(box["hi"], f"{loc}.hi", space_dim)))
        return MeasurableSet.from_boxes(boxes)
    if key == "sites":
        return MeasurableSet.from_sites(_matrix(val, f"{where}.sites", space_dim))
    raise InputError(f"{where}: unknown field {key!r}")


def zonal_to_json(sigma: ZonalMeasure) -> dict:
    return {"dim": sigma.dim,
            "atoms": [{"eta": e.tolist(), "weight": float(w)} for e, w in zip(sigma.etas, sigma.weights)]}


def parse_zonal(obj, where: str = "zonal") -> ZonalMeasure:
    obj = load_json(obj, "zonal measure")
    _fields(obj, where, {"dim", "atoms"})
    etas, weights = [], []
    for i, atom in enumerate(obj["atoms"]):
        loc = f"{where}.atoms[{i}]"
        _fields(atom, loc, {"eta", "weight"})
        etas.append(_vector(atom["eta"], f"{loc}.eta", obj["dim"]))
        weights.append(_number(atom["weight"], f"{loc}.weight"))
    try:
        return ZonalMeasure(np.array(etas).reshape(len(etas), obj["dim"]), weights)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_body(obj, where: str = "body"):
    """A planar convex body: ``{"vertices": [...]}`` (hull is taken) or a measure (its range)."""
    from .measures import range_of

    obj = load_json(obj, "body")
    if isinstance(obj, dict) and "vertices" in obj:
        _fields(obj, where, {"vertices"})
        pts = _matrix(obj["vertices"], f"{where}.vertices", 2)
        if not pts:
            raise InputError(f"{where}.vertices: empty body")
        return ConvexPolygon.hull(pts)
    return range_of(parse_measure(obj, where))


# --- output -----------------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits; exact round trip for IEEE doubles."""
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + ",".join(pad + _encode(v, indent, level + 1) for v in obj) + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (pad + json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items())
        return "{" + ",".join(items) + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON with floats written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def rows_to_csv(rows) -> str:
    rows = list(rows)
    if not rows:
        return ""
    cols = list(rows[0])
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(
            format_float(r[c]).strip('"') if isinstance(r[c], float) else str(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


def scenario_to_json(s) -> dict:
    return {"name": s.name, "norm": s.norm.to_json(),
            "anchor": None if s.anchor is None else np.asarray(s.anchor, dtype=float).tolist(),
            "sequence": [measure_to_json(m) for m in s.sequence], "limit": measure_to_json(s.limit)}


def parse_scenario(obj, norm: Seminorm | None = None, where: str = "scenario"):
    """Explicit ``{"name"?, "sequence", "limit", "norm"?, "anchor"?}`` or
    ``{"builtin", "params"?, "N"?, "norm"?}``. An explicit ``norm`` argument wins."""
    from .convergence import Scenario, builtin_scenario
    from .errors import DimError, UnknownScenario

    obj = load_json(obj, "scenario")
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    if norm is None and "norm" in obj:
        norm = parse_norm(obj["norm"], f"{where}.norm")
    if "builtin" in obj:
        _fields(obj, where, {"builtin"}, {"params", "N", "norm"})
        N = obj.get("N", 100)
        if isinstance(N, bool) or not isinstance(N, int) or N < 1:
            raise InputError(f"{where}.N: expected a positive integer")
        params = obj.get("params") or {}
        if not isinstance(params, dict):
            raise InputError(f"{where}.params: expected an object")
        try:
            return builtin_scenario(obj["builtin"], params, N, norm)
        except UnknownScenario as exc:
            raise InputError(f"{where}.builtin: {exc.args[0]}") from None
        except (ValueError, DimError) as exc:
            raise InputError(f"{where}.params: {exc}") from None
    _fields(obj, where, {"sequence", "limit"}, {"name", "norm", "anchor"})
    if not isinstance(obj["sequence"], list) or not obj["sequence"]:
        raise InputError(f"{where}.sequence: expected a non-empty array of measures")
    seq = [parse_measure(m, f"{where}.sequence[{i}]") for i, m in enumerate(obj["sequence"])]
    limit = parse_measure(obj["limit"], f"{where}.limit")
    anchor = obj.get("anchor")
    if anchor is not None:
        anchor = _vector(anchor, f"{where}.anchor", limit.space_dim)
    from .norms import Euclidean

    try:
        return Scenario(str(obj.get("name", "custom")), seq, limit, norm or Euclidean(), anchor)
    except DimError as exc:
        raise InputError(f"{where}: {exc}") from None
