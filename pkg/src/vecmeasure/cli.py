"""Command-line front end.

Exit codes: 0 success / all checks passed, 1 a verification failed,
2 bad input (parse errors, dimension mismatches, unknown names).
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

from . import convergence, schema, suites
from .errors import InputError, VecMeasureError
from .geometry import hausdorff_distance
from .measures import ORACLE_MAX_ATOMS, range_of, total_variation, tv_bruteforce_oracle
from .norms import (
    EUCLIDEAN_ZONAL_KAPPA,
    Euclidean,
    Lp,
    SumOfCircles,
    validate_zonal,
    zonal_approx_2d,
    zonal_euclidean,
    zonal_from_polygonal_2d,
)
from .zonotopes import perimeter

_SHORTHAND = re.compile(r"^(?:l|lp:?)(\d+(?:\.\d+)?|inf)$")


def parse_norm_arg(text: str | None):
    """--norm accepts JSON, a JSON file, or euclidean / l1 / l4 / linf / lp:3.5 / sum_of_circles."""
    if text is None:
        return Euclidean()
    t = text.strip()
    if t in ("euclidean", "l2"):
        return Euclidean()
    if t == "sum_of_circles":
        return SumOfCircles()
    m = _SHORTHAND.match(t)
    if m:
        return Lp(math.inf if m.group(1) == "inf" else float(m.group(1)))
    return schema.parse_norm(t)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _print_real(x: float):
    print(repr(float(x)))


def cmd_tv(args) -> int:
    mu = schema.parse_measure(args.measure)
    n = parse_norm_arg(args.norm)
    A = schema.parse_set(args.set, mu.space_dim) if args.set else None
    tv = total_variation(mu, n, A)
    _print_real(tv)
    if args.oracle:
        k = len(mu._values_in(A))
        if k > ORACLE_MAX_ATOMS:
            print(f"oracle skipped: {k} atoms exceeds {ORACLE_MAX_ATOMS}", file=sys.stderr)
        else:
            oracle = tv_bruteforce_oracle(mu, n, A)
            print(f"oracle {oracle!r}")
            print(f"gap {abs(tv - oracle)!r}")
    return 0


def cmd_range(args) -> int:
    mu = schema.parse_measure(args.measure)
    A = schema.parse_set(args.set, mu.space_dim) if args.set else None
    z = range_of(mu, A)
    out = {"dim": z.dim, "offset": z.offset.tolist(), "generators": z.generators.tolist()}
    if z.dim == 2:
        out["vertices"] = z.polygon().vertices.tolist()
    _emit(schema.dumps(out), args.out)
    return 0


def cmd_perimeter(args) -> int:
    _print_real(perimeter(schema.parse_body(args.body), parse_norm_arg(args.norm)))
    return 0


def cmd_zonal(args) -> int:
    n = parse_norm_arg(args.norm)
    dim = args.dim or n.dim or 2
    out: dict = {}
    if isinstance(n, Euclidean):
        sigma, kappa = zonal_euclidean(dim, args.nodes)
        out.update(method="quadrature", nodes=args.nodes, kappa=kappa)
        if dim == 2:
            out["kappa_reference"] = EUCLIDEAN_ZONAL_KAPPA[2]
    elif dim == 2 and n.as_polygonal(2) is not None:
        sigma = zonal_from_polygonal_2d(n.as_polygonal(2))
        out["method"] = "exact"
    elif dim == 2:
        sigma = zonal_approx_2d(n, args.eps)
        out.update(method="dual-ball polygon", eps=args.eps)
    else:
        raise InputError(f"no zonal construction for {n!r} in dimension {dim}")
    if dim == 2:
        rep = validate_zonal(n, sigma)
        out.update(max_rel_error=rep.max_rel_error, validation_grid=rep.grid)
    out.update(schema.zonal_to_json(sigma))
    _emit(schema.dumps(out), args.out)
    return 0


def cmd_hausdorff(args) -> int:
    _print_real(hausdorff_distance(schema.parse_body(args.a, "a"), schema.parse_body(args.b, "b")))
    return 0


def cmd_scenario(args) -> int:
    norm = parse_norm_arg(args.norm) if args.norm else None
    if args.builtin:
        if args.scenario:
            raise InputError("give either a scenario file or --builtin, not both")
        spec = {"builtin": args.builtin, "N": args.N}
    elif args.scenario:
        spec = args.scenario
    else:
        raise InputError("a scenario file or --builtin NAME is required")
    s = schema.parse_scenario(spec, norm)
    rep = convergence.run_diagnostics(s, directions=args.directions, window=args.window, tol=args.tol)
    if args.format == "csv":
        _emit(schema.rows_to_csv(rep.rows()), args.out)
    else:
        _emit(schema.dumps(rep.to_json()), args.out)
    print(" ".join(f"{k}={v}" for k, v in rep.verdict.items()), file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    norm = parse_norm_arg(args.norm) if args.norm else None
    report = suites.run_suite(args.suite, seed=args.seed, trials=args.trials, tol=args.tol, norm=norm)
    _emit(schema.dumps(report), args.out)
    status = "PASS" if report["passed"] else "FAIL"
    print(f"{status} {report['suite']}: {report['trials'] - report['failures']}/{report['trials']} trials, "
          f"max error {report['max_error']:.3e}", file=sys.stderr)
    return 0 if report["passed"] else 1


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_real(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vecmeasure", description="Total variation and range of atomic vector measures.")
    sub = p.add_subparsers(dest="command", required=True)
    norm_help = "JSON, JSON file, or euclidean|l1|l4|linf|lp:P|sum_of_circles (default euclidean)"

    s = sub.add_parser("tv", help="total variation of a measure")
    s.add_argument("measure")
    s.add_argument("--norm", help=norm_help)
    s.add_argument("--set", help="measurable set JSON")
    s.add_argument("--oracle", action="store_true", help="also run the partition oracle")
    s.set_defaults(func=cmd_tv)

    s = sub.add_parser("range", help="range of a measure as a zonotope")
    s.add_argument("measure")
    s.add_argument("--set")
    s.add_argument("--out")
    s.set_defaults(func=cmd_range)

    s = sub.add_parser("perimeter", help="anisotropic perimeter of a polygon or of a measure's range")
    s.add_argument("body")
    s.add_argument("--norm", help=norm_help)
    s.set_defaults(func=cmd_perimeter)

    s = sub.add_parser("zonal", help="zonal measure representing a norm")
    s.add_argument("--norm", help=norm_help)
    s.add_argument("--eps", type=_positive_real, default=1e-3, help="relative accuracy for approximated norms")
    s.add_argument("--nodes", type=_positive_int, default=10_000, help="quadrature nodes for the Euclidean norm")
    s.add_argument("--dim", type=int, choices=(2, 3))
    s.add_argument("--out")
    s.set_defaults(func=cmd_zonal)

    s = sub.add_parser("hausdorff", help="Hausdorff distance of two planar bodies")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_hausdorff)

    s = sub.add_parser("scenario", help="convergence diagnostics for a sequence of measures")
    s.add_argument("scenario", nargs="?")
    s.add_argument("--builtin", choices=convergence.BUILTIN_SCENARIOS)
    s.add_argument("--N", type=_positive_int, default=100)
    s.add_argument("--norm", help=norm_help)
    s.add_argument("--directions", type=_positive_int, default=convergence.DEFAULT_DIRECTIONS)
    s.add_argument("--window", type=_positive_int)
    s.add_argument("--tol", type=_positive_real, default=1e-9)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_scenario)

    s = sub.add_parser("verify", help="run a randomized verification suite")
    s.add_argument("suite", choices=list(suites.SUITES))
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--trials", type=_positive_int)
    s.add_argument("--tol", type=_positive_real)
    s.add_argument("--norm", help=norm_help)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VecMeasureError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        sys.stderr.close()
        return 0
