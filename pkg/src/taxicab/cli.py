"""Command-line front end.  Every result is one JSON object per line on stdout.

Exit status: 0 success, 2 usage, 3 arithmetic overflow, 4 resource budget,
5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

from .cache import ENV_CACHE_DIR, cache_load, cache_path, cache_store, cached_count_row
from .errors import (
    ArithmeticOverflowError,
    CacheError,
    CertificationError,
    ConfigurationError,
    DomainError,
    FitError,
    ResourceBudgetError,
)
from .grid_reporting import (
    EXPONENTIAL,
    PUBLISHED_CURVES,
    ROOT_AFFINE,
    build_grid,
    complement_from_grid,
    emit_csv,
    emit_pbm,
    extract_boundary,
    fit,
    parse_range,
    residual_of,
)
from .partition_core import PartitionQuery, count, count_row
from .taxicab_solver import (
    PROVED_ABSENT,
    ABSENT_UP_TO,
    BoundPolicy,
    ColumnScanner,
    DEFAULT_DESK_LIMIT,
    certify_tail_increment,
    certify_tail_nonexistence,
    classify_column,
    mi_sequence,
    taxicab,
)
from .square_representability import EMPIRICAL, search_bound_squares
from .verification import FAIL, run_suite

log = logging.getLogger("taxicab")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ARITHMETIC = 3
EXIT_RESOURCE = 4
EXIT_VERIFY = 5

DEFAULT_CONSTANT = 150


@dataclass
class RunConfig:
    command: str
    workers: int = 1
    memory_budget: int = 2 * 1024**3
    cache_dir: Optional[str] = None
    cap: Optional[int] = None
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigurationError("--workers must be >= 1")
        if self.memory_budget <= 0:
            raise ConfigurationError("--memory-budget must be positive")

    def check_cap(self, m_max: int) -> None:
        if self.cap is not None and self.cap <= m_max:
            raise ConfigurationError(f"--cap {self.cap} must exceed every m in the run (max m = {m_max})")


def emit(record: dict, out=None) -> None:
    print(json.dumps(record), file=out or sys.stdout, flush=True)


def _config(args) -> RunConfig:
    outputs = {k: v for k, v in vars(args).items() if k.startswith("out_") and v}
    return RunConfig(args.command, args.workers, int(args.memory_budget * 1024**2),
                     args.cache_dir or os.environ.get(ENV_CACHE_DIR), args.cap, outputs)


def _policy(args, k: int) -> BoundPolicy:
    if args.policy == "fixed":
        if args.bound is None:
            raise ConfigurationError("--policy fixed needs --bound")
        return BoundPolicy("fixed", fixed=args.bound)
    if args.policy == "conjectural" or (args.policy == "auto" and k != 2):
        return BoundPolicy("conjectural", _constant(args))
    return BoundPolicy("certified")


def _constant(args) -> int:
    if args.conjectural_constant is None:
        log.warning("conjectural bound uses the default constant %d; results are empirical", DEFAULT_CONSTANT)
        return DEFAULT_CONSTANT
    return args.conjectural_constant


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def run_count(args, cfg: RunConfig) -> int:
    mu = None if args.max_part is None else args.max_part
    q = PartitionQuery(args.k, args.n, args.j, mu)
    emit({"k": q.k, "n": q.n, "j": q.j, "mu": q.mu, "count": count(q, cap=cfg.cap)})
    return EXIT_OK


def _auto_bound(args) -> tuple[int, str]:
    if args.k == 2 and args.j >= 5 and args.m >= 2:
        return search_bound_squares(args.m, args.j, allow_extended=True), "certified-formula"
    c = _constant(args)
    return (args.m * args.j + args.j + c) ** args.k, f"conjectural(C={c})"


def run_taxicab(args, cfg: RunConfig) -> int:
    cfg.check_cap(args.m)
    if args.bound == "auto":
        bound, policy = _auto_bound(args)
    else:
        try:
            bound, policy = int(args.bound), "fixed"
        except ValueError:
            raise ConfigurationError(f"--bound must be 'auto' or an integer, got {args.bound!r}") from None
    table = None
    if cfg.cache_dir and args.j != 2 and not args.at_least:
        table = cached_count_row(cfg.cache_dir, args.k, args.j, bound, cfg.cap or args.m + 1, cfg.memory_budget)
    out = taxicab(args.k, args.j, args.m, bound, at_least=args.at_least, cap=cfg.cap,
                  memory_budget=cfg.memory_budget, table=table)
    record = out.as_record()
    if record["status"] == PROVED_ABSENT and args.k != 2:
        # only squares have a proven ceiling
        record["status"], record["provenance"] = ABSENT_UP_TO, EMPIRICAL
    record["bound_policy"] = policy
    record["variant"] = "at-least" if args.at_least else "exact"
    emit(record)
    return EXIT_OK


def run_decide(args, cfg: RunConfig) -> int:
    args.k, args.bound, args.at_least = 2, "auto", False
    if args.j < 5 or args.m < 2:
        raise ConfigurationError("decide needs j >= 5 and m >= 2 (the certified ceiling)")
    return run_taxicab(args, cfg)


def run_certify(args, cfg: RunConfig) -> int:
    if args.kind == "increment":
        cert = certify_tail_increment(args.k, args.j, args.m, memory_budget=cfg.memory_budget)
    else:
        if args.k != 2:
            raise ConfigurationError("nonexistence certificates exist only for k = 2")
        cert = certify_tail_nonexistence(args.m, args.j, args.j_search, memory_budget=cfg.memory_budget)
    if cert is None:
        emit({"kind": args.kind, "k": args.k, "j": args.j, "m": args.m, "certificate": None})
        return EXIT_VERIFY
    if args.out_record:
        with open(args.out_record, "w") as fh:
            fh.write(cert.to_record())
    emit({"kind": cert.kind, "k": cert.k, "m": cert.m, "j_start": cert.j_start, "n0": cert.n0,
          "j_cert": cert.j_cert, "t": cert.t, "provenance": cert.provenance,
          "bounds": cert.bounds, "checks": cert.checks})
    return EXIT_OK


def run_verify(args, cfg: RunConfig) -> int:
    failed = False
    for result in run_suite(args.budget, cfg.memory_budget, args.only):
        emit(result.as_record())
        failed |= result.status == FAIL
    return EXIT_VERIFY if failed else EXIT_OK


def _scanner(args, cfg: RunConfig, m_max: int, j_max: int) -> ColumnScanner:
    cfg.check_cap(m_max)
    return ColumnScanner(args.k, m_max, j_max, _policy(args, args.k), cfg.memory_budget, args.n_limit)


def run_grid(args, cfg: RunConfig) -> int:
    j_range, m_range = parse_range(args.j), parse_range(args.m)
    scanner = _scanner(args, cfg, m_range[1], j_range[1])
    grid = build_grid(args.k, j_range, m_range, workers=cfg.workers, scanner=scanner)
    if args.out_pbm:
        emit_pbm(grid, args.out_pbm, args.undetermined)
        emit({"artifact": "pbm", "path": args.out_pbm, "width": len(grid.js), "height": len(grid.ms)})
    if args.out_csv:
        emit_csv(grid, args.out_csv)
        emit({"artifact": "csv", "path": args.out_csv, "rows": len(grid.cells)})
    undetermined = sorted(m for (j, m), c in grid.cells.items() if c.status == "undetermined")
    emit({"k": args.k, "j": list(j_range), "m": list(m_range),
          "complement": complement_from_grid(grid), "undetermined_m": sorted(set(undetermined))})
    return EXIT_OK


def run_sequence(args, cfg: RunConfig) -> int:
    scanner = _scanner(args, cfg, args.m_limit, args.j_limit)
    seq = mi_sequence(args.k, args.m_limit, args.j_limit, workers=cfg.workers, scanner=scanner)
    if args.out_csv:
        emit_csv(seq, args.out_csv)
        emit({"artifact": "csv", "path": args.out_csv, "rows": len(seq.columns)})
    if args.out_boundary:
        grid = build_grid(args.k, (1, args.j_limit), (1, args.m_limit), workers=cfg.workers, scanner=scanner)
        cols = [classify_column(args.k, m, args.j_limit, scanner=scanner) for m in range(1, args.m_limit + 1)]
        emit_csv(extract_boundary(grid, cols), args.out_boundary)
        emit({"artifact": "boundary-csv", "path": args.out_boundary, "rows": args.m_limit})
    emit({"k": seq.k, "m_limit": args.m_limit, "j_limit": args.j_limit, "members": seq.members,
          "complement": seq.complement, "undetermined": seq.undetermined})
    return EXIT_OK


def read_points(path) -> tuple[list[float], list[float]]:
    """Two numeric columns; headers x,y or m,J are recognised, otherwise the first two."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FitError(f"{path}: empty")
    head = [h.strip() for h in rows[0]]
    cols = (0, 1)
    body = rows
    try:
        float(head[0])
    except (ValueError, IndexError):
        body = rows[1:]
        for xn, yn in (("x", "y"), ("m", "J")):
            if xn in head and yn in head:
                cols = (head.index(xn), head.index(yn))
    try:
        xs = [float(r[cols[0]]) for r in body if r]
        ys = [float(r[cols[1]]) for r in body if r]
    except (ValueError, IndexError):
        raise FitError(f"{path}: non-numeric or short row") from None
    return xs, ys


def run_fit(args, cfg: RunConfig) -> int:
    xs, ys = read_points(args.input)
    family = EXPONENTIAL if args.family == "exp" else ROOT_AFFINE
    result = fit(xs, ys, family, args.root)
    record = {"family": result.family, "a": result.a, "b": result.b, "r": result.r,
              "residual": result.residual, "points": len(xs)}
    if args.compare:
        fam, a, b, r = PUBLISHED_CURVES[args.compare]
        record["compare"] = {"name": args.compare, "residual": residual_of(fam, a, b, xs, ys, r)}
    emit(record)
    return EXIT_OK


def run_cache(args, cfg: RunConfig) -> int:
    if args.action == "build":
        table = count_row(args.k, args.j_max, args.n_max, cfg.cap, cfg.memory_budget)
        path = args.path or cache_path(cfg.cache_dir or ".", args.k, args.j_max, args.n_max, cfg.cap)
        cache_store(path, table)
        emit({"artifact": "cache", "path": str(path), "k": table.k, "j_max": table.j_max,
              "n_max": table.n_max, "cap": table.cap})
        return EXIT_OK
    try:
        table = cache_load(args.path, -1 if args.expect_cap is None else args.expect_cap)
    except CacheError as exc:
        emit({"path": args.path, "valid": False, "reason": str(exc)})
        return EXIT_VERIFY
    fresh = count_row(table.k, table.j_max, table.n_max, table.cap, cfg.memory_budget) if args.rebuild else None
    record = {"path": args.path, "valid": True, "k": table.k, "j_max": table.j_max,
              "n_max": table.n_max, "cap": table.cap}
    if fresh is not None:
        record["matches_rebuild"] = fresh == table
    emit(record)
    return EXIT_OK if record.get("matches_rebuild", True) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _bounds_flags(p) -> None:
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--policy", choices=["auto", "certified", "conjectural", "fixed"], default="auto")
    p.add_argument("--bound", type=int, default=None, help="bound for --policy fixed")
    p.add_argument("--conjectural-constant", type=int, default=None)
    p.add_argument("--n-limit", type=int, default=DEFAULT_DESK_LIMIT,
                   help="largest n tabulated under a non-certified policy")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--memory-budget", type=float, default=2048, help="MiB per table")
    common.add_argument("--cache-dir", default=None, help=f"defaults to ${ENV_CACHE_DIR}")
    common.add_argument("--cap", type=int, default=None, help="saturating cap (must exceed every m)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="taxicab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="p^k(n, j) or p^k(n, j, mu)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--max-part", type=int, default=None)
    p.set_defaults(func=run_count)

    p = sub.add_parser("taxicab", parents=[common], help="least n with exactly m representations")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bound", default="auto")
    p.add_argument("--conjectural-constant", type=int, default=None)
    p.add_argument("--at-least", action="store_true", help="least n with at least m representations")
    p.set_defaults(func=run_taxicab)

    p = sub.add_parser("decide", parents=[common], help="settle Taxicab(2, j, m) at the certified ceiling")
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=run_decide, conjectural_constant=None)

    p = sub.add_parser("certify", parents=[common], help="tail certificate for a column")
    p.add_argument("--kind", choices=["increment", "nonexistence"], required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--j", type=int, required=True, help="first j the tail should cover")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--j-search", type=int, default=64)
    p.add_argument("--out-record", default=None)
    p.set_defaults(func=run_certify)

    p = sub.add_parser("verify", parents=[common], help="reproduce published values")
    p.add_argument("--suite", choices=["oeis"], default="oeis")
    p.add_argument("--budget", choices=["desk", "full"], default="desk")
    p.add_argument("--only", nargs="*", default=None, help="check names to run")
    p.set_defaults(func=run_verify)

    p = sub.add_parser("grid", parents=[common], help="existence grid over (j, m)")
    _bounds_flags(p)
    p.add_argument("--j", required=True, help="a..b")
    p.add_argument("--m", required=True, help="a..b")
    p.add_argument("--out-pbm", default=None)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--undetermined", choices=["white", "black"], default=None)
    p.set_defaults(func=run_grid)

    p = sub.add_parser("sequence", parents=[common], help="classify columns m = 1..m_limit")
    _bounds_flags(p)
    p.add_argument("--m-limit", type=int, required=True)
    p.add_argument("--j-limit", type=int, default=40)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-boundary", default=None)
    p.set_defaults(func=run_sequence)

    p = sub.add_parser("fit", parents=[common], help="least-squares boundary fit")
    p.add_argument("--family", choices=["exp", "root"], required=True)
    p.add_argument("--root", type=float, default=None)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--compare", choices=sorted(PUBLISHED_CURVES), default=None)
    p.set_defaults(func=run_fit)

    p = sub.add_parser("cache", parents=[common], help="build or check a table cache file")
    p.add_argument("action", choices=["build", "check"])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--j-max", type=int, default=8)
    p.add_argument("--n-max", type=int, default=1000)
    p.add_argument("--path", default=None)
    p.add_argument("--expect-cap", type=int, default=None)
    p.add_argument("--rebuild", action="store_true", help="compare against a fresh build")
    p.set_defaults(func=run_cache)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        if args.command == "fit" and args.family == "root" and args.root is None:
            raise ConfigurationError("--family root needs --root")
        if args.command == "cache" and args.action == "check" and not args.path:
            raise ConfigurationError("cache check needs --path")
        return args.func(args, cfg)
    except (ConfigurationError, DomainError, FitError) as exc:
        print(f"taxicab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithmeticOverflowError as exc:
        print(f"taxicab: arithmetic overflow: {exc}", file=sys.stderr)
        return EXIT_ARITHMETIC
    except ResourceBudgetError as exc:
        print(f"taxicab: resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (CertificationError, CacheError) as exc:
        print(f"taxicab: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(f"taxicab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
