"""Command-line entry point ``cdforge``.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 I/O or corrupt data.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time
from pathlib import Path

from cdforge.analysis import DisconnectedDomainError, graph_stats, subset_size_distribution, verify_record
from cdforge.baselines import AnnealConfig, hill_climb, simulated_annealing
from cdforge.core import build_domain
from cdforge.io import ParseError, RunManifest, emit_domain_file, emit_trs_file, parse_domain_file, parse_trs_file
from cdforge.lookup import DbFormatError, LookupDb, alphabet_fingerprint, build_db, load_db, save_db
from cdforge.repro import TABLES, repro
from cdforge.search import DEFAULT_STAGE2_WIDTH, BeamConfig, SearchResult, beam_search, parse_weights, staged_search

logger = logging.getLogger("cdforge")

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _k_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    try:
        return list(range(int(lo), int(hi) + 1)) if sep else [int(lo)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected K or LO..HI, got {text!r}") from None


def _load_or_build_db(path: str | None) -> LookupDb:
    path = path or os.environ.get("CDFORGE_DB")
    if path:
        return load_db(path)
    logger.info("no database given (--db or CDFORGE_DB); building one in memory")
    return build_db()


def _finish_manifest(args, manifest: RunManifest, started: float) -> None:
    manifest.wall_time = round(time.perf_counter() - started, 3)
    if args.manifest:
        manifest.write(args.manifest)


def cmd_build_db(args) -> int:
    started = time.perf_counter()
    db = build_db()
    save_db(db, args.out)
    manifest = RunManifest("build-db", {"out": str(args.out)}, db_fingerprint=alphabet_fingerprint().hex())
    manifest.record_output(args.out)
    _finish_manifest(args, manifest, started)
    print(f"wrote {args.out} ({sum(len(level) for level in db.levels)} entries)")
    return EXIT_OK


def _write_results(out: Path, result: SearchResult, n: int) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    best_trs = out / "best.trs"
    best_domain = out / "best.domain"
    sizes = out / "sizes.csv"
    emit_trs_file(result.best, best_trs)
    emit_domain_file(build_domain(n, result.best), best_domain)
    with sizes.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size", "count"])
        writer.writerows(result.size_counts.items())
    return [best_trs, best_domain, sizes]


def cmd_search(args) -> int:
    started = time.perf_counter()
    db = _load_or_build_db(args.db)
    weights = parse_weights(args.weights)
    if args.staged:
        if args.split_at is None:
            raise UsageError("--staged needs --split-at")
        cfg = BeamConfig(args.n, args.beam, weights, args.split_at, args.chunks, args.seed, args.stage1_beam)
        chunk_ids = None if args.chunk_id is None else [args.chunk_id]
        result = staged_search(cfg, db, chunk_ids=chunk_ids)
    else:
        cfg = BeamConfig(args.n, args.beam, weights, seed=args.seed)
        result = beam_search(cfg, db)
    out = Path(args.out)
    if args.chunk_id is not None:
        out = out / f"chunk_{args.chunk_id:05d}"
    if not result.domains:
        print("no domains found (empty chunk)")
        return EXIT_OK
    paths = _write_results(out, result, args.n)
    config = {k: v for k, v in vars(cfg).items()}
    config.update(staged=args.staged, chunk_id=args.chunk_id)
    manifest = RunManifest("search", config, args.seed, db_fingerprint=alphabet_fingerprint().hex(),
                           best_size=result.best_size)
    for path in paths:
        manifest.record_output(path)
    manifest.wall_time = round(time.perf_counter() - started, 3)
    manifest.write(out / "manifest.json")
    if args.manifest:
        manifest.write(args.manifest)
    print(f"best size {result.best_size}; {sum(result.size_counts.values())} distinct domains; "
          f"{result.elapsed:.2f}s; results in {out}")
    return EXIT_OK


def _domain_from_args(args):
    if args.domain:
        return parse_domain_file(args.domain)
    if args.trs:
        trs = parse_trs_file(args.trs)
        return build_domain(trs.n, trs)
    raise UsageError("give --domain or --trs")


def cmd_stats(args) -> int:
    started = time.perf_counter()
    domain = _domain_from_args(args)
    stats = graph_stats(domain)
    rows = [("size", stats.size), ("width", stats.width), ("radius", stats.radius),
            ("centre_points", stats.centre_count), ("isomorphic_domains", stats.isomorphic_count)]
    for name, value in rows:
        print(f"{name:<20}{value:>8}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([name for name, _ in rows])
            writer.writerow([value for _, value in rows])
    manifest = RunManifest("stats", {"domain": args.domain, "trs": args.trs})
    if args.csv:
        manifest.record_output(args.csv)
    _finish_manifest(args, manifest, started)
    return EXIT_OK


def cmd_subsets(args) -> int:
    started = time.perf_counter()
    domain = _domain_from_args(args)
    rows = []
    for k in args.k:
        dist = subset_size_distribution(domain, k)
        print(f"k={k}: " + ", ".join(f"{size}x{count}" for size, count in dist.items()))
        rows.extend((k, size, count) for size, count in dist.items())
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "size", "count"])
            writer.writerows(rows)
    manifest = RunManifest("subsets", {"domain": args.domain, "trs": args.trs, "k": args.k})
    _finish_manifest(args, manifest, started)
    return EXIT_OK


def cmd_verify(args) -> int:
    started = time.perf_counter()
    report = verify_record(args.trs, args.domain)
    print(f"built size {report.size}, listed size {report.listed_size}")
    print(f"size match: {report.size_match}; set match: {report.set_match}; unitary: {report.unitary}")
    for order in report.missing:
        print("listed but forbidden: " + "".join(map(str, order)))
    for order in report.extra:
        print("allowed but not listed: " + "".join(map(str, order)))
    manifest = RunManifest("verify", {"trs": args.trs, "domain": args.domain}, best_size=report.size)
    _finish_manifest(args, manifest, started)
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_baseline(args) -> int:
    started = time.perf_counter()
    if args.algo == "hc":
        trs, size = hill_climb(args.n, args.restarts, args.seed, budget_secs=args.budget_secs)
        config = {"algo": "hc", "n": args.n, "restarts": args.restarts}
    else:
        cfg = AnnealConfig(seed=args.seed, restarts=args.restarts, rule_alphabet=args.rules,
                           budget_secs=args.budget_secs)
        trs, size = simulated_annealing(args.n, cfg)
        config = {"algo": "sa", "n": args.n, **vars(cfg)}
    print(f"best size {size}")
    manifest = RunManifest("baseline", config, args.seed, best_size=size)
    if args.out:
        emit_trs_file(trs, args.out)
        manifest.record_output(args.out)
    _finish_manifest(args, manifest, started)
    return EXIT_OK


def cmd_repro(args) -> int:
    started = time.perf_counter()
    tables = args.tables or list(TABLES)
    failed = 0
    for table in tables:
        for check in repro(table, slow=args.slow):
            print(check.line())
            failed += not check.passed
    manifest = RunManifest("repro", {"tables": tables, "slow": args.slow})
    _finish_manifest(args, manifest, started)
    print(f"{'all checks passed' if not failed else f'{failed} check(s) failed'}")
    return EXIT_MISMATCH if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdforge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--manifest", help="also write a JSON run manifest here")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-db", parents=[common], help="build the 5-alternative lookup database")
    p.add_argument("--out", default="cd5.db")
    p.set_defaults(func=cmd_build_db)

    p = sub.add_parser("search", parents=[common], help="database-guided beam search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beam", type=int, default=DEFAULT_STAGE2_WIDTH, help="beam width (stage-2 width when staged)")
    p.add_argument("--weights", default="17:1,18:2,19:3,20:4")
    p.add_argument("--db", help="lookup database (default: $CDFORGE_DB, else built in memory)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results")
    p.add_argument("--staged", action="store_true")
    p.add_argument("--split-at", type=int)
    p.add_argument("--chunks", type=int, default=1)
    p.add_argument("--chunk-id", type=int)
    p.add_argument("--stage1-beam", type=int, help="stage-1 width (default: --beam)")
    p.set_defaults(func=cmd_search)

    for name, func, help_text in (("stats", cmd_stats, "median-graph statistics"),
                                  ("subsets", cmd_subsets, "restriction size distributions")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--domain")
        p.add_argument("--trs")
        p.add_argument("--csv")
        if name == "subsets":
            p.add_argument("--k", type=_k_range, required=True, help="K or LO..HI")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="compare a TRS's domain with a listed domain")
    p.add_argument("--trs", required=True)
    p.add_argument("--domain", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("baseline", parents=[common], help="hill climbing or simulated annealing")
    p.add_argument("--algo", choices=("hc", "sa"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--rules", type=int, choices=(4, 6), default=4)
    p.add_argument("--budget-secs", type=float)
    p.add_argument("--out", help="write the best TRS here")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("repro", parents=[common], help="re-check published tables")
    p.add_argument("tables", nargs="*", help=f"any of {', '.join(TABLES)} (default: all)")
    p.add_argument("--slow", action="store_true", help="include Fishburn n=12, 13")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, KeyError) as exc:
        print(f"cdforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, DbFormatError, OSError) as exc:
        print(f"cdforge: {exc}", file=sys.stderr)
        return EXIT_IO
    except DisconnectedDomainError as exc:
        print(f"cdforge: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except ValueError as exc:
        print(f"cdforge: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
