"""Command-line front end.

Subcommands: count, sample, classify, gf, guess, catalog, bench.  Systems
come either from the built-in catalog (--system NAME) or from a spec file
(--file PATH).  Exit codes: 0 success, 1 a verification or analysis
failure, 2 a usage error (unknown system, unreadable or invalid file, bad
flags).  Output is deterministic for fixed argv and seed, except for bench,
whose whole point is measured wall time.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from random import Random

from .catalog import ENTRIES, CatalogError, catalog_verify, get_entry, verify_entry
from .classify import ClassifyError, build_report, factorial_form
from .contfrac import ContFracError
from .dsl import ParseError, SpecError, parse_spec
from .engine import WalkSampler, count_levels, sample_walks, total_series
from .guess import GuessError, guess_rational, minimal_algebraic
from .kernel import KernelError, gf_report

_WIDTH_CAP = 100_000  # label-width cap for analysis commands


class UsageError(ValueError):
    """Bad invocation: maps to exit code 2."""


# ---------------------------------------------------------------------------
# Plumbing


def _load_source(args):
    """Resolve --system/--file into (name, parsed spec)."""
    if args.system is not None:
        return args.system, get_entry(args.system).spec()
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}")
    try:
        spec = parse_spec(text)
    except (ParseError, SpecError) as exc:
        raise UsageError(f"{path}: {exc}")
    return spec.name, spec


def _emit_json(obj):
    print(json.dumps(obj, indent=2))


def _emit_csv(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    sys.stdout.write(out.getvalue())


def _no_csv(args):
    if args.format == "csv":
        raise UsageError(f"csv output is not available for {args.command}")


def _clean_stats(stats):
    return {k: v for k, v in stats.items() if k != "seconds"}


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_count(args):
    name, spec = _load_source(args)
    if args.n < 0:
        raise UsageError("-n must be nonnegative")
    table = count_levels(spec, args.n, method=args.method, max_labels=args.cap)
    totals = table.totals
    if args.format == "csv":
        _emit_csv(["n", "total"], list(enumerate(totals)))
    elif args.format == "json":
        _emit_json(
            {
                "command": "count",
                "system": name,
                "mode": spec.mode,
                "n": args.n,
                "totals": totals,
                "label_sums": table.label_sums,
                "stats": _clean_stats(table.stats),
            }
        )
    else:
        print(f"{name}  mode={spec.mode}  levels 0..{len(totals) - 1}")
        for i, v in enumerate(totals):
            print(f"{i}\t{v}")
    if table.stats.get("truncated"):
        print(
            f"error: label cap {args.cap} exceeded after level "
            f"{table.stats['levels']}; output is partial",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_sample(args):
    name, spec = _load_source(args)
    if args.n < 0:
        raise UsageError("-n must be nonnegative")
    if args.count < 1:
        raise UsageError("--count must be positive")
    walks = sample_walks(spec, args.n, args.count, args.seed, args.strategy)
    if args.format == "csv":
        _emit_csv([f"step_{i}" for i in range(args.n + 1)], walks)
    elif args.format == "json":
        _emit_json(
            {
                "command": "sample",
                "system": name,
                "n": args.n,
                "seed": args.seed,
                "strategy": args.strategy,
                "walks": walks,
            }
        )
    else:
        for walk in walks:
            print(" ".join(str(k) for k in walk))
    return 0


def _cmd_classify(args):
    _no_csv(args)
    name, spec = _load_source(args)
    report = build_report(spec, order=args.order)
    if args.format == "json":
        _emit_json({"command": "classify", "system": name, **report.to_json_obj()})
    else:
        print(f"system: {name}")
        print(report.summary())
    return 0


def _cmd_gf(args):
    _no_csv(args)
    name, spec = _load_source(args)
    form = factorial_form(spec)
    if form is None:
        print(
            "error: the rule set is not an interval-with-jumps walk; "
            "the algebraic route does not apply (try `classify`)",
            file=sys.stderr,
        )
        return 1
    report = gf_report(name, form, order=args.order, window=args.window)
    if args.format == "json":
        _emit_json({"command": "gf", **report})
        return 0
    kp = report["kernel"]
    print(f"system: {name}")
    print(
        f"walk shape: jumps {kp['jumps']}, removed backward offsets "
        f"{kp['notches']}, largest jump a={kp['a']}, boundary width b={kp['b']}"
    )
    print(f"kernel constant slice (in u): {kp['z0']}")
    print(f"kernel z-slice (in u):        {kp['z1']}")
    print(f"all walks   F(z,1): {report['F1']}")
    print(f"excursions  F(z,0): {report['F0']}")
    print(f"excursion formula matched: {report['excursion_variant']}")
    if "closed_form" in report:
        cf = report["closed_form"]
        verdict = "matches" if cf["match"] else f"FAILS at z^{cf['first_mismatch']}"
        print(f"closed form {cf['form']}: {verdict}")
        if not cf["match"]:
            return 1
    return 0


def _cmd_guess(args):
    _no_csv(args)
    name, spec = _load_source(args)
    terms = total_series(spec, args.order, max_labels=_WIDTH_CAP)
    rational = guess_rational(terms, dmax=args.dmax)
    algebraic = None
    if rational is None:
        algebraic = minimal_algebraic(terms, max_total=args.max_degree)
    if args.format == "json":
        _emit_json(
            {
                "command": "guess",
                "system": name,
                "terms": len(terms),
                "rational": rational.to_json_obj() if rational else None,
                "algebraic": algebraic.to_json_obj() if algebraic else None,
            }
        )
        return 0
    print(f"system: {name}  ({len(terms)} terms)")
    if rational is not None:
        print(f"rational: {rational.func.to_str()}")
        print(f"  held beyond the fitting window for {rational.verified_terms} terms")
    elif algebraic is not None:
        rel = algebraic.relation
        print(f"algebraic: {rel.to_str()}")
        print(
            f"  bidegree (z, F) = ({rel.degree_z}, {rel.degree_f}), "
            f"verified on {algebraic.verified_terms} terms"
        )
    else:
        print(
            f"no rational function (degrees <= {args.dmax}) and no algebraic "
            f"relation (total degree <= {args.max_degree}) fits"
        )
    return 0


def _cmd_catalog(args):
    entries = ENTRIES
    if args.names:
        entries = [get_entry(n) for n in args.names]
    if not args.verify:
        if args.format == "csv":
            _emit_csv(
                ["name", "sequence_id", "golden", "description"],
                [
                    (e.name, e.sequence_id, " ".join(str(t) for t in e.golden), e.description)
                    for e in entries
                ],
            )
        elif args.format == "json":
            _emit_json(
                {
                    "command": "catalog",
                    "entries": [
                        {
                            "name": e.name,
                            "description": e.description,
                            "sequence_id": e.sequence_id,
                            "golden": list(e.golden),
                            "flags": list(e.flags),
                            "closed_form": e.form_text(),
                        }
                        for e in entries
                    ],
                }
            )
        else:
            for e in entries:
                terms = " ".join(str(t) for t in e.golden[:8])
                print(f"{e.name:<24} {terms:<42} {e.description}")
        return 0

    reports = [verify_entry(e) for e in entries]
    ok = all(r["ok"] for r in reports)
    if args.format == "csv":
        keys = ["golden", "closed_form", "oracle", "kernel", "excursions", "radius"]
        _emit_csv(
            ["name"] + keys + ["ok"],
            [
                [r["name"]] + [r["checks"][k] for k in keys] + [r["ok"]]
                for r in reports
            ],
        )
    elif args.format == "json":
        _emit_json({"command": "catalog_verify", "ok": ok, "entries": reports})
    else:
        for r in reports:
            ran = " ".join(
                f"{k}:{v}" for k, v in r["checks"].items() if v != "skip"
            )
            print(f"{'PASS' if r['ok'] else 'FAIL'}  {r['name']:<24} {ran}")
            for d in r["diagnostics"]:
                print(f"      ! {d}")
        passed = sum(r["ok"] for r in reports)
        print(f"{passed}/{len(reports)} entries pass")
    return 0 if ok else 1


def _cmd_bench(args):
    name, spec = _load_source(args)
    if args.task == "count":
        return _bench_count(name, spec, args)
    return _bench_sample(name, spec, args)


def _bench_count(name, spec, args):
    ranged = count_levels(spec, args.n, method="range")
    naive = None
    if args.n <= args.naive_cap:
        naive = count_levels(spec, args.n, method="naive")
        if naive.totals != ranged.totals:
            print(
                f"error: naive and range totals disagree on {name} at n={args.n}",
                file=sys.stderr,
            )
            return 1
    rows = [("range", ranged.stats)] + ([("naive", naive.stats)] if naive else [])
    speedup = (
        naive.stats["seconds"] / ranged.stats["seconds"]
        if naive and ranged.stats["seconds"] > 0
        else None
    )
    if args.format == "csv":
        _emit_csv(
            ["method", "seconds", "update_ops", "peak_labels"],
            [
                (m, s["seconds"], s["update_ops"], s["peak_labels"])
                for m, s in rows
            ],
        )
    elif args.format == "json":
        _emit_json(
            {
                "command": "bench",
                "task": "count",
                "system": name,
                "n": args.n,
                "methods": {m: s for m, s in rows},
                "totals_agree": naive is not None,
                "speedup": speedup,
            }
        )
    else:
        print(f"bench count {name}  n={args.n}")
        for m, s in rows:
            print(
                f"  {m:<6} {s['seconds']:>10.4f} s   "
                f"update_ops={s['update_ops']}  peak_labels={s['peak_labels']}"
            )
        if naive is not None:
            print(f"  totals agree through level {args.n}")
            if speedup is not None:
                print(f"  range speedup over naive: {speedup:.1f}x")
        else:
            print(f"  naive skipped (n > naive cap {args.naive_cap})")
    return 0


def _bench_sample(name, spec, args):
    t0 = time.perf_counter()
    sampler = WalkSampler(spec, args.n)
    build = time.perf_counter() - t0
    timings = {}
    for strategy in ("sequential", "binary"):
        rng = Random(args.seed)
        t0 = time.perf_counter()
        for _ in range(args.count):
            sampler.sample(rng, strategy=strategy)
        timings[strategy] = time.perf_counter() - t0
    factor = (
        timings["sequential"] / timings["binary"] if timings["binary"] > 0 else None
    )
    if args.format == "csv":
        _emit_csv(
            ["phase", "seconds"],
            [("table_build", round(build, 6))]
            + [(k, round(v, 6)) for k, v in timings.items()],
        )
    elif args.format == "json":
        _emit_json(
            {
                "command": "bench",
                "task": "sample",
                "system": name,
                "n": args.n,
                "draws": args.count,
                "table_build_seconds": build,
                "strategy_seconds": timings,
                "sequential_over_binary": factor,
            }
        )
    else:
        print(f"bench sample {name}  n={args.n}  draws={args.count}")
        print(f"  table build {build:.4f} s")
        for k, v in timings.items():
            print(f"  {k:<12} {v:.4f} s")
        if factor is not None:
            print(f"  sequential / binary: {factor:.1f}x")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def _build_parser():
    top = argparse.ArgumentParser(
        prog="ecokit",
        description="Exact enumeration, sampling and generating functions "
        "for succession-rule systems.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    src = argparse.ArgumentParser(add_help=False)
    g = src.add_mutually_exclusive_group(required=True)
    g.add_argument("--system", help="built-in system name (see `catalog`)")
    g.add_argument("--file", help="path to a spec file")

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument(
        "--format", choices=("text", "json", "csv"), default="text",
        help="output format (default text)",
    )

    p = sub.add_parser("count", parents=[src, fmt], help="level totals f_0..f_n")
    p.add_argument("-n", type=int, required=True, help="last level to compute")
    p.add_argument(
        "--method", choices=("auto", "naive", "range"), default="auto",
        help="propagation method (default auto)",
    )
    p.add_argument(
        "--cap", type=int, default=None,
        help="stop if a level holds more than this many distinct labels",
    )

    p = sub.add_parser(
        "sample", parents=[src, fmt], help="uniform random walks of length n"
    )
    p.add_argument("-n", type=int, required=True, help="walk length")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--count", type=int, default=1, help="number of walks")
    p.add_argument(
        "--strategy", choices=("sequential", "binary"), default="binary",
        help="child-selection strategy (default binary)",
    )

    p = sub.add_parser(
        "classify", parents=[src, fmt],
        help="structural criteria and closed form when one applies",
    )
    p.add_argument(
        "--order", type=int, default=30,
        help="series length used for verification (default 30)",
    )

    p = sub.add_parser(
        "gf", parents=[src, fmt],
        help="kernel-method generating functions for interval-walk systems",
    )
    p.add_argument("--order", type=int, default=32, help="series order (default 32)")
    p.add_argument(
        "--window", type=int, default=12,
        help="how many height columns to extract (default 12)",
    )

    p = sub.add_parser(
        "guess", parents=[src, fmt],
        help="fit a rational or algebraic equation to the level totals",
    )
    p.add_argument(
        "--order", type=int, default=40, help="number of terms to fit (default 40)"
    )
    p.add_argument(
        "--dmax", type=int, default=8,
        help="rational numerator/denominator degree bound (default 8)",
    )
    p.add_argument(
        "--max-degree", type=int, default=5,
        help="algebraic per-variable degree bound (default 5)",
    )

    p = sub.add_parser(
        "catalog", parents=[fmt], help="list built-in systems or verify them"
    )
    p.add_argument("names", nargs="*", help="restrict to these entries")
    p.add_argument(
        "--verify", action="store_true",
        help="recompute golden prefixes, closed forms, oracles, kernels",
    )

    p = sub.add_parser(
        "bench", parents=[src, fmt], help="timing report for count or sample"
    )
    p.add_argument("--task", choices=("count", "sample"), default="count")
    p.add_argument("-n", type=int, default=500, help="problem size (default 500)")
    p.add_argument(
        "--naive-cap", type=int, default=600,
        help="skip the naive method beyond this n (default 600)",
    )
    p.add_argument("--seed", type=int, default=0, help="RNG seed for sampling")
    p.add_argument(
        "--count", type=int, default=20, help="draws per strategy (default 20)"
    )
    return top


_DISPATCH = {
    "count": _cmd_count,
    "sample": _cmd_sample,
    "classify": _cmd_classify,
    "gf": _cmd_gf,
    "guess": _cmd_guess,
    "catalog": _cmd_catalog,
    "bench": _cmd_bench,
}


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (UsageError, CatalogError, GuessError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 2
    except (ClassifyError, KernelError, ContFracError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
