"""Command line: ``symafa {equiv,empty,ltlf-sat,regex,bench}``.

Exit status: 0 when every run produced a verdict, 3 if any run timed out,
2 for input errors (unreadable or malformed files, bad formulas, unsupported
engine/input combinations).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ltlf, pbf
from . import regex as rx
from .bench import forced_equivalence_manifest, load_manifest, random_ltlf_manifest, run_manifest
from .equivalence import is_equivalent
from .formats import FormatError, load_safa
from .runner import DEFAULT_TIMEOUT_MS, ENGINES, RANDOM_BATCH_TIMEOUT_MS, RunRecord, run_empty, run_equiv, run_ltlf_sat, run_regex_file
from .sat import BACKENDS

EXIT_OK, EXIT_INPUT, EXIT_TIMEOUT = 0, 2, 3


def _common(p: argparse.ArgumentParser, default_timeout: int | None) -> None:
    p.add_argument("--engine", choices=ENGINES, default="bisim", help="decision procedure (default: bisim)")
    p.add_argument("--timeout-ms", type=int, default=default_timeout,
                   help=f"per-run time limit in milliseconds (default: {default_timeout}; 0 disables)")
    p.add_argument("--json", action="store_true", help="print one JSON record per line")
    p.add_argument("--seed", type=int, default=0, help="seed for generated inputs (default: 0)")
    p.add_argument("--sat-backend", choices=BACKENDS, default="auto",
                   help="SAT solver for congruence queries (default: auto)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symafa", description="Equivalence and emptiness of symbolic alternating automata.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equiv", help="language equivalence of two automata or two configurations")
    p.add_argument("file", help="automaton file")
    p.add_argument("file_b", nargs="?", help="second automaton file (compares initial formulas)")
    p.add_argument("--lhs", help="first configuration formula, e.g. '4' or '0 & 1'")
    p.add_argument("--rhs", help="second configuration formula")
    p.add_argument("--trace", action="store_true", help="print the bisimulation steps (bisim engine)")
    _common(p, DEFAULT_TIMEOUT_MS)

    p = sub.add_parser("empty", help="language emptiness of an automaton")
    p.add_argument("file")
    _common(p, DEFAULT_TIMEOUT_MS)

    p = sub.add_parser("ltlf-sat", help="satisfiability of LTL formulas over finite traces")
    p.add_argument("file", nargs="?", help="file with one formula per line ('#' comments)")
    p.add_argument("-f", "--formula", action="append", default=[], help="formula text (repeatable)")
    p.add_argument("--random", type=int, metavar="N", help="check N random formulas generated from --seed")
    _common(p, RANDOM_BATCH_TIMEOUT_MS)

    p = sub.add_parser("regex", help="equations between intersections of regular expressions")
    p.add_argument("file", help="regex lines plus 'query: 1&2 = 1&2&2\\'' lines")
    p.add_argument("-q", "--query", action="append", default=[], help="extra query (repeatable)")
    _common(p, DEFAULT_TIMEOUT_MS)

    p = sub.add_parser("bench", help="run a manifest of cases under several engines")
    p.add_argument("manifest", nargs="?", help="JSON manifest")
    p.add_argument("--forced-corpus", nargs="?", const="bundled:email_filters.txt", metavar="CORPUS",
                   help="generate the forced-equivalence cases of a regex corpus (default: bundled)")
    p.add_argument("--random-ltlf", type=int, metavar="N", help="generate N random LTL cases from --seed")
    p.add_argument("--limit", type=int, help="only the first N generated cases")
    p.add_argument("--engines", default=",".join(ENGINES), help="comma-separated engines (default: all)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--csv", help="write one CSV row per record here")
    p.add_argument("--write-manifest", help="save the (generated) manifest here")
    p.add_argument("--timeout-ms", type=int, default=DEFAULT_TIMEOUT_MS)
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sat-backend", choices=BACKENDS, default="auto")
    return ap


def _timeout(args) -> int | None:
    return args.timeout_ms if args.timeout_ms and args.timeout_ms > 0 else None


def _print_record(rec: RunRecord, as_json: bool, out) -> None:
    if as_json:
        print(json.dumps(rec.to_dict(), sort_keys=True), file=out)
        return
    what = ", ".join(f"{k}={v}" for k, v in rec.inputs.items() if k not in ("patterns", "nnf"))
    print(f"{rec.command} [{rec.engine}] {what}", file=out)
    if rec.error:
        print(f"  error: {rec.error}", file=out)
    elif rec.timeout:
        print(f"  timeout after {rec.wall_time_ms:.0f} ms (limit {rec.timeout_ms} ms)", file=out)
    else:
        print(f"  verdict: {rec.verdict}", file=out)
    if rec.counterexample is not None:
        shown = rec.counterexample_text if rec.counterexample else ""
        label = "model" if rec.command == "ltlf-sat" else "counterexample"
        text = shown if rec.command == "ltlf-sat" else f'"{shown}"'
        note = "verified" if rec.counterexample_verified else "NOT VERIFIED"
        empty = " (empty word)" if not rec.counterexample else ""
        print(f"  {label}: {text}{empty} [{note}]", file=out)
    s = rec.stats
    if s:
        print(f"  explored: {s.get('explored')}  pairs: {s.get('pairs_explored')}  "
              f"sat queries: {s.get('sat_queries')}  time: {rec.wall_time_ms:.1f} ms", file=out)


def _print_trace(file, lhs, rhs, out) -> None:
    m = load_safa(file)
    res = is_equivalent(m, pbf.parse(lhs), pbf.parse(rhs), trace=True)
    fmt = m.algebra.format
    for ev in res.trace:
        p, q = ev["pair"]
        p1, q1 = ev["succ"]
        print(f"  ({p}, {q}) --{fmt(ev['class'])} (witness {ev['char']})--> ({p1}, {q1}): {ev['result']}", file=out)
    rel = ", ".join(f"({a}, {b})" for a, b in res.relation)
    print(f"  relation: {{{rel}}}", file=out)


def _status(records) -> int:
    if any(r.error for r in records):
        return EXIT_INPUT
    if any(r.timeout for r in records):
        return EXIT_TIMEOUT
    return EXIT_OK


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args, out)
    except (FormatError, ltlf.LtlfSyntaxError, rx.RegexError, pbf.PbfSyntaxError, ValueError, OSError) as exc:
        print(f"symafa {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _dispatch(args, out) -> int:
    t = _timeout(args)
    if args.command == "equiv":
        if args.file_b is None and (args.lhs is None or args.rhs is None):
            raise ValueError("give a second file, or --lhs and --rhs")
        if args.file_b is not None and (args.lhs or args.rhs):
            raise ValueError("--lhs/--rhs compare configurations of a single file")
        rec = run_equiv(args.file, args.file_b, args.lhs, args.rhs, args.engine, t, args.sat_backend)
        _print_record(rec, args.json, out)
        if args.trace and not args.json:
            if args.engine != "bisim" or args.file_b is not None:
                print("  (--trace applies to the bisim engine on one file with --lhs/--rhs)", file=out)
            else:
                _print_trace(args.file, args.lhs, args.rhs, out)
        return _status([rec])

    if args.command == "empty":
        rec = run_empty(args.file, args.engine, t, args.sat_backend)
        _print_record(rec, args.json, out)
        return _status([rec])

    if args.command == "ltlf-sat":
        formulas = list(args.formula)
        if args.file:
            text = Path(args.file).read_text(encoding="utf-8")
            formulas += [l.strip() for l in text.splitlines() if l.strip() and not l.lstrip().startswith("#")]
        if args.random:
            man = random_ltlf_manifest(args.random, args.seed)
            formulas += [c["formula"] for c in man["cases"]]
        if not formulas:
            raise ValueError("no formula given (use a file, -f or --random)")
        parsed = [ltlf.parse(f) for f in formulas]  # report syntax errors before running
        records = []
        for text, f in zip(formulas, parsed):
            rec = run_ltlf_sat(text, args.engine, t, args.sat_backend)
            records.append(rec)
            _print_record(rec, args.json, out)
        return _status(records)

    if args.command == "regex":
        records = run_regex_file(args.file, args.query, args.engine, t, args.sat_backend)
        for rec in records:
            _print_record(rec, args.json, out)
        return _status(records)

    if args.command == "bench":
        return _bench(args, t, out)
    raise AssertionError(args.command)


def _bench(args, t, out) -> int:
    cases = []
    name = []
    base = Path(".")
    if args.manifest:
        man = load_manifest(args.manifest)
        cases += man["cases"]
        name.append(man.get("name", Path(args.manifest).stem))
        base = Path(args.manifest).resolve().parent
    if args.forced_corpus:
        man = forced_equivalence_manifest(args.forced_corpus, args.limit)
        cases += man["cases"]
        name.append(man["name"])
    if args.random_ltlf:
        man = random_ltlf_manifest(args.random_ltlf, args.seed)
        cases += man["cases"][: args.limit] if args.limit else man["cases"]
        name.append(man["name"])
    manifest = {"name": "+".join(name) or "empty", "seed": args.seed, "cases": cases}
    if args.write_manifest:
        Path(args.write_manifest).write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    report = run_manifest(manifest, engines, t, base, args.workers, args.sat_backend)
    data = report.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    if args.json:
        print(json.dumps(data, sort_keys=True), file=out)
    else:
        print(f"bench {manifest['name']}: {len(cases)} cases", file=out)
        print(f"  {'engine':<12} {'cases':>6} {'timeouts':>9} {'errors':>7} {'time (s)':>9}  verdicts", file=out)
        for e, s in data["summary"].items():
            verdicts = ", ".join(f"{k}={v}" for k, v in sorted(s["verdicts"].items()))
            print(f"  {e:<12} {s['cases']:>6} {s['timeouts']:>9} {s['errors']:>7} "
                  f"{s['total_wall_time_ms'] / 1000:>9.2f}  {verdicts}", file=out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
