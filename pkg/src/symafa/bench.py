"""Benchmark harness: run manifest cases under several engines and summarise.

A manifest is JSON::

    {"name": "...", "cases": [
        {"id": "r01-r02", "kind": "regex", "corpus": "bundled:email_filters.txt",
         "query": "1&2 = 1&2&2'"},
        {"id": "f7", "kind": "ltlf", "formula": "G (p -> X q)"},
        {"id": "e1", "kind": "equiv", "file": "a.safa", "lhs": "0", "rhs": "1"},
        {"id": "e2", "kind": "empty", "file": "a.safa"}
    ]}

Relative file names are resolved against the manifest's directory.  A case
may carry its own ``timeout_ms``.  The report lists one record per
(case, engine), per-engine timeout counts, and explored-state data per case.
"""

from __future__ import annotations

import csv
import io
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from . import ltlf
from . import regex as rx
from .runner import (
    DEFAULT_TIMEOUT_MS,
    ENGINES,
    RANDOM_BATCH_TIMEOUT_MS,
    RunRecord,
    run_empty,
    run_equiv,
    run_ltlf_sat,
    run_regex_query,
)

BUNDLED_PREFIX = "bundled:"
CSV_FIELDS = [
    "id", "engine", "verdict", "timeout", "error", "wall_time_ms",
    "explored", "pairs_explored", "sat_queries", "counterexample_verified",
]


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("symafa") / "data" / name))


def read_corpus(path: str | Path) -> list[str]:
    """Regex corpus: one pattern per line, ``#`` comment lines skipped."""
    text = Path(path).read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


def _resolve(name: str, base: Path) -> Path:
    if name.startswith(BUNDLED_PREFIX):
        return bundled_path(name[len(BUNDLED_PREFIX):])
    p = Path(name)
    return p if p.is_absolute() else base / p


# ---------------------------------------------------------------------------
# Manifest generators


def forced_equivalence_manifest(corpus: str = BUNDLED_PREFIX + "email_filters.txt",
                                limit: int | None = None) -> dict[str, Any]:
    """``i & j = i & j & j'`` for every pair of regexes in the corpus."""
    n = len(read_corpus(_resolve(corpus, Path.cwd())))
    queries = rx.forced_equivalence_queries(n)
    if limit is not None:
        queries = queries[:limit]
    width = len(str(n))
    cases = [
        {
            "id": f"r{q.lhs[0].index:0{width}d}-r{q.lhs[1].index:0{width}d}",
            "kind": "regex",
            "corpus": corpus,
            "query": str(q),
        }
        for q in queries
    ]
    return {"name": "forced-equivalence", "cases": cases}


def random_ltlf_manifest(count: int, seed: int = 0, max_size: int = 8,
                         atoms: Sequence[str] = ("p", "q", "r")) -> dict[str, Any]:
    rng = random.Random(seed)
    cases = []
    for i in range(count):
        k = rng.randint(1, len(atoms))
        f = ltlf.random_formula(rng, rng.randint(1, max_size), atoms[:k])
        cases.append({"id": f"ltlf{i:04d}", "kind": "ltlf", "formula": str(f),
                      "timeout_ms": RANDOM_BATCH_TIMEOUT_MS})
    return {"name": f"random-ltlf-seed{seed}", "seed": seed, "cases": cases}


# ---------------------------------------------------------------------------
# Running


_BUILDERS: dict[str, rx.QueryBuilder] = {}


def _builder(corpus_path: Path) -> rx.QueryBuilder:
    key = str(corpus_path)
    if key not in _BUILDERS:
        _BUILDERS[key] = rx.QueryBuilder(read_corpus(corpus_path))
    return _BUILDERS[key]


def run_case(case: dict[str, Any], engine: str, base: Path, timeout_ms: int | None,
             sat_backend: str = "auto") -> RunRecord:
    """One case under one engine; failures become error records."""
    kind = case.get("kind")
    t = case.get("timeout_ms", timeout_ms)
    try:
        if kind == "regex":
            if "patterns" in case:
                builder = rx.QueryBuilder(case["patterns"])
                inputs = {}
            else:
                path = _resolve(case["corpus"], base)
                builder = _builder(path)
                inputs = {"corpus": case["corpus"]}
            rec = run_regex_query(builder, case["query"], engine, t, sat_backend, inputs)
        elif kind == "ltlf":
            rec = run_ltlf_sat(case["formula"], engine, t, sat_backend)
        elif kind == "equiv":
            file_b = case.get("file_b")
            rec = run_equiv(_resolve(case["file"], base),
                            _resolve(file_b, base) if file_b else None,
                            case.get("lhs"), case.get("rhs"), engine, t, sat_backend)
        elif kind == "empty":
            rec = run_empty(_resolve(case["file"], base), engine, t, sat_backend)
        else:
            raise ValueError(f"unknown case kind {kind!r}")
    except Exception as exc:  # recorded, the run continues
        rec = RunRecord(str(kind), engine, {k: v for k, v in case.items() if k != "id"},
                        error=f"{type(exc).__name__}: {exc}", timeout_ms=t)
    rec.inputs["id"] = case["id"]
    return rec


def _worker(args):
    case, engines, base, timeout_ms, sat_backend = args
    return [run_case(case, e, Path(base), timeout_ms, sat_backend).to_dict() for e in engines]


@dataclass
class BenchReport:
    name: str
    engines: list[str]
    records: list[dict[str, Any]] = field(default_factory=list)

    def summary(self) -> dict[str, dict[str, Any]]:
        out = {}
        for e in self.engines:
            recs = [r for r in self.records if r["engine"] == e]
            verdicts: dict[str, int] = {}
            for r in recs:
                if r["verdict"] is not None:
                    verdicts[r["verdict"]] = verdicts.get(r["verdict"], 0) + 1
            out[e] = {
                "cases": len(recs),
                "timeouts": sum(r["timeout"] for r in recs),
                "errors": sum(r["error"] is not None for r in recs),
                "verdicts": verdicts,
                "total_wall_time_ms": sum(r["wall_time_ms"] for r in recs),
            }
        return out

    def explored(self) -> list[dict[str, Any]]:
        """Explored states per case and engine (``None`` for timeouts and errors)."""
        rows: dict[str, dict[str, Any]] = {}
        for r in self.records:
            row = rows.setdefault(r["inputs"]["id"], {"id": r["inputs"]["id"]})
            ok = r["verdict"] is not None and not r["timeout"]
            row[r["engine"]] = r["stats"].get("explored") if ok else None
        return [rows[k] for k in sorted(rows)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "engines": self.engines,
            "summary": self.summary(),
            "explored": self.explored(),
            "records": self.records,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in self.records:
            w.writerow({
                "id": r["inputs"]["id"],
                "engine": r["engine"],
                "verdict": r["verdict"] or "",
                "timeout": int(r["timeout"]),
                "error": r["error"] or "",
                "wall_time_ms": f"{r['wall_time_ms']:.3f}",
                "explored": r["stats"].get("explored", ""),
                "pairs_explored": r["stats"].get("pairs_explored", ""),
                "sat_queries": r["stats"].get("sat_queries", ""),
                "counterexample_verified": "" if r["counterexample_verified"] is None
                else int(r["counterexample_verified"]),
            })
        return buf.getvalue()


def run_manifest(
    manifest: dict[str, Any],
    engines: Sequence[str] = ENGINES,
    timeout_ms: int | None = DEFAULT_TIMEOUT_MS,
    base: str | Path = ".",
    workers: int = 1,
    sat_backend: str = "auto",
    progress=None,
) -> BenchReport:
    """Run every case under every engine.

    Records are ordered by case id and then by the given engine order, so the
    report does not depend on ``workers``.
    """
    for e in engines:
        if e not in ENGINES:
            raise ValueError(f"unknown engine {e!r}")
    cases = list(manifest.get("cases", []))
    ids = [c.get("id") for c in cases]
    if any(i is None for i in ids) or len(set(ids)) != len(ids):
        raise ValueError("every manifest case needs a unique 'id'")
    engines = list(engines)
    jobs = [(c, engines, str(base), timeout_ms, sat_backend) for c in cases]
    results: list[list[dict[str, Any]]] = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for got in pool.map(_worker, jobs, chunksize=max(1, len(jobs) // (4 * workers))):
                results.append(got)
                if progress:
                    progress(got)
    else:
        for job in jobs:
            got = _worker(job)
            results.append(got)
            if progress:
                progress(got)
    order = sorted(range(len(cases)), key=lambda k: str(ids[k]))
    records = [rec for k in order for rec in results[k]]
    return BenchReport(manifest.get("name", "bench"), engines, records)


def load_manifest(path: str | Path) -> dict[str, Any]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, list):
        data = {"cases": data}
    if not isinstance(data, dict) or not isinstance(data.get("cases", []), list):
        raise ValueError(f"{path}: a manifest is an object with a 'cases' list")
    return data
