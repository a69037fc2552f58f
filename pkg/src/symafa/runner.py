"""Engine dispatch and run records shared by the command line and the bench harness.

Every ``run_*`` function returns a :class:`RunRecord`; none of them raise on
timeouts or unsupported engine/input combinations, which are reported in the
record instead.  Counterexamples are re-checked by membership before being
reported.
"""

from __future__ import annotations

import signal
import threading
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import ltlf, pbf
from . import regex as rx
from .algebra import Algebra, BitVectorAlgebra
from .automaton import Safa, disjoint_union
from .baseline import NotSfaShaped, from_safa, intersection_equiv, reverse_equivalent, sfa_equiv
from .equivalence import EquivResult, Timeout, is_equivalent
from .formats import load_safa
from .pbf import Pbf

ENGINES = ("bisim", "reverse-sfa", "sfa-eq")
DEFAULT_TIMEOUT_MS = 20_000
RANDOM_BATCH_TIMEOUT_MS = 5_000
SCHEMA_VERSION = 1


@dataclass
class RunRecord:
    command: str
    engine: str
    inputs: dict[str, Any]
    verdict: str | None = None
    counterexample: list[int] | None = None
    counterexample_text: str | None = None
    counterexample_verified: bool | None = None
    stats: dict[str, Any] = field(default_factory=dict)
    wall_time_ms: float = 0.0
    timeout: bool = False
    timeout_ms: int | None = None
    error: str | None = None
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @property
    def conclusive(self) -> bool:
        return self.verdict is not None and not self.timeout


def _deadline(start: float, timeout_ms: int | None) -> float | None:
    """Engine deadline, kept slightly inside the budget so that a run that
    stops there is still within the configured limit when recorded."""
    if timeout_ms is None:
        return None
    budget = timeout_ms / 1000.0
    return start + max(0.0, budget - min(0.05, 0.2 * budget))


def _raise_timeout(signum, frame):
    raise Timeout()


@contextmanager
def _hard_stop(deadline: float | None):
    """Interrupt the run at ``deadline`` even between cooperative checks.

    Uses an interval timer, so it only applies on the main thread of
    platforms that have ``setitimer``; elsewhere the engines' own deadline
    polling is all there is.
    """
    usable = (
        deadline is not None
        and hasattr(signal, "setitimer")
        and threading.current_thread() is threading.main_thread()
    )
    if not usable:
        yield
        return
    previous = signal.signal(signal.SIGALRM, _raise_timeout)
    try:
        signal.setitimer(signal.ITIMER_REAL, max(deadline - time.monotonic(), 1e-6))
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def format_word(algebra: Algebra, word: Sequence[int]) -> str:
    """Printable form: atom sets for bit-vector words, an escaped string otherwise."""
    if isinstance(algebra, BitVectorAlgebra):
        return ltlf.format_trace([algebra.valuation(a) for a in word])
    return "".join(map(chr, word)).encode("unicode_escape").decode("ascii").replace('"', '\\"')


def _run(
    command: str,
    engine: str,
    inputs: dict[str, Any],
    timeout_ms: int | None,
    body: Callable[[float | None], tuple[EquivResult, Callable[[EquivResult, RunRecord], None]]],
) -> RunRecord:
    rec = RunRecord(command, engine, inputs, timeout_ms=timeout_ms)
    if engine not in ENGINES:
        rec.error = f"unknown engine {engine!r}"
        return rec
    start = time.monotonic()
    deadline = _deadline(start, timeout_ms)
    try:
        with _hard_stop(deadline):
            res, finish = body(deadline)
        rec.stats = res.stats.as_dict()
        finish(res, rec)
    except Timeout:
        rec.timeout = True
        rec.verdict = None
    except NotSfaShaped as exc:
        rec.error = f"engine sfa-eq needs automata without conjunction: {exc}"
    rec.wall_time_ms = (time.monotonic() - start) * 1000.0
    return rec


def equivalence(
    m: Safa, lhs: Pbf, rhs: Pbf, engine: str, deadline: float | None = None, sat_backend: str = "auto"
) -> EquivResult:
    """Compare two configurations of ``m`` with the chosen engine."""
    if engine == "bisim":
        return is_equivalent(m, lhs, rhs, deadline=deadline, sat_backend=sat_backend)
    if engine == "reverse-sfa":
        return reverse_equivalent(m, lhs, rhs, deadline)
    if engine == "sfa-eq":
        return sfa_equiv(from_safa(m.with_initial(lhs)), from_safa(m.with_initial(rhs)), deadline)
    raise ValueError(f"unknown engine {engine!r}")


def _cex_to_record(m: Safa, lhs: Pbf, rhs: Pbf, res: EquivResult, rec: RunRecord) -> None:
    if res.counterexample is None:
        return
    word = list(res.counterexample)
    rec.counterexample = word
    rec.counterexample_text = format_word(m.algebra, word)
    rec.counterexample_verified = m.accepts(word, lhs) != m.accepts(word, rhs)


# ---------------------------------------------------------------------------
# Commands


def run_equiv(
    file_a: str | Path,
    file_b: str | Path | None = None,
    lhs: str | None = None,
    rhs: str | None = None,
    engine: str = "bisim",
    timeout_ms: int | None = DEFAULT_TIMEOUT_MS,
    sat_backend: str = "auto",
) -> RunRecord:
    """Two files (compare their initial formulas) or one file and two formulas."""
    inputs = {"file": str(file_a)}
    m = load_safa(file_a)
    if file_b is not None:
        inputs["file_b"] = str(file_b)
        m2 = load_safa(file_b, algebra=m.algebra)
        both, off = disjoint_union(m, m2)
        p, q = m.initial, pbf.shift(m2.initial, off)
    else:
        if lhs is None or rhs is None:
            raise ValueError("comparing configurations of one automaton needs both formulas")
        both = m
        p, q = pbf.parse(lhs), pbf.parse(rhs)
        inputs.update(lhs=lhs, rhs=rhs)
        for i in pbf.states(p) | pbf.states(q):
            if i >= m.n_states:
                raise ValueError(f"state {i} does not exist in {file_a} ({m.n_states} states)")

    def body(deadline):
        if engine == "sfa-eq" and file_b is not None:
            res = sfa_equiv(from_safa(m), from_safa(m2), deadline)
        else:
            res = equivalence(both, p, q, engine, deadline, sat_backend)

        def finish(res, rec):
            rec.verdict = "equivalent" if res.equivalent else "inequivalent"
            _cex_to_record(both, p, q, res, rec)

        return res, finish

    return _run("equiv", engine, inputs, timeout_ms, body)


def run_empty(
    file: str | Path,
    engine: str = "bisim",
    timeout_ms: int | None = DEFAULT_TIMEOUT_MS,
    sat_backend: str = "auto",
) -> RunRecord:
    m = load_safa(file)
    return empty_record(m, {"file": str(file)}, engine, timeout_ms, sat_backend)


def empty_record(m: Safa, inputs, engine="bisim", timeout_ms=DEFAULT_TIMEOUT_MS, sat_backend="auto") -> RunRecord:
    def body(deadline):
        if engine == "sfa-eq":
            res = sfa_equiv(from_safa(m), from_safa(m.with_initial(pbf.FALSE)), deadline)
        else:
            res = equivalence(m, m.initial, pbf.FALSE, engine, deadline, sat_backend)

        def finish(res, rec):
            rec.verdict = "empty" if res.equivalent else "nonempty"
            _cex_to_record(m, m.initial, pbf.FALSE, res, rec)

        return res, finish

    return _run("empty", engine, inputs, timeout_ms, body)


def run_ltlf_sat(
    formula: str | ltlf.Formula,
    engine: str = "bisim",
    timeout_ms: int | None = RANDOM_BATCH_TIMEOUT_MS,
    sat_backend: str = "auto",
) -> RunRecord:
    """Satisfiability over nonempty finite traces; the counterexample is a model."""
    f = ltlf.parse(formula) if isinstance(formula, str) else formula
    inputs = {"formula": str(formula) if isinstance(formula, str) else str(f), "nnf": str(f)}

    def body(deadline):
        aut = ltlf.translate(f)
        start = aut.nonempty_initial
        if engine == "sfa-eq":
            res = sfa_equiv(from_safa(aut.safa.with_initial(start)),
                            from_safa(aut.safa.with_initial(pbf.FALSE)), deadline)
        else:
            res = equivalence(aut.safa, start, pbf.FALSE, engine, deadline, sat_backend)

        def finish(res, rec):
            rec.verdict = "UNSAT" if res.equivalent else "SAT"
            if res.counterexample is not None:
                word = list(res.counterexample)
                trace = aut.trace_of(word)
                rec.counterexample = word
                rec.counterexample_text = ltlf.format_trace(trace)
                rec.counterexample_verified = bool(trace) and ltlf.holds(f, trace) and aut.safa.accepts(word, start)

        return res, finish

    return _run("ltlf-sat", engine, inputs, timeout_ms, body)


def run_regex_query(
    builder: rx.QueryBuilder,
    query: rx.Query | str,
    engine: str = "bisim",
    timeout_ms: int | None = DEFAULT_TIMEOUT_MS,
    sat_backend: str = "auto",
    inputs: dict[str, Any] | None = None,
) -> RunRecord:
    q = rx.parse_query(query, len(builder.patterns)) if isinstance(query, str) else query
    inputs = dict(inputs or {})
    inputs["query"] = str(q)
    inputs.setdefault("patterns", [builder.patterns[i - 1] for i in sorted({t.index for t in q.lhs + q.rhs})])

    def body(deadline):
        if engine == "sfa-eq":
            lhs, rhs = builder.sides(q)
            res = intersection_equiv(lhs, rhs, deadline)
        else:
            m, p, r = builder.configurations(q)
            res = equivalence(m, p, r, engine, deadline, sat_backend)

        def finish(res, rec):
            rec.verdict = "equivalent" if res.equivalent else "inequivalent"
            if res.counterexample is not None:
                word = list(res.counterexample)
                rec.counterexample = word
                rec.counterexample_text = format_word(builder.algebra, word)
                rec.counterexample_verified = builder.matches(q.lhs, word) != builder.matches(q.rhs, word)

        return res, finish

    return _run("regex", engine, inputs, timeout_ms, body)


def run_regex_file(
    path: str | Path,
    queries: Sequence[str] = (),
    engine: str = "bisim",
    timeout_ms: int | None = DEFAULT_TIMEOUT_MS,
    sat_backend: str = "auto",
) -> list[RunRecord]:
    """Run the queries of a regex file, plus any given explicitly."""
    problem = rx.parse_problem(Path(path).read_text(encoding="utf-8"))
    extra = [rx.parse_query(q, len(problem.patterns)) for q in queries]
    todo = problem.queries + extra
    if not todo:
        raise ValueError(f"{path}: no 'query:' lines and no query given")
    builder = rx.QueryBuilder(problem.patterns)
    return [
        run_regex_query(builder, q, engine, timeout_ms, sat_backend, {"file": str(path)})
        for q in todo
    ]
