"""Language equivalence of s-AFA configurations by bisimulation up to congruence.

The search keeps a relation ``R`` inside a :class:`CongruenceContext`.  Pairs
are taken from a min-heap keyed on ``size(p) + size(q)`` (FIFO among equal
sizes).  For each pair, one representative character per class of the
states occurring in the pair is enumerated with witness/blocking; successor
pairs that are not already congruent modulo ``R`` are added to ``R`` and to
the heap.  An inconsistent pair (one side accepts the empty word, the other
does not) ends the search with a counterexample rebuilt from parent links.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Any

from . import pbf
from .automaton import Safa, prune_with_map
from .congruence import CongruenceContext
from .pbf import FALSE, Pbf


class Timeout(Exception):
    """Raised when an engine passes its cooperative deadline."""


def check_deadline(deadline: float | None) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise Timeout()


@dataclass
class EquivStats:
    pairs_explored: int = 0
    sat_queries: int = 0
    representatives: int = 0
    wall_time: float = 0.0
    explored: int = 0

    def as_dict(self) -> dict[str, Any]:
        return {
            "pairs_explored": self.pairs_explored,
            "sat_queries": self.sat_queries,
            "representatives": self.representatives,
            "wall_time": self.wall_time,
            "explored": self.explored,
        }


@dataclass
class EquivResult:
    equivalent: bool
    counterexample: tuple[int, ...] | None = None
    stats: EquivStats = field(default_factory=EquivStats)
    relation: list[tuple[Pbf, Pbf]] = field(default_factory=list)
    trace: list[dict] | None = None
    engine: str = "bisim"

    def __bool__(self):
        return self.equivalent


@dataclass
class _Item:
    p: Pbf
    q: Pbf
    parent: int | None
    char: int | None


def _word(items: list[_Item], idx: int, last: int | None) -> tuple[int, ...]:
    out = [] if last is None else [last]
    while idx is not None and items[idx].char is not None:
        out.append(items[idx].char)
        idx = items[idx].parent
    return tuple(reversed(out))


def is_equivalent(
    m: Safa,
    p0: Pbf,
    q0: Pbf,
    *,
    prune: bool = True,
    trace: bool = False,
    deadline: float | None = None,
    sat_backend: str = "auto",
) -> EquivResult:
    """Decide whether ``p0`` and ``q0`` accept the same language in ``m``.

    On inequivalence ``counterexample`` is a word accepted from exactly one
    side.  With ``trace=True`` the result carries one event per examined
    representative character.  ``sat_backend`` selects the solver used for
    congruence queries (see :func:`symafa.sat.make_solver`).
    """
    start = time.perf_counter()
    for i in pbf.states(p0) | pbf.states(q0):
        if not 0 <= i < m.n_states:
            raise ValueError(f"state {i} not in automaton with {m.n_states} states")

    inverse = None
    if prune:
        m, mapping = prune_with_map(m, pbf.states(p0) | pbf.states(q0))
        inverse = {new: old for old, new in mapping.items()}
        p0, q0 = pbf.rename(p0, mapping), pbf.rename(q0, mapping)

    stats = EquivStats()
    events: list[dict] | None = [] if trace else None
    alg = m.algebra
    ctx = CongruenceContext(sat_backend)
    items = [_Item(p0, q0, None, None)]
    heap = [(pbf.size(p0) + pbf.size(q0), 0, 0)]
    stats.pairs_explored = 1
    ctx.assert_pair(p0, q0)

    def finish(equivalent, word=None):
        stats.sat_queries = ctx.queries
        stats.explored = stats.pairs_explored
        stats.wall_time = time.perf_counter() - start
        rel = ctx.pairs
        if inverse is not None:
            rel = [(pbf.rename(a, inverse), pbf.rename(b, inverse)) for a, b in rel]
        return EquivResult(equivalent, word, stats, rel, events)

    if m.is_final(p0) != m.is_final(q0):
        return finish(False, ())

    seq = 1
    while heap:
        check_deadline(deadline)
        _, _, idx = heapq.heappop(heap)
        p, q = items[idx].p, items[idx].q
        S = sorted(pbf.states(p) | pbf.states(q))
        chars = alg.top
        while alg.is_sat(chars):
            a = alg.witness(chars)
            succ, cls = m.delta_on_char(a, S)
            p1 = pbf.substitute(succ, p)
            q1 = pbf.substitute(succ, q)
            chars = alg.and_(chars, alg.not_(cls))
            stats.representatives += 1
            event = None
            if events is not None:
                event = {"pair": _unmap((p, q), inverse), "char": a, "class": cls,
                         "succ": _unmap((p1, q1), inverse)}
                events.append(event)
            if m.is_final(p1) != m.is_final(q1):
                if event is not None:
                    event["result"] = "inconsistent"
                return finish(False, _word(items, idx, a))
            if p1 is q1:
                if event is not None:
                    event["result"] = "identical"
                continue
            if ctx.in_closure(p1, q1):
                if event is not None:
                    event["result"] = "congruent"
                continue
            if event is not None:
                event["result"] = "added"
            items.append(_Item(p1, q1, idx, a))
            heapq.heappush(heap, (pbf.size(p1) + pbf.size(q1), seq, len(items) - 1))
            seq += 1
            stats.pairs_explored += 1
            ctx.assert_pair(p1, q1)
            check_deadline(deadline)
    return finish(True)


def _unmap(pair, inverse):
    if inverse is None:
        return pair
    return tuple(pbf.rename(x, inverse) for x in pair)


def is_empty(m: Safa, **kw) -> EquivResult:
    """Emptiness as equivalence with ``false``; the counterexample is an accepted word."""
    return is_equivalent(m, m.initial, FALSE, **kw)


def config_equiv(m: Safa, lhs: Pbf, rhs: Pbf, **kw) -> EquivResult:
    """Compare two configurations of the same automaton."""
    return is_equivalent(m, lhs, rhs, **kw)


def automata_equivalent(m1: Safa, m2: Safa, **kw) -> EquivResult:
    """Equivalence of two automata over the same algebra via their disjoint union."""
    from .automaton import disjoint_union

    both, off = disjoint_union(m1, m2)
    return is_equivalent(both, m1.initial, pbf.shift(m2.initial, off), **kw)
