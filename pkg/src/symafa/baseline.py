"""Classical decision procedures used as baselines and cross-checks.

* Non-alternating symbolic automata (:class:`Sfa`) with product,
  minterm-based subset construction and Hopcroft-Karp equivalence.
* The reverse-DFA of an s-AFA (:class:`ReverseDfa`): its states are models
  ``g`` (state bitmasks) of the s-AFA, the initial state is the final-state
  model, reading ``a`` moves ``g`` to ``x -> g(Delta_a(x))`` and ``g`` is
  accepting when ``g(p0)`` holds.  It accepts the reversed language and is
  explored lazily for emptiness and equivalence.
"""

from __future__ import annotations

import time
from collections import deque
from typing import Iterable, Sequence

from . import pbf
from .algebra import Algebra, AlgebraError
from .automaton import Safa
from .equivalence import EquivResult, EquivStats, check_deadline
from .pbf import FALSE_K, OR_K, STATE_K, TRUE_K, Pbf


class NotSfaShaped(ValueError):
    """The s-AFA uses conjunction and has no direct s-FA reading."""


class Sfa:
    """Symbolic finite automaton with single-state transition targets."""

    def __init__(
        self,
        algebra: Algebra,
        n_states: int,
        initial: Iterable[int],
        final: Iterable[int],
        transitions: Iterable[tuple[int, object, int]],
        deterministic: bool = False,
    ):
        self.algebra = algebra
        self.n_states = n_states
        self.initial = frozenset(initial)
        self.final = frozenset(final)
        merged: dict[tuple[int, int], list] = {}
        for s, g, t in transitions:
            if not (0 <= s < n_states and 0 <= t < n_states):
                raise ValueError(f"transition {s}->{t} out of range")
            algebra._own(g)
            if not algebra.is_sat(g):
                continue
            if (s, t) in merged:
                merged[s, t][1] = algebra.or_(merged[s, t][1], g)
            else:
                merged[s, t] = [s, g, t]
        self.transitions = tuple((s, g, t) for s, g, t in merged.values())
        out: list[list[tuple[object, int]]] = [[] for _ in range(n_states)]
        for s, g, t in self.transitions:
            out[s].append((g, t))
        self._out = out
        self.deterministic = deterministic
        if deterministic and len(self.initial) != 1:
            raise ValueError("a deterministic s-FA has exactly one initial state")

    def __repr__(self):
        kind = "DFA" if self.deterministic else "NFA"
        return f"Sfa[{kind}](states={self.n_states}, transitions={len(self.transitions)})"

    def outgoing(self, s: int):
        return self._out[s]

    def accepts(self, word: Sequence[int]) -> bool:
        cur = set(self.initial)
        member = self.algebra.member
        for a in word:
            self.algebra.check_char(a)
            cur = {t for s in cur for g, t in self._out[s] if member(a, g)}
            if not cur:
                return False
        return bool(cur & self.final)

    def to_safa(self) -> Safa:
        init = pbf.disj_all(pbf.var(i) for i in sorted(self.initial))
        trans = [(s, g, pbf.var(t)) for s, g, t in self.transitions]
        return Safa(self.algebra, self.n_states, init, self.final, trans)

    def is_partitioned(self) -> bool:
        alg = self.algebra
        for s in range(self.n_states):
            gs = [g for g, _ in self._out[s]]
            for i in range(len(gs)):
                for j in range(i + 1, len(gs)):
                    if alg.is_sat(alg.and_(gs[i], gs[j])):
                        return False
            if alg.is_sat(alg.not_(alg.disj(gs))):
                return False
        return True


def _state_disjuncts(p: Pbf) -> list[int] | None:
    """States of ``p`` if it is a disjunction of states, else None."""
    out = []
    stack = [p]
    while stack:
        n = stack.pop()
        if n.kind == STATE_K:
            out.append(n.index)
        elif n.kind == OR_K:
            stack.append(n.right)
            stack.append(n.left)
        elif n.kind == FALSE_K:
            continue
        else:
            return None
    return out


def from_safa(m: Safa) -> Sfa:
    """Read an s-AFA without conjunction as an s-FA.

    A ``true`` target is routed to an extra accepting sink state.
    """
    sink = m.n_states
    need_sink = False

    def targets(p):
        nonlocal need_sink
        if p.kind == TRUE_K:
            need_sink = True
            return [sink]
        got = _state_disjuncts(p)
        if got is None:
            raise NotSfaShaped(f"formula {p} is not a disjunction of states")
        return got

    init = targets(m.initial)
    trans = [(s, g, t) for s, g, q in m.transitions for t in targets(q)]
    n = m.n_states
    final = set(m.final)
    if need_sink:
        n += 1
        final.add(sink)
        trans.append((sink, m.algebra.top, sink))
    return Sfa(m.algebra, n, init, final, trans)


def is_sfa_shaped(m: Safa) -> bool:
    try:
        from_safa(m)
    except NotSfaShaped:
        return False
    return True


def sfa_intersect(a: Sfa, b: Sfa, deadline: float | None = None) -> Sfa:
    """Product automaton over reachable state pairs."""
    if a.algebra is not b.algebra:
        raise AlgebraError("automata are over different algebra instances")
    alg = a.algebra
    index: dict[tuple[int, int], int] = {}
    todo = deque()
    for s in sorted(a.initial):
        for t in sorted(b.initial):
            index[s, t] = len(index)
            todo.append((s, t))
    trans = []
    while todo:
        check_deadline(deadline)
        s, t = todo.popleft()
        src = index[s, t]
        for g1, s2 in a.outgoing(s):
            for g2, t2 in b.outgoing(t):
                g = alg.and_(g1, g2)
                if not alg.is_sat(g):
                    continue
                if (s2, t2) not in index:
                    index[s2, t2] = len(index)
                    todo.append((s2, t2))
                trans.append((src, g, index[s2, t2]))
    final = [i for (s, t), i in index.items() if s in a.final and t in b.final]
    init = [index[s, t] for s in a.initial for t in b.initial]
    return Sfa(alg, len(index), init, final, trans)


def sfa_intersect_all(autos: Sequence[Sfa], deadline: float | None = None) -> Sfa:
    out = autos[0]
    for other in autos[1:]:
        out = sfa_intersect(out, other, deadline)
    return out


def determinize(a: Sfa, deadline: float | None = None) -> Sfa:
    """Complete deterministic s-FA by subset construction over minterms.

    The empty subset is kept as an explicit rejecting sink so that every
    state's guards partition the domain.
    """
    alg = a.algebra
    start = frozenset(a.initial)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        check_deadline(deadline)
        S = order[i]
        src = i
        i += 1
        out = [(g, t) for s in sorted(S) for g, t in a.outgoing(s)]
        chars = alg.top
        while alg.is_sat(chars):
            w = alg.witness(chars)
            cls = alg.top
            T = set()
            for g, t in out:
                if alg.member(w, g):
                    cls = alg.and_(cls, g)
                    T.add(t)
                else:
                    cls = alg.and_(cls, alg.not_(g))
            chars = alg.and_(chars, alg.not_(cls))
            T = frozenset(T)
            if T not in index:
                index[T] = len(order)
                order.append(T)
            trans.append((src, cls, index[T]))
    final = [j for j, S in enumerate(order) if S & a.final]
    return Sfa(alg, len(order), [0], final, trans, deterministic=True)


def hopcroft_karp(d1: Sfa, d2: Sfa, deadline: float | None = None) -> tuple[tuple[int, ...] | None, int]:
    """Equivalence of two complete DFAs by union-find merging.

    Returns ``(counterexample, pairs)``: the counterexample is ``None`` when
    the languages agree; ``pairs`` counts the merged state pairs.
    """
    alg = d1.algebra
    off = d1.n_states
    parent = list(range(d1.n_states + d2.n_states))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    (i1,) = d1.initial
    (i2,) = d2.initial
    links: list[tuple[int, int, int | None, int | None]] = [(i1, i2, None, None)]

    def word(k, last=None):
        out = [] if last is None else [last]
        while links[k][3] is not None:
            out.append(links[k][3])
            k = links[k][2]
        return tuple(reversed(out))

    if (i1 in d1.final) != (i2 in d2.final):
        return (), 1
    parent[find(i1)] = find(i2 + off)
    todo = deque([0])
    while todo:
        check_deadline(deadline)
        k = todo.popleft()
        s, t = links[k][0], links[k][1]
        for g1, s2 in d1.outgoing(s):
            for g2, t2 in d2.outgoing(t):
                g = alg.and_(g1, g2)
                if not alg.is_sat(g):
                    continue
                r1, r2 = find(s2), find(t2 + off)
                if r1 == r2:
                    continue
                a = alg.witness(g)
                if (s2 in d1.final) != (t2 in d2.final):
                    return word(k, a), len(links)
                parent[r1] = r2
                links.append((s2, t2, k, a))
                todo.append(len(links) - 1)
    return None, len(links)


def sfa_equiv(a: Sfa, b: Sfa, deadline: float | None = None) -> EquivResult:
    """Determinize both sides, then Hopcroft-Karp.

    ``stats.pairs_explored`` counts Hopcroft-Karp pairs; ``stats.explored``
    adds the states built by both determinizations.
    """
    if a.algebra is not b.algebra:
        raise AlgebraError("automata are over different algebra instances")
    start = time.perf_counter()
    d1 = a if a.deterministic else determinize(a, deadline)
    d2 = b if b.deterministic else determinize(b, deadline)
    cex, pairs = hopcroft_karp(d1, d2, deadline)
    stats = EquivStats(pairs_explored=pairs, explored=d1.n_states + d2.n_states)
    stats.wall_time = time.perf_counter() - start
    return EquivResult(cex is None, cex, stats, engine="sfa-eq")


def intersection_equiv(lhs: Sequence[Sfa], rhs: Sequence[Sfa], deadline: float | None = None) -> EquivResult:
    """The full classical pipeline: products, determinization, Hopcroft-Karp."""
    start = time.perf_counter()
    left = sfa_intersect_all(lhs, deadline)
    right = sfa_intersect_all(rhs, deadline)
    res = sfa_equiv(left, right, deadline)
    res.stats.explored += left.n_states + right.n_states
    res.stats.wall_time = time.perf_counter() - start
    return res


# ---------------------------------------------------------------------------
# Reverse DFA


class ReverseDfa:
    """Lazily explored deterministic automaton for the reversed language."""

    def __init__(self, m: Safa):
        self.m = m
        self.classes = m.character_classes()
        everything = range(m.n_states)
        self._deltas = [
            [succ[x] for x in everything] for succ in (m.successors(a, everything) for _, a in self.classes)
        ]
        self.initial = m.final_mask
        self._succ: dict[int, list[int]] = {}

    def accepting(self, g: int, p: Pbf | None = None) -> bool:
        return pbf.evaluate(g, self.m.initial if p is None else p)

    def successors(self, g: int) -> list[int]:
        """Successor model per character class, in ``self.classes`` order."""
        hit = self._succ.get(g)
        if hit is None:
            hit = []
            for delta in self._deltas:
                h = 0
                for x, f in enumerate(delta):
                    if pbf.evaluate(g, f):
                        h |= 1 << x
                hit.append(h)
            self._succ[g] = hit
        return hit

    def explore(self, stop=None, deadline: float | None = None):
        """Breadth-first search; returns ``(found_model, path, visited)``.

        ``stop(g)`` ends the search early; ``path`` lists the witness
        characters read from the initial model.
        """
        parent: dict[int, tuple[int | None, int | None]] = {self.initial: (None, None)}
        todo = deque([self.initial])
        while todo:
            check_deadline(deadline)
            g = todo.popleft()
            if stop is not None and stop(g):
                path = []
                cur = g
                while parent[cur][0] is not None:
                    prev, a = parent[cur]
                    path.append(a)
                    cur = prev
                return g, tuple(reversed(path)), len(parent)
            for (cls, a), h in zip(self.classes, self.successors(g)):
                if h not in parent:
                    parent[h] = (g, a)
                    todo.append(h)
        return None, None, len(parent)

    def materialize(self, deadline: float | None = None) -> Sfa:
        index = {self.initial: 0}
        order = [self.initial]
        trans = []
        i = 0
        while i < len(order):
            check_deadline(deadline)
            g = order[i]
            for (cls, _), h in zip(self.classes, self.successors(g)):
                if h not in index:
                    index[h] = len(order)
                    order.append(h)
                trans.append((i, cls, index[h]))
            i += 1
        final = [j for j, g in enumerate(order) if self.accepting(g)]
        return Sfa(self.m.algebra, len(order), [0], final, trans, deterministic=True)


def reverse_dfa(m: Safa) -> ReverseDfa:
    return ReverseDfa(m)


def reverse_equivalent(m: Safa, p: Pbf, q: Pbf, deadline: float | None = None) -> EquivResult:
    """``L(p) = L(q)`` iff no reachable model separates ``p`` and ``q``."""
    start = time.perf_counter()
    rd = ReverseDfa(m)
    g, path, visited = rd.explore(lambda g: pbf.evaluate(g, p) != pbf.evaluate(g, q), deadline)
    stats = EquivStats(pairs_explored=visited, explored=visited)
    stats.wall_time = time.perf_counter() - start
    if g is None:
        return EquivResult(True, None, stats, engine="reverse-sfa")
    return EquivResult(False, tuple(reversed(path)), stats, engine="reverse-sfa")


def reverse_emptiness(m: Safa, deadline: float | None = None) -> EquivResult:
    return reverse_equivalent(m, m.initial, pbf.FALSE, deadline)


def reverse_empty(m: Safa) -> bool:
    return reverse_emptiness(m).equivalent
