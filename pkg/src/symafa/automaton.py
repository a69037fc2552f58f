"""Symbolic alternating finite automata and their Boolean operations."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

from . import pbf
from .algebra import Algebra, AlgebraError
from .pbf import FALSE, Pbf


class Safa:
    """An s-AFA ``<algebra, states, initial, final, transitions>``.

    States are the integers ``0..n_states-1``.  ``transitions`` is a tuple of
    ``(source, guard, target)`` triples where ``guard`` is a predicate of
    ``algebra`` and ``target`` a :class:`~symafa.pbf.Pbf`.  Construction drops
    unsatisfiable guards and merges transitions that share source and target
    by disjoining their guards.  Instances are treated as immutable.
    """

    def __init__(
        self,
        algebra: Algebra,
        n_states: int,
        initial: Pbf,
        final: Iterable[int],
        transitions: Iterable[tuple[int, object, Pbf]],
        *,
        normal: bool = False,
    ):
        self.algebra = algebra
        self.n_states = n_states
        self.initial = initial
        self.final = frozenset(final)
        self.final_mask = pbf.model_of(self.final)
        self.normal = normal
        for i in pbf.states(initial):
            self._check_state(i, "initial formula")
        for i in self.final:
            self._check_state(i, "final set")

        merged: dict[tuple[int, int], list] = {}
        for src, guard, target in transitions:
            self._check_state(src, "transition source")
            for i in pbf.states(target):
                self._check_state(i, "transition target")
            algebra._own(guard)
            if not algebra.is_sat(guard):
                continue
            key = (src, target.uid)
            if key in merged:
                merged[key][1] = algebra.or_(merged[key][1], guard)
            else:
                merged[key] = [src, guard, target]
        self.transitions = tuple((s, g, t) for s, g, t in merged.values())
        out: list[list[tuple[object, Pbf]]] = [[] for _ in range(n_states)]
        for s, g, t in self.transitions:
            out[s].append((g, t))
        self._out = tuple(tuple(x) for x in out)

    def _check_state(self, i: int, where: str) -> None:
        if not 0 <= i < self.n_states:
            raise ValueError(f"state {i} in {where} out of range 0..{self.n_states - 1}")

    def __repr__(self):
        return (
            f"Safa(states={self.n_states}, initial={self.initial}, final={sorted(self.final)}, "
            f"transitions={len(self.transitions)})"
        )

    def outgoing(self, s: int) -> tuple[tuple[object, Pbf], ...]:
        return self._out[s]

    @property
    def guards(self) -> list:
        return [g for _, g, _ in self.transitions]

    def with_initial(self, initial: Pbf) -> "Safa":
        return Safa(self.algebra, self.n_states, initial, self.final, self.transitions, normal=self.normal)

    # -- semantics --------------------------------------------------------

    def is_final(self, p: Pbf) -> bool:
        """The final-state model applied to ``p`` (epsilon acceptance)."""
        return pbf.evaluate(self.final_mask, p)

    def delta_on_char(self, a: int, S: Iterable[int] | None = None):
        """Successor formulas of the states ``S`` on character ``a``.

        Returns ``(succ, cls)``: ``succ`` maps each state of ``S`` to the
        disjunction of targets whose guard contains ``a``; ``cls`` is the
        predicate of all characters that behave like ``a`` on ``S``.
        """
        alg = self.algebra
        member = alg.member
        cls = alg.top
        succ: dict[int, Pbf] = {}
        for s in sorted(range(self.n_states) if S is None else S):
            acc = FALSE
            for g, t in self._out[s]:
                if member(a, g):
                    cls = alg.and_(cls, g)
                    acc = pbf.disj(acc, t)
                else:
                    cls = alg.and_(cls, alg.not_(g))
            succ[s] = acc
        return succ, cls

    def successors(self, a: int, S: Iterable[int]) -> dict[int, Pbf]:
        member = self.algebra.member
        succ = {}
        for s in S:
            acc = FALSE
            for g, t in self._out[s]:
                if member(a, g):
                    acc = pbf.disj(acc, t)
            succ[s] = acc
        return succ

    def step(self, p: Pbf, a: int) -> Pbf:
        """Image of ``p`` under the transition function of ``a``."""
        return pbf.substitute(self.successors(a, sorted(pbf.states(p))), p)

    def run(self, p: Pbf, word: Sequence[int]) -> Pbf:
        for a in word:
            self.algebra.check_char(a)
            p = self.step(p, a)
        return p

    def accepts(self, word: Sequence[int], start: Pbf | None = None) -> bool:
        p = self.initial if start is None else start
        return self.is_final(self.run(p, word))

    def character_classes(self, S: Iterable[int] | None = None) -> list[tuple[object, int]]:
        """Witness/blocking enumeration of the classes of characters on ``S``."""
        alg = self.algebra
        S = sorted(range(self.n_states) if S is None else S)
        chars = alg.top
        out = []
        while alg.is_sat(chars):
            a = alg.witness(chars)
            _, cls = self.delta_on_char(a, S)
            chars = alg.and_(chars, alg.not_(cls))
            out.append((cls, a))
        return out


# ---------------------------------------------------------------------------
# Boolean operations


def _same_algebra(m1: Safa, m2: Safa) -> None:
    if m1.algebra is not m2.algebra:
        raise AlgebraError("automata are over different algebra instances")


def disjoint_union(m1: Safa, m2: Safa) -> tuple[Safa, int]:
    """Place ``m2`` after ``m1``; returns the combined automaton and the offset.

    The initial formula of the result is ``m1``'s; callers choose their own.
    """
    _same_algebra(m1, m2)
    off = m1.n_states
    trans = list(m1.transitions)
    trans.extend((s + off, g, pbf.shift(t, off)) for s, g, t in m2.transitions)
    final = set(m1.final) | {f + off for f in m2.final}
    return Safa(m1.algebra, m1.n_states + m2.n_states, m1.initial, final, trans), off


def union(m1: Safa, m2: Safa) -> Safa:
    both, off = disjoint_union(m1, m2)
    return both.with_initial(pbf.disj(m1.initial, pbf.shift(m2.initial, off)))


def intersection(m1: Safa, m2: Safa) -> Safa:
    both, off = disjoint_union(m1, m2)
    return both.with_initial(pbf.conj(m1.initial, pbf.shift(m2.initial, off)))


def intersect_all(ms: Sequence[Safa]) -> tuple[Safa, list[int]]:
    """Intersection of several automata plus each component's state offset."""
    if not ms:
        raise ValueError("need at least one automaton")
    alg = ms[0].algebra
    trans = []
    final = set()
    offsets = []
    initial = pbf.TRUE
    off = 0
    for m in ms:
        if m.algebra is not alg:
            raise AlgebraError("automata are over different algebra instances")
        offsets.append(off)
        trans.extend((s + off, g, pbf.shift(t, off)) for s, g, t in m.transitions)
        final.update(f + off for f in m.final)
        initial = pbf.conj(initial, pbf.shift(m.initial, off))
        off += m.n_states
    return Safa(alg, off, initial, final, trans), offsets


def is_normal(m: Safa) -> bool:
    """Every state's guards are pairwise disjoint and cover the domain."""
    alg = m.algebra
    for s in range(m.n_states):
        guards = [g for g, _ in m.outgoing(s)]
        for i in range(len(guards)):
            for j in range(i + 1, len(guards)):
                if alg.is_sat(alg.and_(guards[i], guards[j])):
                    return False
        if alg.is_sat(alg.not_(alg.disj(guards))):
            return False
    return True


def normalize(m: Safa) -> Safa:
    """Equivalent automaton whose per-state guards partition the domain.

    Characters matching none of a state's guards get an explicit transition
    to ``false``.
    """
    if m.normal:
        return m
    alg = m.algebra
    new = []
    for x in range(m.n_states):
        out = m.outgoing(x)
        chars = alg.top
        while alg.is_sat(chars):
            a = alg.witness(chars)
            target = FALSE
            cls = alg.top
            for g, q in out:
                if alg.member(a, g):
                    cls = alg.and_(cls, g)
                    target = pbf.disj(target, q)
                else:
                    cls = alg.and_(cls, alg.not_(g))
            chars = alg.and_(chars, alg.not_(cls))
            new.append((x, cls, target))
    return Safa(alg, m.n_states, m.initial, m.final, new, normal=True)


def complement(m: Safa) -> Safa:
    """Automaton for the complement language, by De Morganization."""
    n = normalize(m)
    final = set(range(n.n_states)) - n.final
    trans = [(s, g, pbf.dual(t)) for s, g, t in n.transitions]
    return Safa(n.algebra, n.n_states, pbf.dual(n.initial), final, trans, normal=True)


# ---------------------------------------------------------------------------
# Pruning


def productive_states(m: Safa) -> set[int]:
    """Over-approximation of the states with a nonempty language.

    Least fixpoint of: final states, plus states with a transition whose
    target holds when every productive state is set to true.  Everything
    outside the set provably accepts nothing.
    """
    good = set(m.final)
    changed = True
    while changed:
        changed = False
        mask = pbf.model_of(good)
        for s in range(m.n_states):
            if s not in good and any(pbf.evaluate(mask, t) for _, t in m.outgoing(s)):
                good.add(s)
                changed = True
    return good


def live_states(m: Safa, roots: Iterable[int] | None = None) -> set[int]:
    """States reachable from ``roots`` whose language may be nonempty."""
    if roots is None:
        roots = pbf.states(m.initial)
    succ: list[set[int]] = [set() for _ in range(m.n_states)]
    for s, _, t in m.transitions:
        for s2 in pbf.states(t):
            succ[s].add(s2)

    def closure(start, edges):
        seen = set(start)
        todo = deque(seen)
        while todo:
            s = todo.popleft()
            for s2 in edges[s]:
                if s2 not in seen:
                    seen.add(s2)
                    todo.append(s2)
        return seen

    return closure(roots, succ) & productive_states(m)


def prune_with_map(m: Safa, roots: Iterable[int] | None = None) -> tuple[Safa, dict[int, int]]:
    """Drop dead states and renumber the rest densely.

    Returns the pruned automaton and the old-to-new state map; removed states
    are replaced by ``false`` wherever they occurred.
    """
    keep = sorted(live_states(m, roots))
    mapping = {old: new for new, old in enumerate(keep)}
    trans = [
        (mapping[s], g, pbf.rename(t, mapping))
        for s, g, t in m.transitions
        if s in mapping
    ]
    final = [mapping[f] for f in m.final if f in mapping]
    pruned = Safa(m.algebra, len(keep), pbf.rename(m.initial, mapping), final, trans, normal=m.normal)
    return pruned, mapping


def prune(m: Safa) -> Safa:
    return prune_with_map(m)[0]


def reverse(m: Safa) -> Safa:
    """An automaton for the reversed language, via the reverse-DFA construction."""
    from .baseline import ReverseDfa

    return ReverseDfa(m).materialize().to_safa()
