"""A small incremental CDCL SAT solver.

DIMACS-style literals: variable ``v >= 1`` is the literal ``v``, its negation
``-v``.  The solver supports adding clauses between calls and solving under
assumptions; learnt clauses are kept across calls since they are implied by
the clause database alone.

Two watched literals, first-UIP learning, VSIDS-style activities with a lazy
heap, phase saving and Luby restarts.  It is sized for the congruence
queries of an equivalence run (hundreds to tens of thousands of clauses).
"""

from __future__ import annotations

import heapq
from typing import Iterable, Sequence

try:
    # imported up front: engine runs may be interrupted by a timer, and an
    # interrupted import would be retried on every later run
    from pysat.solvers import Solver as _Backend
except ImportError:  # optional dependency
    _Backend = None


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class Solver:
    def __init__(self):
        self.nvars = 0
        # indexed by literal code (2*v for v, 2*v+1 for -v); 1 true, -1 false, 0 unassigned
        self._val: list[int] = [0, 0]
        self._watches: list[list[list[int]]] = [[], []]
        self._level: list[int] = [0]
        self._reason: list[list[int] | None] = [None]
        self._activity: list[float] = [0.0]
        self._phase: list[int] = [1]
        self._heap: list[tuple[float, int]] = []
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._inc = 1.0
        self._ok = True
        self._model: list[int] | None = None
        self.calls = 0
        self.conflicts = 0
        self.clause_count = 0

    # -- variables and clauses -------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        v = self.nvars
        self._val.extend((0, 0))
        self._watches.extend(([], []))
        self._level.append(0)
        self._reason.append(None)
        self._activity.append(0.0)
        self._phase.append(1)
        heapq.heappush(self._heap, (0.0, v))
        return v

    def _ensure(self, v: int) -> None:
        while self.nvars < v:
            self.new_var()

    @staticmethod
    def _code(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause at decision level 0.  Returns False once unsatisfiable."""
        if not self._ok:
            return False
        if self._trail_lim:
            self._backtrack(0)
        val = self._val
        seen = set()
        clause = []
        for lit in lits:
            if lit == 0:
                raise ValueError("literal 0 is not allowed")
            self._ensure(abs(lit))
            c = self._code(lit)
            if c in seen:
                continue
            if c ^ 1 in seen:
                return True
            v = val[c]
            if v == 1:
                return True
            if v == -1:
                continue
            seen.add(c)
            clause.append(c)
        self.clause_count += 1
        if not clause:
            self._ok = False
            return False
        if len(clause) == 1:
            self._assign(clause[0], None)
            if self._propagate() is not None:
                self._ok = False
            return self._ok
        self._watches[clause[0] ^ 1].append(clause)
        self._watches[clause[1] ^ 1].append(clause)
        return True

    # -- core -------------------------------------------------------------

    def _assign(self, code: int, reason) -> None:
        self._val[code] = 1
        self._val[code ^ 1] = -1
        v = code >> 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(code)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        val = self._val
        watches = self._watches
        trail = self._trail
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            # clauses watching ~p: p became true, so the literal p^1 became false
            ws = watches[p]
            false_lit = p ^ 1
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1], c[k] = lk, false_lit
                        watches[lk ^ 1].append(c)
                        found = True
                        break
                if found:
                    continue
                ws[j] = c
                j += 1
                if val[first] == -1:
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self._qhead = len(trail)
                    return c
                self._assign(first, c)
            del ws[j:]
        return None

    def _bump(self, v: int) -> None:
        act = self._activity
        act[v] += self._inc
        if act[v] > 1e100:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self._inc *= 1e-100
            self._heap = [(-act[i], i) for i in range(1, self.nvars + 1) if self._val[2 * i] == 0]
            heapq.heapify(self._heap)
            return
        if self._val[2 * v] == 0:
            heapq.heappush(self._heap, (-act[v], v))

    def _analyze(self, confl):
        level = self._level
        reason = self._reason
        trail = self._trail
        cur = len(self._trail_lim)
        seen = set()
        learnt = [0]
        pending = 0
        p = None
        idx = len(trail) - 1
        while True:
            for q in confl:
                if p is not None and q == p:
                    continue
                v = q >> 1
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if level[v] >= cur:
                        pending += 1
                    else:
                        learnt.append(q)
            while (trail[idx] >> 1) not in seen:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen.discard(p >> 1)
            pending -= 1
            if pending <= 0:
                break
        learnt[0] = p ^ 1
        # cheap minimisation: drop literals whose reason is subsumed by the clause
        in_clause = {q >> 1 for q in learnt}
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any((x >> 1) not in in_clause and level[x >> 1] > 0 for x in r if x != (q ^ 1)):
                kept.append(q)
        learnt = kept
        if len(learnt) == 1:
            bt = 0
        else:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        return learnt, bt

    def _backtrack(self, lvl: int) -> None:
        if len(self._trail_lim) <= lvl:
            return
        start = self._trail_lim[lvl]
        val = self._val
        act = self._activity
        heap = self._heap
        for code in self._trail[start:]:
            v = code >> 1
            self._phase[v] = code & 1
            val[code] = 0
            val[code ^ 1] = 0
            self._reason[v] = None
            heapq.heappush(heap, (-act[v], v))
        del self._trail[start:]
        del self._trail_lim[lvl:]
        self._qhead = len(self._trail)

    def _pick(self) -> int:
        heap = self._heap
        val = self._val
        while heap:
            _, v = heapq.heappop(heap)
            if val[2 * v] == 0:
                return 2 * v + self._phase[v]
        return -1

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """Satisfiability of the clause database conjoined with ``assumptions``."""
        self.calls += 1
        self._model = None
        if not self._ok:
            return False
        for lit in assumptions:
            self._ensure(abs(lit))
        if self._trail_lim:
            self._backtrack(0)
        if self._propagate() is not None:
            self._ok = False
            return False
        assume = [self._code(l) for l in assumptions]
        restart_no = 0
        budget = 100 * _luby(restart_no)
        conflicts_here = 0
        val = self._val
        while True:
            confl = self._propagate()
            if confl is not None:
                self.conflicts += 1
                conflicts_here += 1
                top = max(self._level[q >> 1] for q in confl)
                if top == 0:
                    self._ok = False
                    return False
                if top < len(self._trail_lim):
                    self._backtrack(top)
                learnt, bt = self._analyze(confl)
                # assumption levels are rebuilt by the decision loop below
                self._backtrack(bt)
                if len(learnt) == 1:
                    self._backtrack(0)
                    self._assign(learnt[0], None)
                else:
                    self._watches[learnt[0] ^ 1].append(learnt)
                    self._watches[learnt[1] ^ 1].append(learnt)
                    self._assign(learnt[0], learnt)
                self._inc *= 1.05
                continue
            if conflicts_here >= budget:
                restart_no += 1
                budget = conflicts_here + 100 * _luby(restart_no)
                self._backtrack(0)
                continue
            lvl = len(self._trail_lim)
            if lvl < len(assume):
                a = assume[lvl]
                if val[a] == -1:
                    self._backtrack(0)
                    return False
                self._trail_lim.append(len(self._trail))
                if val[a] == 0:
                    self._assign(a, None)
                continue
            code = self._pick()
            if code < 0:
                self._model = [0] + [1 if val[2 * v] == 1 else -1 for v in range(1, self.nvars + 1)]
                self._backtrack(0)
                return True
            self._trail_lim.append(len(self._trail))
            self._assign(code, None)

    def model_value(self, v: int) -> bool:
        if self._model is None:
            raise RuntimeError("no model available")
        return v < len(self._model) and self._model[v] == 1


class PysatSolver:
    """The :class:`Solver` interface on top of a python-sat backend."""

    def __init__(self, name: str = "minisat22"):
        if _Backend is None:
            raise RuntimeError("python-sat is not installed")
        self._backend = _Backend(name=name)
        self.name = name
        self.nvars = 0
        self._model: list[int] | None = None
        self.calls = 0
        self.clause_count = 0

    @property
    def conflicts(self) -> int:
        return self._backend.accum_stats().get("conflicts", 0)

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def add_clause(self, lits: Iterable[int]) -> bool:
        clause = list(lits)
        if 0 in clause:
            raise ValueError("literal 0 is not allowed")
        for lit in clause:
            if abs(lit) > self.nvars:
                self.nvars = abs(lit)
        self.clause_count += 1
        self._backend.add_clause(clause)
        return True

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        self.calls += 1
        for lit in assumptions:
            if abs(lit) > self.nvars:
                self.nvars = abs(lit)
        sat = self._backend.solve(assumptions=list(assumptions))
        self._model = None
        if sat:
            model = [0] * (self.nvars + 1)
            for lit in self._backend.get_model() or ():
                if abs(lit) <= self.nvars:
                    model[abs(lit)] = 1 if lit > 0 else -1
            self._model = model
        return bool(sat)

    def model_value(self, v: int) -> bool:
        if self._model is None:
            raise RuntimeError("no model available")
        return v < len(self._model) and self._model[v] == 1

    def __del__(self):
        backend = getattr(self, "_backend", None)
        if backend is not None:
            backend.delete()


BACKENDS = ("auto", "builtin", "pysat")


def have_pysat() -> bool:
    return _Backend is not None


def make_solver(backend: str = "auto"):
    """``builtin`` is the solver above; ``pysat`` needs python-sat; ``auto``
    prefers python-sat when it is importable."""
    if backend not in BACKENDS:
        raise ValueError(f"unknown SAT backend {backend!r}; expected one of {', '.join(BACKENDS)}")
    if backend == "pysat" or (backend == "auto" and have_pysat()):
        return PysatSolver()
    return Solver()
