"""Congruence closure of a relation on positive Boolean formulas, via SAT.

``p`` and ``q`` are congruent modulo ``R`` exactly when the conjunction of
biconditionals ``p_i <-> q_i`` over ``R`` entails ``p <-> q``.  The context
keeps that conjunction in an incremental solver; a closure query is an
unsatisfiability check of ``Phi(R) & (p xor q)`` under a throwaway selector
assumption.

Before the solver is consulted, a union-find over formula literals answers
queries that follow from ``R`` by reflexivity, symmetry and transitivity
alone.  Conversely, state assignments found by earlier satisfiable queries
are kept while they still satisfy every asserted pair; one that separates
the queried formulas refutes congruence without a solver call.  Only the
remaining queries reach SAT.
"""

from __future__ import annotations

from typing import Sequence

from . import pbf
from .pbf import AND_K, FALSE_K, OR_K, STATE_K, TRUE_K, Pbf
from .sat import make_solver


class CongruenceContext:
    """Incremental representation of ``Phi(R)`` for a growing relation ``R``.

    Formulas are Tseitin-encoded lazily: asserted pairs are queued and only
    reach the solver when a query cannot be settled by the union-find or the
    model pool.
    """

    MODEL_POOL = 32

    def __init__(self, backend: str = "auto"):
        self.solver = make_solver(backend)
        self._true = self.solver.new_var()
        self.solver.add_clause([self._true])
        self._lits: dict[int, int] = {}
        self._state_vars: dict[int, int] = {}
        self._keep: dict[int, Pbf] = {}
        self._pending: list[tuple[Pbf, Pbf]] = []
        self.pairs: list[tuple[Pbf, Pbf]] = []
        self.queries = 0
        self.shortcuts = 0
        self.model_hits = 0
        self._parent: dict[int, int] = {}
        # all states false, all states true; dropped once a pair disagrees on them
        self._models: list[int] = [0, -1]
        self._columns: dict[int, int] = {}

    def __len__(self):
        return len(self.pairs)

    def state_var(self, i: int) -> int:
        v = self._state_vars.get(i)
        if v is None:
            v = self.solver.new_var()
            self._state_vars[i] = v
        return v

    def literal(self, p: Pbf) -> int:
        """Solver literal equivalent to ``p`` (Tseitin, one variable per node)."""
        lit = self._lits.get(p.uid)
        if lit is not None:
            return lit
        solver = self.solver
        lits = self._lits
        for n in pbf.postorder(p):
            if n.uid in lits:
                continue
            k = n.kind
            if k == TRUE_K:
                lit = self._true
            elif k == FALSE_K:
                lit = -self._true
            elif k == STATE_K:
                lit = self.state_var(n.index)
            else:
                a, b = lits[n.left.uid], lits[n.right.uid]
                lit = solver.new_var()
                if k == AND_K:
                    solver.add_clause([-lit, a])
                    solver.add_clause([-lit, b])
                    solver.add_clause([lit, -a, -b])
                else:
                    solver.add_clause([lit, -a])
                    solver.add_clause([lit, -b])
                    solver.add_clause([-lit, a, b])
            lits[n.uid] = lit
        return lits[p.uid]

    def _find(self, p: Pbf) -> int:
        parent = self._parent
        x = p.uid
        if x not in parent:
            parent[x] = x
            # uids are never reused, but keep the formula alive with the context
            self._keep[x] = p
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while x != root:
            parent[x], x = root, parent[x]
        return root

    def assert_pair(self, p: Pbf, q: Pbf) -> None:
        self.pairs.append((p, q))
        if p is q:
            return
        ra, rb = self._find(p), self._find(q)
        if ra == rb:
            return
        self._parent[ra] = rb
        if self._models:
            diff = self._pool_values(p) ^ self._pool_values(q)
            if diff:
                self._set_models([m for j, m in enumerate(self._models) if not (diff >> j) & 1])
        self._pending.append((p, q))

    def _set_models(self, models: list[int]) -> None:
        self._models = models
        self._columns.clear()

    def _column(self, i: int) -> int:
        col = self._columns.get(i)
        if col is None:
            col = 0
            for j, m in enumerate(self._models):
                if (m >> i) & 1:
                    col |= 1 << j
            self._columns[i] = col
        return col

    def _pool_values(self, p: Pbf) -> int:
        """Bit ``j`` is the value of ``p`` in pooled model ``j``."""
        return pbf.evaluate_many(p, self._column, (1 << len(self._models)) - 1)

    def _flush(self) -> None:
        for p, q in self._pending:
            a, b = self.literal(p), self.literal(q)
            if a != b:
                self.solver.add_clause([-a, b])
                self.solver.add_clause([a, -b])
        self._pending.clear()

    def in_closure(self, p: Pbf, q: Pbf) -> bool:
        """True iff ``p`` and ``q`` are congruent modulo the asserted pairs."""
        return self.distinguishing_model(p, q) is None

    def distinguishing_model(self, p: Pbf, q: Pbf) -> int | None:
        """A state bitmask consistent with ``R`` that separates ``p`` and ``q``.

        ``None`` means ``p`` and ``q`` are congruent.  States that do not occur
        in ``R`` may take either value in the returned model; ``-1`` stands for
        the assignment making every state true.
        """
        if p is q or self._find(p) == self._find(q):
            if p is not q:
                self.shortcuts += 1
            return None
        if self._models:
            diff = self._pool_values(p) ^ self._pool_values(q)
            if diff:
                self.model_hits += 1
                return self._models[(diff & -diff).bit_length() - 1]
        self._flush()
        a, b = self.literal(p), self.literal(q)
        if a == b:
            return None
        self.queries += 1
        sel = self.solver.new_var()
        self.solver.add_clause([-sel, a, b])
        self.solver.add_clause([-sel, -a, -b])
        sat = self.solver.solve([sel])
        model = None
        if sat:
            model = 0
            for i, v in self._state_vars.items():
                if self.solver.model_value(v):
                    model |= 1 << i
            self._set_models((self._models + [model])[-self.MODEL_POOL:])
        self.solver.add_clause([-sel])
        return model


def congruent(pairs: Sequence[tuple[Pbf, Pbf]], p: Pbf, q: Pbf, backend: str = "auto") -> bool:
    """One-shot closure membership."""
    ctx = CongruenceContext(backend)
    for a, b in pairs:
        ctx.assert_pair(a, b)
    return ctx.in_closure(p, q)


def sat_to_congruence(cnf: Sequence[Sequence[int]], nvars: int | None = None):
    """Encode CNF satisfiability as a congruence question.

    Variables ``1..n`` become states ``0..n-1`` and their barred copies
    states ``n..2n-1``.  Returns ``(pairs, formula, nstates)`` such that the
    CNF is satisfiable iff ``formula`` is *not* congruent to ``false``
    modulo ``pairs``.
    """
    if nvars is None:
        nvars = max((abs(l) for c in cnf for l in c), default=0)
    pos = [pbf.var(i) for i in range(nvars)]
    neg = [pbf.var(nvars + i) for i in range(nvars)]
    pairs = []
    for i in range(nvars):
        pairs.append((pbf.conj(pos[i], neg[i]), pbf.FALSE))
        pairs.append((pbf.disj(pos[i], neg[i]), pbf.TRUE))
    formula = pbf.conj_all(
        pbf.disj_all(pos[l - 1] if l > 0 else neg[-l - 1] for l in clause) for clause in cnf
    )
    return pairs, formula, 2 * nvars


def satisfiable_by_congruence(cnf: Sequence[Sequence[int]], nvars: int | None = None) -> bool:
    pairs, formula, _ = sat_to_congruence(cnf, nvars)
    return not congruent(pairs, formula, pbf.FALSE)
