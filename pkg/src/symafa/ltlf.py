"""LTL over finite traces: parsing, a reference evaluator, and translation to s-AFAs.

Formulas are kept in negation normal form with the operators ``X`` (strong
next), ``N`` (weak next), ``U`` (until) and ``R`` (release).  Derived forms
are rewritten while parsing: ``F f = true U f``, ``G f = false R f`` and
``a -> b = !a | b``.

The translation produces one automaton state per subformula that can occur
as an obligation, plus two helper states: ``more`` (accepts every nonempty
word) and ``end`` (accepts only the empty word).  Characters are bit vectors
with one bit per atom.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence

from . import pbf
from .algebra import BitVectorAlgebra
from .automaton import Safa
from .pbf import Pbf


class LtlfSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class Formula:
    """An interned NNF formula node; identity is structural equality."""

    __slots__ = ("op", "args", "name", "uid")
    _table: dict = {}

    def __new__(cls, op: str, *args: "Formula", name: str | None = None):
        key = (op, name, tuple(a.uid for a in args))
        node = cls._table.get(key)
        if node is None:
            node = object.__new__(cls)
            node.op = op
            node.args = args
            node.name = name
            node.uid = len(cls._table)
            cls._table[key] = node
        return node

    def __reduce__(self):
        return (parse, (str(self),))

    def __repr__(self):
        return f"Formula({self})"

    def __str__(self):
        op = self.op
        if op in ("true", "false"):
            return op
        if op == "atom":
            return self.name
        if op == "natom":
            return "!" + self.name
        if op in ("X", "N"):
            return f"{op} {_wrap(self.args[0])}"
        sym = {"and": " & ", "or": " | ", "U": " U ", "R": " R "}[op]
        return _wrap(self.args[0]) + sym + _wrap(self.args[1])

    @property
    def size(self) -> int:
        return 1 + sum(a.size for a in self.args)

    def subformulas(self) -> list["Formula"]:
        seen = {}
        stack = [self]
        while stack:
            f = stack.pop()
            if f.uid not in seen:
                seen[f.uid] = f
                stack.extend(f.args)
        return list(seen.values())

    def atoms(self) -> list[str]:
        """Atom names in order of first occurrence (left to right)."""
        out: list[str] = []

        def walk(f):
            if f.name is not None and f.name not in out:
                out.append(f.name)
            for a in f.args:
                walk(a)

        walk(self)
        return out

    def x_depth(self) -> int:
        inner = max((a.x_depth() for a in self.args), default=0)
        return inner + (1 if self.op in ("X", "N") else 0)


def _wrap(f: Formula) -> str:
    s = str(f)
    return s if f.op in ("true", "false", "atom", "natom") else f"({s})"


TRUE = Formula("true")
FALSE = Formula("false")


def atom(name: str) -> Formula:
    return Formula("atom", name=name)


def natom(name: str) -> Formula:
    return Formula("natom", name=name)


def And(a, b):
    return Formula("and", a, b)


def Or(a, b):
    return Formula("or", a, b)


def X(a):
    return Formula("X", a)


def N(a):
    return Formula("N", a)


def U(a, b):
    return Formula("U", a, b)


def R(a, b):
    return Formula("R", a, b)


def F(a):
    return U(TRUE, a)


def G(a):
    return R(FALSE, a)


def negate(f: Formula) -> Formula:
    """NNF of the negation of ``f``."""
    op = f.op
    if op == "true":
        return FALSE
    if op == "false":
        return TRUE
    if op == "atom":
        return natom(f.name)
    if op == "natom":
        return atom(f.name)
    if op == "and":
        return Or(negate(f.args[0]), negate(f.args[1]))
    if op == "or":
        return And(negate(f.args[0]), negate(f.args[1]))
    if op == "X":
        return N(negate(f.args[0]))
    if op == "N":
        return X(negate(f.args[0]))
    if op == "U":
        return R(negate(f.args[0]), negate(f.args[1]))
    if op == "R":
        return U(negate(f.args[0]), negate(f.args[1]))
    raise ValueError(op)


# ---------------------------------------------------------------------------
# Parser
#
# Precedence, loosest first: ->, |, &, U/R (right associative), unary ! X N F G.

_TOKEN = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_]*)|([!&|()]))")
_KEYWORDS = {"X", "N", "U", "R", "F", "G", "true", "false"}


def parse(text: str) -> Formula:
    toks: list[tuple[str, int]] = []
    pos = 0
    s = text.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise LtlfSyntaxError(f"unexpected character {s[pos:].lstrip()[:1]!r}", pos)
        toks.append((m.group(1) or m.group(2) or m.group(3), m.start(m.lastindex)))
        pos = m.end()
    toks.append(("<end>", len(s)))
    i = 0

    def peek():
        return toks[i][0]

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def implication():
        lhs = disjunction()
        if peek() == "->":
            take()
            return Or(negate(lhs), implication())
        return lhs

    def disjunction():
        node = conjunction()
        while peek() == "|":
            take()
            node = Or(node, conjunction())
        return node

    def conjunction():
        node = binary()
        while peek() == "&":
            take()
            node = And(node, binary())
        return node

    def binary():
        lhs = unary()
        if peek() in ("U", "R"):
            op = take()[0]
            rhs = binary()
            return U(lhs, rhs) if op == "U" else R(lhs, rhs)
        return lhs

    def unary():
        tok, at = take()
        if tok == "!":
            return negate(unary())
        if tok == "X":
            return X(unary())
        if tok == "N":
            return N(unary())
        if tok == "F":
            return F(unary())
        if tok == "G":
            return G(unary())
        if tok == "(":
            node = implication()
            if take()[0] != ")":
                raise LtlfSyntaxError("expected ')'", toks[i - 1][1])
            return node
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok[0].isalpha() or tok[0] == "_":
            if tok in _KEYWORDS:
                raise LtlfSyntaxError(f"operator {tok!r} used as an atom", at)
            return atom(tok)
        raise LtlfSyntaxError(f"unexpected {tok!r}", at)

    node = implication()
    if peek() != "<end>":
        raise LtlfSyntaxError(f"unexpected {peek()!r}", toks[i][1])
    return node


# ---------------------------------------------------------------------------
# Reference semantics


def holds(f: Formula, trace: Sequence[frozenset[str] | set[str]], i: int = 0) -> bool:
    """Direct finite-trace semantics at position ``i`` of a nonempty ``trace``."""
    n = len(trace)
    memo: dict[tuple[int, int], bool] = {}

    def ev(g: Formula, j: int) -> bool:
        key = (g.uid, j)
        if key in memo:
            return memo[key]
        op = g.op
        if op == "true":
            r = True
        elif op == "false":
            r = False
        elif op == "atom":
            r = g.name in trace[j]
        elif op == "natom":
            r = g.name not in trace[j]
        elif op == "and":
            r = ev(g.args[0], j) and ev(g.args[1], j)
        elif op == "or":
            r = ev(g.args[0], j) or ev(g.args[1], j)
        elif op == "X":
            r = j + 1 < n and ev(g.args[0], j + 1)
        elif op == "N":
            r = j + 1 >= n or ev(g.args[0], j + 1)
        elif op == "U":
            r = any(
                ev(g.args[1], k) and all(ev(g.args[0], l) for l in range(j, k))
                for k in range(j, n)
            )
        elif op == "R":
            r = all(
                ev(g.args[1], k) or any(ev(g.args[0], l) for l in range(j, k))
                for k in range(j, n)
            )
        else:
            raise ValueError(op)
        memo[key] = r
        return r

    if not 0 <= i < n:
        raise ValueError("position outside the trace")
    return ev(f, i)


def empty_value(f: Formula) -> bool:
    """Whether a state for ``f`` accepts the empty word."""
    op = f.op
    if op in ("true", "N", "R"):
        return True
    if op == "and":
        return empty_value(f.args[0]) and empty_value(f.args[1])
    if op == "or":
        return empty_value(f.args[0]) or empty_value(f.args[1])
    return False


# ---------------------------------------------------------------------------
# Translation


@dataclass
class LtlfAutomaton:
    formula: Formula
    safa: Safa
    algebra: BitVectorAlgebra
    states: list[Formula]
    more: int
    end: int

    @property
    def nonempty_initial(self) -> Pbf:
        """The initial formula restricted to nonempty traces."""
        return pbf.conj(self.safa.initial, pbf.var(self.more))

    def trace_of(self, word: Sequence[int]) -> list[frozenset[str]]:
        return [self.algebra.valuation(a) for a in word]

    def word_of(self, trace: Sequence[set[str] | frozenset[str]]) -> list[int]:
        return [self.algebra.char_of(step) for step in trace]


def translate(
    f: Formula, atoms: Sequence[str] | None = None, algebra: BitVectorAlgebra | None = None
) -> LtlfAutomaton:
    """Build the automaton of ``f``.

    The bit-vector alphabet has one bit per atom: ``atoms`` if given, else the
    atoms of ``f`` in order of first occurrence.  Passing ``algebra`` reuses an
    existing instance so that automata of several formulas can be combined.
    """
    if algebra is not None:
        alg = algebra
        missing = [a for a in f.atoms() if a not in alg.atoms]
        if missing:
            raise ValueError(f"atoms {missing} are not in the given algebra")
    else:
        alg = BitVectorAlgebra(list(atoms) if atoms is not None else f.atoms())
    index: dict[int, int] = {}
    order: list[Formula] = []

    def state(g: Formula) -> int:
        if g.uid not in index:
            index[g.uid] = len(order)
            order.append(g)
        return index[g.uid]

    # The helper states are numbered after the subformula states, which are
    # only known once the worklist is exhausted, so targets are first built
    # as nested tuples over ('s', i), ('more',) and ('end',).
    memo: dict[int, list[tuple[object, tuple]]] = {}

    def product(xs, ys):
        out = {}
        for g1, t1 in xs:
            for g2, t2 in ys:
                g = alg.and_(g1, g2)
                if alg.is_sat(g):
                    t = _and(t1, t2)
                    out[t] = alg.or_(out[t], g) if t in out else g
        return [(g, t) for t, g in out.items()]

    def concat(xs, ys):
        out = {}
        for g, t in list(xs) + list(ys):
            out[t] = alg.or_(out[t], g) if t in out else g
        return [(g, t) for t, g in out.items()]

    def delta(g: Formula):
        hit = memo.get(g.uid)
        if hit is not None:
            return hit
        op = g.op
        if op == "true":
            r = [(alg.top, ("true",))]
        elif op == "false":
            r = []
        elif op == "atom":
            r = [(alg.var(g.name), ("true",))]
        elif op == "natom":
            r = [(alg.not_(alg.var(g.name)), ("true",))]
        elif op == "and":
            r = product(delta(g.args[0]), delta(g.args[1]))
        elif op == "or":
            r = concat(delta(g.args[0]), delta(g.args[1]))
        elif op == "X":
            r = [(alg.top, ("and", ("s", state(g.args[0])), ("more",)))]
        elif op == "N":
            r = [(alg.top, ("or", ("s", state(g.args[0])), ("end",)))]
        elif op == "U":
            me = ("s", state(g))
            r = concat(delta(g.args[1]), [(c, _and(t, me)) for c, t in delta(g.args[0])])
        elif op == "R":
            me = ("s", state(g))
            r = product(delta(g.args[1]), concat(delta(g.args[0]), [(alg.top, me)]))
        else:
            raise ValueError(op)
        memo[g.uid] = r
        return r

    root = state(f)
    done = 0
    while done < len(order):
        delta(order[done])
        done += 1
    n = len(order)
    more, end = n, n + 1

    cache: dict[tuple, Pbf] = {}

    def build(t) -> Pbf:
        if t in cache:
            return cache[t]
        kind = t[0]
        if kind == "true":
            r = pbf.TRUE
        elif kind == "false":
            r = pbf.FALSE
        elif kind == "s":
            r = pbf.var(t[1])
        elif kind == "more":
            r = pbf.var(more)
        elif kind == "end":
            r = pbf.var(end)
        elif kind == "and":
            r = pbf.conj(build(t[1]), build(t[2]))
        else:
            r = pbf.disj(build(t[1]), build(t[2]))
        cache[t] = r
        return r

    trans = []
    for i, g in enumerate(order):
        for guard, t in delta(g):
            trans.append((i, guard, build(t)))
    trans.append((more, alg.top, pbf.TRUE))
    trans.append((end, alg.top, pbf.FALSE))
    final = [i for i, g in enumerate(order) if empty_value(g)] + [end]
    safa = Safa(alg, n + 2, pbf.var(root), final, trans)
    return LtlfAutomaton(f, safa, alg, order, more, end)


def _and(t1, t2):
    if t1 == ("true",):
        return t2
    if t2 == ("true",):
        return t1
    return ("and", t1, t2)


def ltlf_to_safa(f: Formula | str) -> Safa:
    if isinstance(f, str):
        f = parse(f)
    return translate(f).safa


def format_trace(trace: Sequence[frozenset[str]]) -> str:
    return " ".join("{" + ",".join(sorted(step)) + "}" for step in trace)


# ---------------------------------------------------------------------------
# Random formulas


_UNARY = ("X", "N")
_BINARY = ("and", "or", "U", "R")


def random_formula(rng: random.Random, size: int, atoms: Sequence[str]) -> Formula:
    """A random NNF formula with exactly ``size`` nodes."""
    if size <= 1:
        r = rng.random()
        if r < 0.08:
            return TRUE
        if r < 0.12:
            return FALSE
        name = rng.choice(list(atoms))
        return atom(name) if rng.random() < 0.6 else natom(name)
    if size == 2 or rng.random() < 0.3:
        op = rng.choice(_UNARY)
        return Formula(op, random_formula(rng, size - 1, atoms))
    op = rng.choice(_BINARY)
    left = rng.randint(1, size - 2)
    return Formula(op, random_formula(rng, left, atoms), random_formula(rng, size - 1 - left, atoms))
