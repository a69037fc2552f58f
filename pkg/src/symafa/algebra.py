"""Effective Boolean algebras over characters.

Two concrete algebras are provided:

* :class:`IntervalAlgebra` -- predicates are unions of closed integer
  intervals over ``0..max_char`` (Unicode codepoints by default).
* :class:`BitVectorAlgebra` -- predicates are reduced ordered BDDs over ``k``
  Boolean variables; characters are integers in ``0..2**k - 1`` where bit
  ``i`` is the value of variable ``i``.

Every predicate remembers the algebra instance that built it and the algebra
rejects operands created by a different instance.
"""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from typing import Iterable, Iterator, Sequence

MAX_CODEPOINT = 0x10FFFF


class AlgebraError(ValueError):
    """Raised on mixed-algebra operands or out-of-domain characters."""


class Algebra(ABC):
    """Interface shared by all character algebras.

    Subclasses implement the primitive connectives; :meth:`connect` and the
    convenience folds are built on top of them.
    """

    @property
    @abstractmethod
    def top(self): ...

    @property
    @abstractmethod
    def bot(self): ...

    @abstractmethod
    def and_(self, phi, psi): ...

    @abstractmethod
    def or_(self, phi, psi): ...

    @abstractmethod
    def not_(self, phi): ...

    @abstractmethod
    def is_sat(self, phi) -> bool: ...

    @abstractmethod
    def witness(self, phi) -> int:
        """Smallest character satisfying ``phi``."""

    @abstractmethod
    def member(self, a: int, phi) -> bool: ...

    @abstractmethod
    def in_domain(self, a: int) -> bool: ...

    @abstractmethod
    def parse(self, text: str): ...

    @abstractmethod
    def format(self, phi) -> str: ...

    @abstractmethod
    def describe(self) -> str:
        """Header fragment used by the automaton text format."""

    def connect(self, kind: str, phi, psi=None):
        if kind == "not":
            if psi is not None:
                raise AlgebraError("'not' takes a single operand")
            return self.not_(phi)
        if psi is None:
            raise AlgebraError(f"{kind!r} needs two operands")
        if kind == "and":
            return self.and_(phi, psi)
        if kind == "or":
            return self.or_(phi, psi)
        raise AlgebraError(f"unknown connective {kind!r}")

    def conj(self, preds: Iterable):
        out = self.top
        for p in preds:
            out = self.and_(out, p)
        return out

    def disj(self, preds: Iterable):
        out = self.bot
        for p in preds:
            out = self.or_(out, p)
        return out

    def is_valid(self, phi) -> bool:
        return not self.is_sat(self.not_(phi))

    def equivalent(self, phi, psi) -> bool:
        diff = self.or_(self.and_(phi, self.not_(psi)), self.and_(psi, self.not_(phi)))
        return not self.is_sat(diff)

    def check_char(self, a: int) -> None:
        if not self.in_domain(a):
            raise AlgebraError(f"character {a!r} outside domain of {self.describe()}")

    def _own(self, phi) -> None:
        if getattr(phi, "algebra", None) is not self:
            raise AlgebraError("predicate belongs to a different algebra instance")


# ---------------------------------------------------------------------------
# Intervals


class IntervalPredicate:
    """Canonical union of disjoint, non-adjacent closed intervals."""

    __slots__ = ("algebra", "intervals", "_hash")

    def __init__(self, algebra: "IntervalAlgebra", intervals: tuple[tuple[int, int], ...]):
        self.algebra = algebra
        self.intervals = intervals
        self._hash = hash((id(algebra), intervals))

    def __eq__(self, other):
        return (
            isinstance(other, IntervalPredicate)
            and other.algebra is self.algebra
            and other.intervals == self.intervals
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"IntervalPredicate({self.algebra.format(self)})"

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.intervals)


def _normalize_intervals(pairs: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for lo, hi in sorted(p for p in pairs if p[0] <= p[1]):
        if out and lo <= out[-1][1] + 1:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


class IntervalAlgebra(Algebra):
    """Unions of intervals over ``0..max_char``."""

    def __init__(self, max_char: int = MAX_CODEPOINT):
        if max_char < 0:
            raise AlgebraError("max_char must be non-negative")
        self.max_char = max_char
        self._top = IntervalPredicate(self, ((0, max_char),))
        self._bot = IntervalPredicate(self, ())

    def __repr__(self):
        return f"IntervalAlgebra(max_char={self.max_char})"

    @property
    def top(self):
        return self._top

    @property
    def bot(self):
        return self._bot

    def interval(self, lo: int, hi: int | None = None) -> IntervalPredicate:
        if hi is None:
            hi = lo
        lo, hi = max(lo, 0), min(hi, self.max_char)
        return self.make([(lo, hi)])

    def char(self, a: int) -> IntervalPredicate:
        self.check_char(a)
        return IntervalPredicate(self, ((a, a),))

    def make(self, pairs: Iterable[tuple[int, int]]) -> IntervalPredicate:
        clipped = [(max(lo, 0), min(hi, self.max_char)) for lo, hi in pairs]
        return IntervalPredicate(self, _normalize_intervals(clipped))

    def and_(self, phi, psi):
        self._own(phi)
        self._own(psi)
        a, b = phi.intervals, psi.intervals
        i = j = 0
        out = []
        while i < len(a) and j < len(b):
            lo = max(a[i][0], b[j][0])
            hi = min(a[i][1], b[j][1])
            if lo <= hi:
                out.append((lo, hi))
            if a[i][1] < b[j][1]:
                i += 1
            else:
                j += 1
        return IntervalPredicate(self, tuple(out))

    def or_(self, phi, psi):
        self._own(phi)
        self._own(psi)
        if not phi.intervals:
            return psi
        if not psi.intervals:
            return phi
        return IntervalPredicate(self, _normalize_intervals(phi.intervals + psi.intervals))

    def not_(self, phi):
        self._own(phi)
        out = []
        nxt = 0
        for lo, hi in phi.intervals:
            if lo > nxt:
                out.append((nxt, lo - 1))
            nxt = hi + 1
        if nxt <= self.max_char:
            out.append((nxt, self.max_char))
        return IntervalPredicate(self, tuple(out))

    def is_sat(self, phi) -> bool:
        self._own(phi)
        return bool(phi.intervals)

    def witness(self, phi) -> int:
        self._own(phi)
        if not phi.intervals:
            raise AlgebraError("witness() of an unsatisfiable predicate")
        return phi.intervals[0][0]

    def member(self, a: int, phi) -> bool:
        self._own(phi)
        self.check_char(a)
        for lo, hi in phi.intervals:
            if a < lo:
                return False
            if a <= hi:
                return True
        return False

    def in_domain(self, a) -> bool:
        return isinstance(a, int) and 0 <= a <= self.max_char

    def elements(self, phi) -> Iterator[int]:
        self._own(phi)
        for lo, hi in phi.intervals:
            yield from range(lo, hi + 1)

    _ITEM = re.compile(r"^(\d+|0x[0-9a-fA-F]+)(?:-(\d+|0x[0-9a-fA-F]+))?$")

    def parse(self, text: str) -> IntervalPredicate:
        """Parse ``[97-122]``, ``[48-57 65-90]``, ``[5]``, ``true`` or ``false``."""
        s = text.strip()
        if s == "true":
            return self.top
        if s == "false":
            return self.bot
        if not (s.startswith("[") and s.endswith("]")):
            raise AlgebraError(f"bad interval predicate {text!r}")
        pairs = []
        for item in s[1:-1].replace(",", " ").split():
            m = self._ITEM.match(item)
            if not m:
                raise AlgebraError(f"bad interval {item!r} in {text!r}")
            lo = int(m.group(1), 0)
            hi = int(m.group(2), 0) if m.group(2) else lo
            if lo > hi or hi > self.max_char:
                raise AlgebraError(f"interval {item!r} out of range 0..{self.max_char}")
            pairs.append((lo, hi))
        return self.make(pairs)

    def format(self, phi) -> str:
        self._own(phi)
        if phi == self._top:
            return "true"
        if not phi.intervals:
            return "false"
        parts = [str(lo) if lo == hi else f"{lo}-{hi}" for lo, hi in phi.intervals]
        return "[" + " ".join(parts) + "]"

    def describe(self) -> str:
        if self.max_char == MAX_CODEPOINT:
            return "algebra=interval"
        return f"algebra=interval max={self.max_char}"


# ---------------------------------------------------------------------------
# Bit vectors as ROBDDs


class BddNode:
    """A node in a :class:`BitVectorAlgebra` unique table.

    Terminals have ``var == nvars``.  Nodes are interned, so identity is
    semantic equality within one algebra.
    """

    __slots__ = ("algebra", "var", "lo", "hi", "uid")

    def __init__(self, algebra, var, lo, hi, uid):
        self.algebra = algebra
        self.var = var
        self.lo = lo
        self.hi = hi
        self.uid = uid

    def __repr__(self):
        return f"BddNode({self.algebra.format(self)})"


class BitVectorAlgebra(Algebra):
    """BDD predicates over ``k`` bits, variables ordered by declaration."""

    def __init__(self, atoms: Sequence[str] | int):
        if isinstance(atoms, int):
            atoms = [f"b{i}" for i in range(atoms)]
        self.atoms = tuple(atoms)
        if len(set(self.atoms)) != len(self.atoms):
            raise AlgebraError("duplicate atom names")
        self.k = len(self.atoms)
        self._index = {name: i for i, name in enumerate(self.atoms)}
        self._unique: dict[tuple[int, int, int], BddNode] = {}
        self._nodes: list[BddNode] = []
        self._false = self._new(self.k, None, None)
        self._true = self._new(self.k, None, None)
        self._and_cache: dict[tuple[int, int], BddNode] = {}
        self._or_cache: dict[tuple[int, int], BddNode] = {}
        self._not_cache: dict[int, BddNode] = {}

    def __repr__(self):
        return f"BitVectorAlgebra({list(self.atoms)})"

    def _new(self, var, lo, hi):
        node = BddNode(self, var, lo, hi, len(self._nodes))
        self._nodes.append(node)
        return node

    def _mk(self, var, lo, hi):
        if lo is hi:
            return lo
        key = (var, lo.uid, hi.uid)
        node = self._unique.get(key)
        if node is None:
            node = self._new(var, lo, hi)
            self._unique[key] = node
        return node

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def top(self):
        return self._true

    @property
    def bot(self):
        return self._false

    def var(self, name_or_index) -> BddNode:
        i = self._index[name_or_index] if isinstance(name_or_index, str) else name_or_index
        if not 0 <= i < self.k:
            raise AlgebraError(f"no variable {name_or_index!r}")
        return self._mk(i, self._false, self._true)

    def _apply(self, op, f, g):
        t, fl = self._true, self._false
        if op == "and":
            if f is fl or g is fl:
                return fl
            if f is t:
                return g
            if g is t or f is g:
                return f
            cache = self._and_cache
        else:
            if f is t or g is t:
                return t
            if f is fl:
                return g
            if g is fl or f is g:
                return f
            cache = self._or_cache
        key = (f.uid, g.uid) if f.uid < g.uid else (g.uid, f.uid)
        hit = cache.get(key)
        if hit is not None:
            return hit
        v = min(f.var, g.var)
        f0, f1 = (f.lo, f.hi) if f.var == v else (f, f)
        g0, g1 = (g.lo, g.hi) if g.var == v else (g, g)
        res = self._mk(v, self._apply(op, f0, g0), self._apply(op, f1, g1))
        cache[key] = res
        return res

    def and_(self, phi, psi):
        self._own(phi)
        self._own(psi)
        return self._apply("and", phi, psi)

    def or_(self, phi, psi):
        self._own(phi)
        self._own(psi)
        return self._apply("or", phi, psi)

    def not_(self, phi):
        self._own(phi)
        return self._neg(phi)

    def _neg(self, f):
        if f is self._true:
            return self._false
        if f is self._false:
            return self._true
        hit = self._not_cache.get(f.uid)
        if hit is None:
            hit = self._mk(f.var, self._neg(f.lo), self._neg(f.hi))
            self._not_cache[f.uid] = hit
        return hit

    def is_sat(self, phi) -> bool:
        self._own(phi)
        return phi is not self._false

    def member(self, a: int, phi) -> bool:
        self._own(phi)
        self.check_char(a)
        node = phi
        while node.var < self.k:
            node = node.hi if (a >> node.var) & 1 else node.lo
        return node is self._true

    def witness(self, phi) -> int:
        """Numerically smallest vector; bit ``k-1`` is the most significant."""
        self._own(phi)
        if phi is self._false:
            raise AlgebraError("witness() of an unsatisfiable predicate")
        fixed: dict[int, int] = {}
        for bit in range(self.k - 1, -1, -1):
            fixed[bit] = 0
            if not self._sat_under(phi, fixed, {}):
                fixed[bit] = 1
        return sum(v << b for b, v in fixed.items())

    def _sat_under(self, node, fixed, memo):
        if node is self._true:
            return True
        if node is self._false:
            return False
        hit = memo.get(node.uid)
        if hit is not None:
            return hit
        val = fixed.get(node.var)
        if val is None:
            res = self._sat_under(node.lo, fixed, memo) or self._sat_under(node.hi, fixed, memo)
        else:
            res = self._sat_under(node.hi if val else node.lo, fixed, memo)
        memo[node.uid] = res
        return res

    def in_domain(self, a) -> bool:
        return isinstance(a, int) and 0 <= a < (1 << self.k)

    def elements(self, phi) -> Iterator[int]:
        self._own(phi)
        for a in range(1 << self.k):
            if self.member(a, phi):
                yield a

    def valuation(self, a: int) -> frozenset[str]:
        """Atom names that are true in character ``a``."""
        self.check_char(a)
        return frozenset(n for i, n in enumerate(self.atoms) if (a >> i) & 1)

    def char_of(self, true_atoms: Iterable[str]) -> int:
        return sum(1 << self._index[n] for n in true_atoms)

    # -- text syntax -------------------------------------------------------

    _TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[&|!()]))")

    def parse(self, text: str) -> BddNode:
        """Parse a propositional term such as ``p & !(q | r)``."""
        toks = []
        pos = 0
        s = text.rstrip()
        while pos < len(s):
            m = self._TOKEN.match(s, pos)
            if not m:
                raise AlgebraError(f"unexpected character at {pos} in {text!r}")
            toks.append(m.group("id") or m.group("op"))
            pos = m.end()
        toks.append(None)
        i = 0

        def peek():
            return toks[i]

        def take():
            nonlocal i
            i += 1
            return toks[i - 1]

        def disj():
            node = conj()
            while peek() == "|":
                take()
                node = self._apply("or", node, conj())
            return node

        def conj():
            node = unary()
            while peek() == "&":
                take()
                node = self._apply("and", node, unary())
            return node

        def unary():
            t = take()
            if t == "!":
                return self._neg(unary())
            if t == "(":
                node = disj()
                if take() != ")":
                    raise AlgebraError(f"expected ')' in {text!r}")
                return node
            if t == "true":
                return self._true
            if t == "false":
                return self._false
            if t is None or t in "&|)":
                raise AlgebraError(f"unexpected {t!r} in {text!r}")
            if t not in self._index:
                raise AlgebraError(f"unknown atom {t!r}")
            return self.var(t)

        node = disj()
        if peek() is not None:
            raise AlgebraError(f"trailing input in {text!r}")
        return node

    def format(self, phi) -> str:
        """Render as a disjunction of cubes read off the BDD paths."""
        self._own(phi)
        if phi is self._true:
            return "true"
        if phi is self._false:
            return "false"
        cubes = []

        def walk(node, lits):
            if node is self._false:
                return
            if node is self._true:
                cubes.append(" & ".join(lits) if lits else "true")
                return
            name = self.atoms[node.var]
            walk(node.lo, lits + ["!" + name])
            walk(node.hi, lits + [name])

        walk(phi, [])
        if len(cubes) == 1:
            return cubes[0]
        return " | ".join(f"({c})" if "&" in c else c for c in cubes)

    def describe(self) -> str:
        return "algebra=bv atoms=" + ",".join(self.atoms)


def minterms(algebra: Algebra, guards: Sequence, care=None) -> list[tuple[object, int]]:
    """Enumerate the satisfiable Boolean combinations of ``guards``.

    Returns ``(class_predicate, witness)`` pairs whose predicates partition
    ``care`` (default: the whole domain).  Uses witness/blocking: pick the
    smallest remaining character, build its class from the guards it does and
    does not satisfy, then remove that class.
    """
    chars = algebra.top if care is None else care
    out = []
    while algebra.is_sat(chars):
        a = algebra.witness(chars)
        cls = algebra.top
        for g in guards:
            cls = algebra.and_(cls, g if algebra.member(a, g) else algebra.not_(g))
        chars = algebra.and_(chars, algebra.not_(cls))
        out.append((cls, a))
    return out
