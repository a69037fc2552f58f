"""Hash-consed positive Boolean formulas over automaton states.

Formulas are immutable DAG nodes built only through the constructors in this
module (:func:`var`, :func:`conj`, :func:`disj`, :data:`TRUE`,
:data:`FALSE`).  Structurally equal formulas are the same Python object, so
``p is q`` is the structural equality test.  Constructors apply only the local
unit, annihilator and idempotence laws.

A *model* is an ``int`` bitmask: bit ``i`` is the truth value of state ``i``.
"""

from __future__ import annotations

import itertools
import re
import threading
import weakref
from typing import Callable, Iterable, Mapping

TRUE_K, FALSE_K, STATE_K, AND_K, OR_K = range(5)
_KIND_NAMES = ("true", "false", "state", "and", "or")


class Pbf:
    __slots__ = ("kind", "left", "right", "index", "uid", "_size", "_states", "__weakref__")

    def __init__(self, kind, left, right, index, uid):
        self.kind = kind
        self.left = left
        self.right = right
        self.index = index
        self.uid = uid
        self._size = None
        self._states = None

    def __reduce__(self):
        return (_rebuild, (to_str(self),))

    def __repr__(self):
        return f"Pbf({to_str(self)})"

    def __str__(self):
        return to_str(self)

    # Operators are a convenience for tests and scripts.
    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __lt__(self, other):
        return self.uid < other.uid

    @property
    def kind_name(self) -> str:
        return _KIND_NAMES[self.kind]


_lock = threading.Lock()
_uids = itertools.count()
_table: "weakref.WeakValueDictionary[tuple, Pbf]" = weakref.WeakValueDictionary()

TRUE = Pbf(TRUE_K, None, None, -1, next(_uids))
FALSE = Pbf(FALSE_K, None, None, -1, next(_uids))
TRUE._size = FALSE._size = 1
TRUE._states = FALSE._states = frozenset()


def _intern(key, kind, left, right, index):
    node = _table.get(key)
    if node is not None:
        return node
    with _lock:
        node = _table.get(key)
        if node is None:
            node = Pbf(kind, left, right, index, next(_uids))
            _table[key] = node
        return node


def var(i: int) -> Pbf:
    if i < 0:
        raise ValueError(f"state index must be non-negative, got {i}")
    return _intern((STATE_K, i), STATE_K, None, None, i)


def conj(p: Pbf, q: Pbf) -> Pbf:
    if p is FALSE or q is FALSE:
        return FALSE
    if p is TRUE:
        return q
    if q is TRUE or p is q:
        return p
    return _intern((AND_K, p.uid, q.uid), AND_K, p, q, -1)


def disj(p: Pbf, q: Pbf) -> Pbf:
    if p is TRUE or q is TRUE:
        return TRUE
    if p is FALSE:
        return q
    if q is FALSE or p is q:
        return p
    return _intern((OR_K, p.uid, q.uid), OR_K, p, q, -1)


def make(kind: str, *operands) -> Pbf:
    """Build a node by kind name: ``true``, ``false``, ``state``, ``and``, ``or``."""
    if kind == "true":
        return TRUE
    if kind == "false":
        return FALSE
    if kind == "state":
        (i,) = operands
        return var(i)
    if kind == "and":
        return conj_all(operands)
    if kind == "or":
        return disj_all(operands)
    raise ValueError(f"unknown kind {kind!r}")


def conj_all(ps: Iterable[Pbf]) -> Pbf:
    out = TRUE
    for p in ps:
        out = conj(out, p)
    return out


def disj_all(ps: Iterable[Pbf]) -> Pbf:
    out = FALSE
    for p in ps:
        out = disj(out, p)
    return out


def postorder(p: Pbf) -> list[Pbf]:
    """Distinct nodes of ``p``, children before parents."""
    out = []
    seen = set()
    stack = [(p, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(node)
            continue
        if node.uid in seen:
            continue
        seen.add(node.uid)
        stack.append((node, True))
        if node.kind >= AND_K:
            if node.right.uid not in seen:
                stack.append((node.right, False))
            if node.left.uid not in seen:
                stack.append((node.left, False))
    return out


def size(p: Pbf) -> int:
    """Number of distinct DAG nodes."""
    if p._size is None:
        p._size = len(postorder(p))
    return p._size


def states(p: Pbf) -> frozenset[int]:
    if p._states is None:
        if p.kind == STATE_K:
            p._states = frozenset((p.index,))
        else:
            p._states = frozenset(n.index for n in postorder(p) if n.kind == STATE_K)
    return p._states


def evaluate(model: int, p: Pbf) -> bool:
    """Value of ``p`` under the model given as a state bitmask."""
    k = p.kind
    if k == STATE_K:
        return bool((model >> p.index) & 1)
    if k <= FALSE_K:
        return k == TRUE_K
    val: dict[int, bool] = {}
    for n in postorder(p):
        k = n.kind
        if k == STATE_K:
            v = bool((model >> n.index) & 1)
        elif k == AND_K:
            v = val[n.left.uid] and val[n.right.uid]
        elif k == OR_K:
            v = val[n.left.uid] or val[n.right.uid]
        else:
            v = k == TRUE_K
        val[n.uid] = v
    return val[p.uid]


def evaluate_many(p: Pbf, column, full: int) -> int:
    """Evaluate ``p`` under many models at once.

    Bit ``j`` of ``column(i)`` is the value of state ``i`` in model ``j``;
    ``full`` has one bit set per model.  Returns the mask of models in which
    ``p`` holds.
    """
    k = p.kind
    if k == STATE_K:
        return column(p.index)
    if k <= FALSE_K:
        return full if k == TRUE_K else 0
    val: dict[int, int] = {}
    for n in postorder(p):
        k = n.kind
        if k == STATE_K:
            v = column(n.index)
        elif k == AND_K:
            v = val[n.left.uid] & val[n.right.uid]
        elif k == OR_K:
            v = val[n.left.uid] | val[n.right.uid]
        else:
            v = full if k == TRUE_K else 0
        val[n.uid] = v
    return val[p.uid]


def model_of(true_states: Iterable[int]) -> int:
    m = 0
    for i in true_states:
        m |= 1 << i
    return m


def substitute(sigma: Mapping[int, Pbf] | Callable[[int], Pbf], p: Pbf) -> Pbf:
    """Homomorphic image of ``p`` replacing each state ``i`` by ``sigma[i]``."""
    get = sigma if callable(sigma) else sigma.__getitem__
    k = p.kind
    if k == STATE_K:
        return get(p.index)
    if k <= FALSE_K:
        return p
    img: dict[int, Pbf] = {}
    for n in postorder(p):
        k = n.kind
        if k == STATE_K:
            r = get(n.index)
        elif k == AND_K:
            r = conj(img[n.left.uid], img[n.right.uid])
        elif k == OR_K:
            r = disj(img[n.left.uid], img[n.right.uid])
        else:
            r = n
        img[n.uid] = r
    return img[p.uid]


def shift(p: Pbf, offset: int) -> Pbf:
    if offset == 0:
        return p
    return substitute(lambda i: var(i + offset), p)


def rename(p: Pbf, mapping: Mapping[int, int | None]) -> Pbf:
    """Rename states; states mapped to ``None`` become ``false``."""
    def sub(i):
        j = mapping.get(i)
        return FALSE if j is None else var(j)

    return substitute(sub, p)


def dual(p: Pbf) -> Pbf:
    """Swap conjunction with disjunction and ``true`` with ``false``."""
    if p.kind == STATE_K:
        return p
    img: dict[int, Pbf] = {}
    for n in postorder(p):
        k = n.kind
        if k == STATE_K:
            r = n
        elif k == AND_K:
            r = disj(img[n.left.uid], img[n.right.uid])
        elif k == OR_K:
            r = conj(img[n.left.uid], img[n.right.uid])
        else:
            r = FALSE if k == TRUE_K else TRUE
        img[n.uid] = r
    return img[p.uid]


# ---------------------------------------------------------------------------
# Text syntax: ``q0 & (q1 | q2)``, ``0 & 1``, ``true``, ``false``.


def to_str(p: Pbf, names: Mapping[int, str] | None = None) -> str:
    def name(i):
        return names[i] if names is not None else str(i)

    memo: dict[int, tuple[str, int]] = {}
    # precedence: 0 = or, 1 = and, 2 = atom
    for n in postorder(p):
        k = n.kind
        if k == TRUE_K:
            memo[n.uid] = ("true", 2)
        elif k == FALSE_K:
            memo[n.uid] = ("false", 2)
        elif k == STATE_K:
            memo[n.uid] = (name(n.index), 2)
        else:
            prec = 1 if k == AND_K else 0
            op = " & " if k == AND_K else " | "
            parts = []
            for side, child in enumerate((n.left, n.right)):
                s, cp = memo[child.uid]
                # parse is left-associative, so a right operand of the same
                # connective keeps its parentheses
                bare = cp == 2 or (cp == prec and side == 0)
                parts.append(s if bare else f"({s})")
            memo[n.uid] = (op.join(parts), prec)
    return memo[p.uid][0]


class PbfSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z0-9_']+)|(?P<op>[&|()]))")


def parse(text: str, names: Mapping[str, int] | None = None) -> Pbf:
    """Parse a formula; atoms are integers or names looked up in ``names``.

    Without ``names``, identifiers of the form ``q<digits>`` are read as
    state indices too.
    """
    toks = []
    pos = 0
    s = text.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise PbfSyntaxError(f"unexpected character at column {pos + 1}: {text!r}")
        toks.append((m.group("id") or m.group("op"), m.start()))
        pos = m.end()
    toks.append((None, len(s)))
    i = 0

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def atom(tok, col):
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if names is not None and tok in names:
            return var(names[tok])
        if tok.isdigit():
            return var(int(tok))
        if names is None and tok[0] == "q" and tok[1:].isdigit():
            return var(int(tok[1:]))
        raise PbfSyntaxError(f"unknown state {tok!r} at column {col + 1}")

    def disj_():
        node = conj_()
        while toks[i][0] == "|":
            take()
            node = disj(node, conj_())
        return node

    def conj_():
        node = unit()
        while toks[i][0] == "&":
            take()
            node = conj(node, unit())
        return node

    def unit():
        tok, col = take()
        if tok == "(":
            node = disj_()
            if take()[0] != ")":
                raise PbfSyntaxError(f"expected ')' in {text!r}")
            return node
        if tok is None or tok in "&|)":
            raise PbfSyntaxError(f"unexpected {tok!r} at column {col + 1} in {text!r}")
        return atom(tok, col)

    node = disj_()
    if toks[i][0] is not None:
        raise PbfSyntaxError(f"trailing input at column {toks[i][1] + 1} in {text!r}")
    return node


def _rebuild(text):
    return parse(text)
