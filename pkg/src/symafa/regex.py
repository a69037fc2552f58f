"""Regular expressions to symbolic automata over the interval algebra.

Supported syntax: literals and escapes (``\\d \\w \\s`` and their negations,
``\\n \\t \\r \\f \\v``, ``\\xHH``, ``\\uHHHH``, ``\\UHHHHHHHH``, escaped
punctuation), classes ``[a-z_]`` / ``[^...]``, ``.`` (any character,
including newline), concatenation, ``|``, groups ``(...)``, ``(?:...)`` and
``(?P<name>...)``, and the quantifiers ``* + ? {m} {m,} {,n} {m,n}`` with an
optional lazy ``?`` suffix.  Matching is against the whole string; a ``^`` at
the start or a ``$`` at the end of a top-level branch is accepted and
ignored.  Backreferences, lookaround, word boundaries and inline flags are
rejected.

The character classes agree with Python's :mod:`re` under
``re.ASCII | re.DOTALL``.
"""

from __future__ import annotations

import re as _re
from dataclasses import dataclass
from typing import Sequence

from . import pbf
from .algebra import MAX_CODEPOINT, IntervalAlgebra
from .automaton import Safa, intersect_all
from .baseline import Sfa

PYTHON_FLAGS = _re.ASCII | _re.DOTALL


class RegexError(ValueError):
    def __init__(self, message: str, pattern: str, pos: int):
        self.pattern = pattern
        self.pos = pos
        super().__init__(f"{message} at position {pos} in {pattern!r}")


# ---------------------------------------------------------------------------
# Syntax tree


@dataclass(frozen=True)
class Chars:
    intervals: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Concat:
    items: tuple


@dataclass(frozen=True)
class Alt:
    items: tuple


@dataclass(frozen=True)
class Star:
    item: object


@dataclass(frozen=True)
class Plus:
    item: object


@dataclass(frozen=True)
class Opt:
    item: object


def _norm(pairs) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for lo, hi in sorted(pairs):
        if out and lo <= out[-1][1] + 1:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return tuple((lo, hi) for lo, hi in out)


def _negate(pairs, top=MAX_CODEPOINT) -> tuple[tuple[int, int], ...]:
    out = []
    nxt = 0
    for lo, hi in _norm(pairs):
        if lo > nxt:
            out.append((nxt, lo - 1))
        nxt = hi + 1
    if nxt <= top:
        out.append((nxt, top))
    return tuple(out)


_DIGIT = ((48, 57),)
_WORD = ((48, 57), (65, 90), (95, 95), (97, 122))
_SPACE = ((9, 13), (32, 32))
_CLASS_ESCAPES = {
    "d": _DIGIT,
    "w": _WORD,
    "s": _SPACE,
    "D": _negate(_DIGIT),
    "W": _negate(_WORD),
    "S": _negate(_SPACE),
}
_CONTROL = {"n": 10, "t": 9, "r": 13, "f": 12, "v": 11, "a": 7}
_HEX_LEN = {"x": 2, "u": 4, "U": 8}
ANY = Chars(((0, MAX_CODEPOINT),))
_COUNTED = _re.compile(r"\{(\d*)(,?)(\d*)\}")


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, pattern: str):
        self.s = pattern
        self.i = 0

    def error(self, msg, pos=None):
        raise RegexError(msg, self.s, self.i if pos is None else pos)

    def peek(self, k=0):
        j = self.i + k
        return self.s[j] if j < len(self.s) else None

    def parse(self):
        node = self.alternation(top=True)
        if self.i < len(self.s):
            self.error("unbalanced ')'")
        return node

    def alternation(self, top=False):
        branches = [self.branch(top)]
        while self.peek() == "|":
            self.i += 1
            branches.append(self.branch(top))
        return branches[0] if len(branches) == 1 else Alt(tuple(branches))

    def branch(self, top):
        items = []
        if top and self.peek() == "^":
            self.i += 1
        while self.i < len(self.s) and self.peek() not in "|)":
            if top and self.peek() == "$" and self.peek(1) in (None, "|"):
                self.i += 1
                break
            items.append(self.quantified())
        if not items:
            return Epsilon()
        return items[0] if len(items) == 1 else Concat(tuple(items))

    def quantified(self):
        node = self.atom()
        c = self.peek()
        if c in ("*", "+", "?"):
            self.i += 1
            node = {"*": Star, "+": Plus, "?": Opt}[c](node)
        elif c == "{":
            bounds = self.counted()
            if bounds is None:
                return node
            node = _repeat(node, *bounds)
        else:
            return node
        if self.peek() == "?":
            self.i += 1  # lazy: same language under full matching
        if self.peek() in ("*", "+", "?") or (self.peek() == "{" and self._counted_ahead()):
            self.error("multiple repeat")
        return node

    def _counted_ahead(self):
        m = _COUNTED.match(self.s, self.i)
        return bool(m and (m.group(1) or m.group(2)))

    def counted(self):
        m = _COUNTED.match(self.s, self.i)
        if not m or (not m.group(1) and not m.group(2)):
            return None  # literal '{', as in Python
        lo = int(m.group(1)) if m.group(1) else 0
        if m.group(2):
            hi = int(m.group(3)) if m.group(3) else None
        else:
            hi = lo
        if hi is not None and hi < lo:
            self.error("min repeat greater than max repeat")
        self.i = m.end()
        return lo, hi

    def atom(self):
        c = self.peek()
        at = self.i
        if c == "(":
            self.i += 1
            if self.peek() == "?":
                nxt = self.s[self.i + 1 : self.i + 3]
                if nxt.startswith(":"):
                    self.i += 2
                elif nxt == "P<":
                    end = self.s.find(">", self.i)
                    if end < 0:
                        self.error("unterminated group name")
                    self.i = end + 1
                elif nxt.startswith(("=", "!")) or nxt in ("<=", "<!"):
                    self.error("lookaround is not supported", at)
                elif nxt == "P=":
                    self.error("backreferences are not supported", at)
                else:
                    self.error("unsupported group syntax", at)
            node = self.alternation()
            if self.peek() != ")":
                self.error("missing ')'", at)
            self.i += 1
            return node
        if c in ("*", "+", "?"):
            self.error("nothing to repeat")
        if c == "[":
            return Chars(self.char_class())
        if c == ".":
            self.i += 1
            return ANY
        if c == "^" or c == "$":
            self.error(f"anchor {c!r} is only supported at the ends of the pattern")
        if c == "\\":
            got = self.escape(in_class=False)
            return Chars(got if isinstance(got, tuple) else ((got, got),))
        self.i += 1
        return Chars(((ord(c), ord(c)),))

    def escape(self, in_class):
        """Parse an escape; returns a codepoint or a tuple of intervals."""
        at = self.i
        self.i += 1
        c = self.peek()
        if c is None:
            self.error("trailing backslash", at)
        self.i += 1
        if c in _CLASS_ESCAPES:
            return _CLASS_ESCAPES[c]
        if c in _CONTROL:
            return _CONTROL[c]
        if c in _HEX_LEN:
            digits = self.s[self.i : self.i + _HEX_LEN[c]]
            if len(digits) != _HEX_LEN[c] or not all(d in "0123456789abcdefABCDEF" for d in digits):
                self.error(f"bad \\{c} escape", at)
            self.i += _HEX_LEN[c]
            value = int(digits, 16)
            if value > MAX_CODEPOINT:
                self.error("codepoint out of range", at)
            return value
        if c == "0":
            return 0
        if c.isdigit():
            self.error("backreferences are not supported", at)
        if c == "b" and in_class:
            return 8
        if c.isalnum():
            self.error(f"unsupported escape \\{c}", at)
        return ord(c)

    def char_class(self):
        at = self.i
        self.i += 1
        negated = False
        if self.peek() == "^":
            negated = True
            self.i += 1
        pairs: list[tuple[int, int]] = []
        first = True
        while True:
            c = self.peek()
            if c is None:
                self.error("unterminated character set", at)
            if c == "]" and not first:
                self.i += 1
                break
            first = False
            lo = self.class_item()
            if isinstance(lo, tuple):
                pairs.extend(lo)
                continue
            if self.peek() == "-" and self.peek(1) not in ("]", None):
                self.i += 1
                hi = self.class_item()
                if isinstance(hi, tuple):
                    self.error("bad character range", at)
                if hi < lo:
                    self.error("bad character range", at)
                pairs.append((lo, hi))
            else:
                pairs.append((lo, lo))
        pairs = _norm(pairs)
        return _negate(pairs) if negated else pairs

    def class_item(self):
        c = self.peek()
        if c == "\\":
            return self.escape(in_class=True)
        self.i += 1
        return ord(c)


def _repeat(node, lo, hi):
    items = [node] * lo
    if hi is None:
        items.append(Star(node))
    else:
        opt = None
        for _ in range(hi - lo):
            opt = Opt(node if opt is None else Concat((node, opt)))
        if opt is not None:
            items.append(opt)
    if not items:
        return Epsilon()
    return items[0] if len(items) == 1 else Concat(tuple(items))


def parse(pattern: str):
    """Parse ``pattern`` into a syntax tree."""
    return _Parser(pattern).parse()


# ---------------------------------------------------------------------------
# Construction


def regex_to_sfa(pattern, algebra: IntervalAlgebra | None = None) -> Sfa:
    """Thompson construction, epsilon elimination and trimming.

    ``pattern`` may be a string or a parsed tree.  The result may be
    nondeterministic; its only initial state is 0.
    """
    alg = algebra if algebra is not None else IntervalAlgebra()
    tree = parse(pattern) if isinstance(pattern, str) else pattern
    eps: list[list[int]] = []
    edges: list[list[tuple[object, int]]] = []
    preds: dict[tuple, object] = {}

    def new():
        eps.append([])
        edges.append([])
        return len(eps) - 1

    def pred(intervals):
        p = preds.get(intervals)
        if p is None:
            clipped = [(lo, min(hi, alg.max_char)) for lo, hi in intervals if lo <= alg.max_char]
            p = preds[intervals] = alg.make(clipped)
        return p

    def build(node):
        s, e = new(), new()
        if isinstance(node, Chars):
            edges[s].append((pred(node.intervals), e))
        elif isinstance(node, Epsilon):
            eps[s].append(e)
        elif isinstance(node, Concat):
            cur = s
            for item in node.items:
                a, b = build(item)
                eps[cur].append(a)
                cur = b
            eps[cur].append(e)
        elif isinstance(node, Alt):
            for item in node.items:
                a, b = build(item)
                eps[s].append(a)
                eps[b].append(e)
        elif isinstance(node, (Star, Plus, Opt)):
            a, b = build(node.item)
            eps[s].append(a)
            eps[b].append(e)
            if not isinstance(node, Opt):
                eps[b].append(a)
            if not isinstance(node, Plus):
                eps[s].append(e)
        else:
            raise TypeError(node)
        return s, e

    start, end = build(tree)

    def closure(q):
        seen = {q}
        stack = [q]
        while stack:
            x = stack.pop()
            for y in eps[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    # Keep the start state and every target of a character edge.
    index = {start: 0}
    order = [start]
    trans = []
    final = []
    k = 0
    while k < len(order):
        q = order[k]
        cl = closure(q)
        if end in cl:
            final.append(k)
        for x in sorted(cl):
            for g, t in edges[x]:
                if t not in index:
                    index[t] = len(order)
                    order.append(t)
                trans.append((k, g, index[t]))
        k += 1
    return _trim(Sfa(alg, len(order), [0], final, trans))


def _trim(a: Sfa) -> Sfa:
    """Drop states that cannot reach a final state; keeps state 0."""
    pred: list[set[int]] = [set() for _ in range(a.n_states)]
    for s, _, t in a.transitions:
        pred[t].add(s)
    live = set(a.final)
    stack = list(live)
    while stack:
        t = stack.pop()
        for s in pred[t]:
            if s not in live:
                live.add(s)
                stack.append(s)
    live.add(0)
    keep = sorted(live)
    ren = {old: new for new, old in enumerate(keep)}
    trans = [(ren[s], g, ren[t]) for s, g, t in a.transitions if s in ren and t in ren]
    return Sfa(a.algebra, len(keep), [0], [ren[f] for f in a.final if f in ren], trans)


def regex_to_safa(pattern, algebra: IntervalAlgebra | None = None) -> Safa:
    return regex_to_sfa(pattern, algebra).to_safa()


def python_matches(pattern: str, text: str) -> bool:
    """Reference semantics through :mod:`re` with the matching flags."""
    return _re.fullmatch(pattern, text, PYTHON_FLAGS) is not None


# ---------------------------------------------------------------------------
# Intersection queries


_TERM = _re.compile(r"^(\d+)('*)$")


@dataclass(frozen=True)
class Term:
    """Regex number (1-based) plus the number of primes marking a copy."""

    index: int
    copy: int = 0

    def __str__(self):
        return f"{self.index}{chr(39) * self.copy}"


@dataclass
class Query:
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...]

    def __str__(self):
        return "&".join(map(str, self.lhs)) + " = " + "&".join(map(str, self.rhs))


def parse_query(text: str, n_regexes: int | None = None) -> Query:
    """Parse ``1&2 = 1&2&2'``: intersections of numbered regexes.

    A trailing ``'`` asks for a separate isomorphic copy of the automaton.
    """
    if "=" not in text:
        raise ValueError(f"query {text!r} has no '='")
    sides = []
    for side in text.split("="):
        terms = []
        for raw in side.split("&"):
            m = _TERM.match(raw.strip())
            if not m:
                raise ValueError(f"bad query term {raw.strip()!r}")
            t = Term(int(m.group(1)), len(m.group(2)))
            if t.index < 1 or (n_regexes is not None and t.index > n_regexes):
                raise ValueError(f"query refers to regex {t.index}, which does not exist")
            terms.append(t)
        sides.append(tuple(terms))
    if len(sides) != 2:
        raise ValueError(f"query {text!r} must have exactly one '='")
    return Query(sides[0], sides[1])


@dataclass
class RegexProblem:
    """Regexes plus queries, as read from a query file."""

    patterns: list[str]
    queries: list[Query]


def parse_problem(text: str) -> RegexProblem:
    """Regex lines and ``query:`` lines; ``#`` lines and blanks are skipped."""
    patterns = []
    queries = []
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("query:"):
            queries.append(line[len("query:"):].strip())
        else:
            patterns.append(line.rstrip("\n"))
    return RegexProblem(patterns, [parse_query(q, len(patterns)) for q in queries])


class QueryBuilder:
    """Compiles regexes once and assembles query automata from them."""

    def __init__(self, patterns: Sequence[str], algebra: IntervalAlgebra | None = None):
        self.patterns = list(patterns)
        self.algebra = algebra if algebra is not None else IntervalAlgebra()
        self._sfa: dict[int, Sfa] = {}

    def sfa(self, index: int) -> Sfa:
        if index not in self._sfa:
            self._sfa[index] = regex_to_sfa(self.patterns[index - 1], self.algebra)
        return self._sfa[index]

    def configurations(self, query: Query) -> tuple[Safa, pbf.Pbf, pbf.Pbf]:
        """One s-AFA holding every term of the query, and the two sides' formulas."""
        terms = sorted(set(query.lhs) | set(query.rhs), key=lambda t: (t.index, t.copy))
        parts = [self.sfa(t.index).to_safa() for t in terms]
        both, offsets = intersect_all(parts)
        init = {t: pbf.shift(p.initial, off) for t, p, off in zip(terms, parts, offsets)}
        lhs = pbf.conj_all(init[t] for t in query.lhs)
        rhs = pbf.conj_all(init[t] for t in query.rhs)
        return both, lhs, rhs

    def sides(self, query: Query) -> tuple[list[Sfa], list[Sfa]]:
        return [self.sfa(t.index) for t in query.lhs], [self.sfa(t.index) for t in query.rhs]

    def matches(self, term_list: Sequence[Term], word: Sequence[int]) -> bool:
        return all(self.sfa(t.index).accepts(word) for t in term_list)


def forced_equivalence_queries(n: int) -> list[Query]:
    """``i & j = i & j & j'`` for every pair ``i < j`` of ``n`` regexes."""
    return [
        Query((Term(i), Term(j)), (Term(i), Term(j), Term(j, 1)))
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    ]
