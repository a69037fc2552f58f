"""Reading and writing the s-AFA text format.

::

    safa algebra=interval            # or: algebra=bv atoms=p,q,r
    states 5
    initial 0 & 1
    final 1 2
    0 --[97-122]--> 1 | (2 & 3)

``#`` starts a comment.  Interval headers accept ``max=N`` to bound the
character domain (default: all Unicode codepoints).
"""

from __future__ import annotations

import re
from pathlib import Path

from . import pbf
from .algebra import Algebra, AlgebraError, BitVectorAlgebra, IntervalAlgebra, MAX_CODEPOINT
from .automaton import Safa


class FormatError(ValueError):
    def __init__(self, message: str, source: str = "<string>", line: int | None = None):
        self.source = source
        self.line = line
        where = source if line is None else f"{source}:{line}"
        super().__init__(f"{where}: {message}")


_TRANSITION = re.compile(r"^(\d+)\s*--(.*?)-->\s*(.+)$")


def _algebra_from_header(fields: dict[str, str]) -> Algebra:
    kind = fields.get("algebra", "interval")
    if kind == "interval":
        return IntervalAlgebra(int(fields.get("max", str(MAX_CODEPOINT)), 0))
    if kind == "bv":
        atoms = [a for a in fields.get("atoms", "").split(",") if a]
        return BitVectorAlgebra(atoms)
    raise ValueError(f"unknown algebra {kind!r}")


def parse_safa(text: str, source: str = "<string>", algebra: Algebra | None = None) -> Safa:
    """Parse one automaton.

    Passing ``algebra`` reuses an existing instance (its header must match),
    so that automata from several files can be combined.
    """
    alg = algebra
    n_states = None
    initial = None
    final: list[int] = []
    transitions = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if not seen_header:
                words = line.split()
                if words[0] != "safa":
                    raise ValueError("expected 'safa' header")
                fields = dict(w.split("=", 1) for w in words[1:])
                fresh = _algebra_from_header(fields)
                if alg is None:
                    alg = fresh
                elif alg.describe() != fresh.describe():
                    raise ValueError(f"algebra {fresh.describe()!r} does not match {alg.describe()!r}")
                seen_header = True
                continue
            m = _TRANSITION.match(line)
            if m:
                if n_states is None:
                    raise ValueError("'states' must precede transitions")
                guard = alg.parse(m.group(2))
                transitions.append((int(m.group(1)), guard, pbf.parse(m.group(3))))
                continue
            key, _, rest = line.partition(" ")
            if key == "states":
                n_states = int(rest)
            elif key == "initial":
                initial = pbf.parse(rest)
            elif key == "final":
                final = [int(x) for x in rest.split()]
            else:
                raise ValueError(f"unrecognised line {line!r}")
        except (ValueError, AlgebraError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(str(exc), source, lineno) from None
    if not seen_header:
        raise FormatError("missing 'safa' header", source)
    if n_states is None:
        raise FormatError("missing 'states' line", source)
    if initial is None:
        raise FormatError("missing 'initial' line", source)
    try:
        return Safa(alg, n_states, initial, final, transitions)
    except ValueError as exc:
        raise FormatError(str(exc), source) from None


def load_safa(path: str | Path, algebra: Algebra | None = None) -> Safa:
    path = Path(path)
    return parse_safa(path.read_text(encoding="utf-8"), str(path), algebra)


def dump_safa(m: Safa) -> str:
    alg = m.algebra
    lines = [
        f"safa {alg.describe()}",
        f"states {m.n_states}",
        f"initial {pbf.to_str(m.initial)}",
        "final " + " ".join(str(i) for i in sorted(m.final)),
    ]
    for s, g, t in m.transitions:
        lines.append(f"{s} --{alg.format(g)}--> {pbf.to_str(t)}")
    return "\n".join(lines) + "\n"
