"""Satisfiability of LTL formulas over finite traces.

Each formula becomes an alternating automaton over bit vectors (one bit per
atom).  A formula is satisfiable when its automaton accepts some nonempty
word, and the word found by the equivalence check is a model.

    python demos/ltlf_satisfiability.py
"""

from pathlib import Path

from symafa import ltlf, pbf
from symafa.equivalence import is_equivalent

HERE = Path(__file__).parent


def main():
    lines = (HERE / "inputs" / "formulas.ltl").read_text(encoding="utf-8").splitlines()
    for text in (l.strip() for l in lines):
        if not text or text.startswith("#"):
            continue
        f = ltlf.parse(text)
        aut = ltlf.translate(f)
        res = is_equivalent(aut.safa, aut.nonempty_initial, pbf.FALSE)
        if res.equivalent:
            print(f"{text:<24} UNSAT  ({aut.safa.n_states} states)")
        else:
            trace = aut.trace_of(res.counterexample)
            assert ltlf.holds(f, trace)
            print(f"{text:<24} SAT    model {ltlf.format_trace(trace)}")


if __name__ == "__main__":
    main()
