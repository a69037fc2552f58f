"""Walk through an equivalence proof on the bundled five-state automaton.

States are x=0 y=1 z=2 w=3 v=4.  The run shows each representative
character, the successor pair it produces, and whether that pair was
already implied by the relation built so far.

    python demos/worked_example.py
"""

from symafa import pbf
from symafa.bench import bundled_path
from symafa.congruence import CongruenceContext
from symafa.equivalence import is_equivalent
from symafa.formats import load_safa

NAMES = {0: "x", 1: "y", 2: "z", 3: "w", 4: "v"}


def show(p):
    return pbf.to_str(p, NAMES)


def main():
    m = load_safa(bundled_path("interleaved.safa"))
    v, w = pbf.var(4), pbf.var(3)
    res = is_equivalent(m, v, w, trace=True)

    print(f"v ~ w: {res.equivalent}")
    for ev in res.trace:
        p, q = ev["pair"]
        p1, q1 = ev["succ"]
        cls = m.algebra.format(ev["class"])
        print(f"  ({show(p)}, {show(q)}) on {ev['char']} (class {cls}) -> "
              f"({show(p1)}, {show(q1)}): {ev['result']}")
    print("relation:", ", ".join(f"({show(a)}, {show(b)})" for a, b in res.relation))

    # the same closure checks, asked directly
    ctx = CongruenceContext()
    for a, b in res.relation:
        ctx.assert_pair(a, b)
    x, y, z = pbf.var(0), pbf.var(1), pbf.var(2)
    for a, b in [(z & w, (y | x) & v), (v | pbf.FALSE, v), (pbf.FALSE | w, v), (x, z)]:
        print(f"  {show(a)} == {show(b)} modulo R: {ctx.in_closure(a, b)}")


if __name__ == "__main__":
    main()
