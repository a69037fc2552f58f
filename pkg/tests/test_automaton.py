import random

import pytest
from oracles import afa_accepts, random_safa, words

from symafa import pbf
from symafa.algebra import AlgebraError, BitVectorAlgebra, IntervalAlgebra
from symafa.automaton import (
    Safa,
    complement,
    disjoint_union,
    intersect_all,
    intersection,
    is_normal,
    normalize,
    prune,
    prune_with_map,
    reverse,
    union,
)
from symafa.bench import bundled_path
from symafa.formats import FormatError, dump_safa, load_safa, parse_safa
from symafa.pbf import FALSE, TRUE

X, Y, Z, W, V = (pbf.var(i) for i in range(5))
ALPHABET = range(4)


def example():
    return load_safa(bundled_path("interleaved.safa"))


def test_accepts_matches_unfolding_oracle():
    rng = random.Random(31)
    alg = IntervalAlgebra(2)
    for _ in range(100):
        m = random_safa(rng, alg, max_states=5)
        for w in words(range(3), 5):
            assert m.accepts(w) == afa_accepts(m, w)


def test_worked_example_membership():
    m = example()
    assert m.accepts(())
    assert m.accepts((0,))
    assert m.step(V, 0) is X | Y
    assert m.step(V, 5) is Z & W
    assert pbf.evaluate(m.final_mask, X | Y)


def test_delta_on_char_examples():
    m = example()
    alg = m.algebra
    succ, cls = m.delta_on_char(0, {3, 4})
    assert succ == {4: X | Y, 3: Z}
    assert cls == alg.char(0)
    succ, cls = m.delta_on_char(5, {3, 4})
    assert succ == {4: Z & W, 3: (Y | X) & V}
    assert cls == alg.interval(1, alg.max_char)
    assert m.delta_on_char(7, set()) == ({}, alg.top)


def test_initial_false_rejects_everything():
    alg = IntervalAlgebra(3)
    m = Safa(alg, 1, FALSE, [0], [(0, alg.top, X)])
    assert not any(m.accepts(w) for w in words(ALPHABET, 3))


def test_construction_drops_unsat_and_merges():
    alg = IntervalAlgebra(9)
    m = Safa(alg, 2, X, [1], [(0, alg.bot, Y), (0, alg.interval(0, 2), Y), (0, alg.interval(5, 6), Y)])
    assert len(m.transitions) == 1
    assert m.transitions[0][1] == alg.make([(0, 2), (5, 6)])


def test_construction_errors():
    alg = IntervalAlgebra(3)
    with pytest.raises(ValueError):
        Safa(alg, 1, Y, [], [])
    with pytest.raises(ValueError):
        Safa(alg, 1, X, [], [(0, alg.top, Y)])
    with pytest.raises(AlgebraError):
        Safa(alg, 1, X, [], [(0, IntervalAlgebra(3).top, X)])
    with pytest.raises(AlgebraError):
        example().accepts((0x110000,))


def test_union_intersection_construction():
    rng = random.Random(32)
    alg = IntervalAlgebra(3)
    ms = [random_safa(rng, alg, max_states=3) for _ in range(3)]
    both, offsets = intersect_all(ms)
    assert offsets == [0, ms[0].n_states, ms[0].n_states + ms[1].n_states]
    expected = pbf.conj_all(pbf.shift(m.initial, off) for m, off in zip(ms, offsets))
    assert both.initial is expected
    never = Safa(alg, 1, FALSE, [], [])
    u = union(ms[0], never)
    for w in words(ALPHABET, 4):
        assert u.accepts(w) == ms[0].accepts(w)
    with pytest.raises(AlgebraError):
        union(ms[0], Safa(IntervalAlgebra(3), 1, X, [0], []))


def test_boolean_laws_on_samples():
    rng = random.Random(33)
    alg = IntervalAlgebra(3)
    for _ in range(200):
        m1, m2 = random_safa(rng, alg, max_states=4), random_safa(rng, alg, max_states=4)
        cu = complement(union(m1, m2))
        ic = intersection(complement(m1), complement(m2))
        cc = complement(complement(m1))
        for _ in range(10):
            w = tuple(rng.randrange(4) for _ in range(rng.randint(0, 8)))
            a1, a2 = m1.accepts(w), m2.accepts(w)
            assert intersection(m1, m2).accepts(w) == (a1 and a2)
            assert cu.accepts(w) == ic.accepts(w) == (not (a1 or a2))
            assert cc.accepts(w) == a1


def test_complement_of_universal():
    alg = IntervalAlgebra(3)
    m = Safa(alg, 1, X, [0], [(0, alg.top, X)])
    c = complement(m)
    rng = random.Random(34)
    assert not c.accepts(())
    for _ in range(50):
        assert not c.accepts(tuple(rng.randrange(4) for _ in range(rng.randint(1, 10))))


def test_normalize_examples():
    alg = IntervalAlgebra()
    q = Y
    m = normalize(Safa(alg, 2, X, [1], [(0, alg.interval(97, 122), q)]))
    assert is_normal(m)
    assert set((g, t) for g, t in m.outgoing(0)) == {
        (alg.interval(97, 122), q),
        (alg.not_(alg.interval(97, 122)), FALSE),
    }
    m = normalize(Safa(alg, 3, X, [1, 2], [(0, alg.interval(0, 10), Y), (0, alg.interval(5, 20), Z)]))
    got = {t: g for g, t in m.outgoing(0)}
    assert got[Y] == alg.interval(0, 4)
    assert got[Y | Z] == alg.interval(5, 10)
    assert got[Z] == alg.interval(11, 20)
    assert got[FALSE] == alg.interval(21, alg.max_char)
    assert normalize(m) is m


def test_normalize_over_bitvectors():
    alg = BitVectorAlgebra(["p", "q"])
    p, q = alg.var("p"), alg.var("q")
    m = Safa(alg, 2, X, [1], [(0, p, Y), (0, q, X), (1, alg.or_(p, q), Y)])
    n = normalize(m)
    assert is_normal(n) and not is_normal(m)
    for w in words(range(4), 4):
        assert n.accepts(w) == m.accepts(w)


def test_prune_examples():
    alg = IntervalAlgebra(3)
    # state 2 is isolated and non-final
    m = Safa(alg, 3, X, [1], [(0, alg.top, Y), (1, alg.top, X), (2, alg.top, X)])
    p = prune(m)
    assert p.n_states == 2
    for w in words(ALPHABET, 4):
        assert p.accepts(w) == m.accepts(w)
    # state 2 is reachable but can never accept; 1 & 2 collapses to false
    m = Safa(alg, 3, X, [0], [(0, alg.char(0), Y & Z), (0, alg.char(1), Y), (1, alg.top, X), (2, alg.top, Z)])
    p, mapping = prune_with_map(m)
    assert 2 not in mapping
    assert p.n_states == 2
    assert p.step(p.initial, 0) is FALSE
    assert not p.accepts((0, 0))
    # all states live: unchanged
    m = Safa(alg, 2, X, [1], [(0, alg.top, Y), (1, alg.top, X)])
    p = prune(m)
    assert p.n_states == 2 and set(p.transitions) == set(m.transitions)


def test_prune_keeps_states_with_true_targets():
    alg = IntervalAlgebra(3)
    m = Safa(alg, 1, X, [], [(0, alg.char(0), TRUE)])
    assert prune(m).accepts((0, 1))


def test_prune_and_normalize_preserve_language():
    rng = random.Random(35)
    alg = IntervalAlgebra(3)
    for _ in range(200):
        m = random_safa(rng, alg, max_states=6)
        p, n = prune(m), normalize(m)
        for w in words(ALPHABET, 3):
            assert p.accepts(w) == n.accepts(w) == m.accepts(w)


def test_reverse_language():
    rng = random.Random(36)
    alg = IntervalAlgebra(2)
    for _ in range(60):
        m = random_safa(rng, alg, max_states=4)
        r = reverse(m)
        assert r.accepts(()) == m.accepts(())
        for w in words(range(3), 5):
            assert r.accepts(w) == m.accepts(tuple(reversed(w)))
    # the single word "ab"
    alg = IntervalAlgebra(127)
    m = Safa(alg, 3, X, [2], [(0, alg.char(97), Y), (1, alg.char(98), Z)])
    r = reverse(m)
    assert r.accepts((98, 97)) and not r.accepts((97, 98))


def test_disjoint_union_offsets():
    m = example()
    both, off = disjoint_union(m, m)
    assert off == 5 and both.n_states == 10
    assert both.accepts((1, 0), pbf.shift(V, off)) == m.accepts((1, 0))


def test_format_roundtrip():
    rng = random.Random(37)
    for alg in (IntervalAlgebra(3), IntervalAlgebra()):
        for _ in range(30):
            m = random_safa(rng, alg, max_states=4)
            back = parse_safa(dump_safa(m))
            assert back.n_states == m.n_states and back.final == m.final
            assert back.initial is m.initial
            for w in words(range(4), 3):
                assert back.accepts(w) == m.accepts(w)


def test_format_bitvector_header():
    m = parse_safa("safa algebra=bv atoms=p,q\nstates 1\ninitial 0\nfinal 0\n0 --p & !q--> 0\n")
    assert m.algebra.atoms == ("p", "q")
    assert m.accepts((1, 1)) and not m.accepts((3,))


@pytest.mark.parametrize("text, line", [
    ("states 1\n", 1),
    ("safa algebra=interval\nstates 1\ninitial 0\n0 --[0--> 0\n", 4),
    ("safa algebra=interval\nstates 1\ninitial 0\nbogus\n", 4),
    ("safa algebra=interval\n0 --true--> 0\n", 2),
])
def test_format_errors_name_the_line(text, line):
    with pytest.raises(FormatError) as info:
        parse_safa(text, "f.safa")
    assert f"f.safa:{line}" in str(info.value)


def test_format_missing_sections():
    with pytest.raises(FormatError):
        parse_safa("safa algebra=interval\nstates 2\n")
    with pytest.raises(FormatError):
        parse_safa("safa algebra=interval\nstates 1\ninitial 3\n")
