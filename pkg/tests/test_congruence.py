import itertools
import random

import pytest
from oracles import LatticeOracle, eval_pbf, monotone_tables, random_pbf, table_of

from symafa import pbf
from symafa.congruence import (
    CongruenceContext,
    congruent,
    sat_to_congruence,
    satisfiable_by_congruence,
)
from symafa.pbf import FALSE, TRUE
from symafa.sat import have_pysat

x, y, z, w, v = (pbf.var(i) for i in range(5))
BACKENDS = ["builtin"] + (["pysat"] if have_pysat() else [])


def entails(pairs, p, q, n):
    """Brute force: every model agreeing on all pairs agrees on (p, q)."""
    for m in range(1 << n):
        val = lambda s: bool((m >> s) & 1)  # noqa: E731
        if all(eval_pbf(a, val) == eval_pbf(b, val) for a, b in pairs):
            if eval_pbf(p, val) != eval_pbf(q, val):
                return False
    return True


@pytest.mark.parametrize("backend", BACKENDS)
def test_examples(backend):
    ctx = CongruenceContext(backend)
    assert ctx.in_closure(x & y, x & y)
    ctx.assert_pair(x, y)
    assert ctx.in_closure(x, y)
    ctx2 = CongruenceContext(backend)
    ctx2.assert_pair(x & y, FALSE)
    assert ctx2.in_closure(x & y & z, FALSE)
    assert not ctx2.in_closure(x, FALSE)


@pytest.mark.parametrize("backend", BACKENDS)
def test_worked_example_closure_checks(backend):
    ctx = CongruenceContext(backend)
    ctx.assert_pair(v, w)
    ctx.assert_pair(x | y, z)
    assert len(ctx) == 2
    assert ctx.in_closure(z & w, (y | x) & v)
    assert ctx.in_closure(v | FALSE, v)
    assert ctx.in_closure(FALSE | w, v)
    assert not ctx.in_closure(x, z)


@pytest.mark.parametrize("backend", BACKENDS)
def test_agrees_with_brute_force_entailment(backend):
    rng = random.Random(21)
    for _ in range(150):
        pairs = [(random_pbf(rng, 4, 2), random_pbf(rng, 4, 2)) for _ in range(rng.randint(0, 3))]
        ctx = CongruenceContext(backend)
        for a, b in pairs:
            ctx.assert_pair(a, b)
        for _ in range(5):
            p, q = random_pbf(rng, 4, 2), random_pbf(rng, 4, 2)
            expected = entails(pairs, p, q, 4)
            assert ctx.in_closure(p, q) == expected
            m = ctx.distinguishing_model(p, q)
            if not expected:
                val = lambda s: bool((m >> s) & 1)  # noqa: E731
                assert all(eval_pbf(a, val) == eval_pbf(b, val) for a, b in pairs)
                assert eval_pbf(p, val) != eval_pbf(q, val)


def test_lattice_oracle_sample():
    tables = monotone_tables()
    assert len(tables) == 20
    oracle = LatticeOracle(tables)
    rng = random.Random(22)
    formulas = {}
    for _ in range(2000):
        f = random_pbf(rng, 3, 3, constants=False)
        formulas.setdefault(table_of(f), f)
    assert set(formulas) <= set(tables)
    for _ in range(100):
        rel = [tuple(rng.sample(sorted(formulas), 2)) for _ in range(rng.randint(1, 2))]
        classes = oracle.congruence(rel)
        ctx = CongruenceContext()
        for a, b in rel:
            ctx.assert_pair(formulas[a], formulas[b])
        for a, b in itertools.combinations(sorted(formulas), 2):
            assert ctx.in_closure(formulas[a], formulas[b]) == (classes[a] == classes[b])


def test_closure_is_monotone_and_an_equivalence():
    rng = random.Random(23)
    for _ in range(50):
        ctx = CongruenceContext()
        pool = [random_pbf(rng, 4, 2) for _ in range(6)]
        before = set()
        for _ in range(3):
            a, b = rng.sample(pool, 2)
            ctx.assert_pair(a, b)
            assert ctx.in_closure(a, b) and ctx.in_closure(b, a)
            now = {(i, j) for i, j in itertools.product(range(6), repeat=2)
                   if ctx.in_closure(pool[i], pool[j])}
            assert before <= now
            for i, j, k in itertools.product(range(6), repeat=3):
                if (i, j) in now and (j, k) in now:
                    assert (i, k) in now
            before = now


def test_counters():
    ctx = CongruenceContext()
    ctx.assert_pair(x, y)
    ctx.in_closure(x, y)
    assert ctx.shortcuts == 1
    ctx.in_closure(x, z)
    ctx.in_closure(x | z, y | z)
    assert ctx.queries + ctx.model_hits >= 1


def test_sat_reduction_examples():
    pairs, formula, n = sat_to_congruence([[1]])
    assert n == 2 and len(pairs) == 2
    assert not congruent(pairs, formula, FALSE)
    assert not satisfiable_by_congruence([[1], [-1]])
    assert satisfiable_by_congruence([[1, -2], [2]])
    # empty CNF is the formula true
    assert satisfiable_by_congruence([], 1)
    pairs, formula, _ = sat_to_congruence([])
    assert formula is TRUE
