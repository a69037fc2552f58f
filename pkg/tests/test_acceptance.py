"""Acceptance checks.  Each test prints a PASS/FAIL line in the session summary.

Run just these with ``pytest tests/test_acceptance.py -v``.
"""

import itertools
import random
import time

from acceptance_log import criterion
from oracles import (
    afa_accepts,
    lattice_congruence,
    ltlf_models_upto,
    monotone_tables,
    random_safa,
    table_of,
    words,
)

from symafa import ltlf, pbf
from symafa import regex as rx
from symafa.algebra import BitVectorAlgebra, IntervalAlgebra
from symafa.automaton import (
    complement,
    disjoint_union,
    intersection,
    normalize,
    prune,
    union,
)
from symafa.baseline import from_safa, is_sfa_shaped, reverse_equivalent, sfa_equiv
from symafa.bench import bundled_path, forced_equivalence_manifest, run_manifest
from symafa.congruence import CongruenceContext, satisfiable_by_congruence
from symafa.equivalence import is_equivalent
from symafa.formats import load_safa
from symafa.runner import run_equiv

EXAMPLE = bundled_path("interleaved.safa")
X, Y, Z, W, V = (pbf.var(i) for i in range(5))


def test_criterion_1_worked_example():
    with criterion(1, "five-state worked example, bisim steps and relation") as note:
        rec = run_equiv(EXAMPLE, lhs="4", rhs="3", engine="bisim")
        assert rec.verdict == "equivalent"
        assert rec.stats["pairs_explored"] == 2
        assert rec.wall_time_ms < 100, rec.wall_time_ms

        m = load_safa(EXAMPLE)
        res = is_equivalent(m, V, W, trace=True)
        assert res.equivalent
        assert res.relation == [(V, W), (X | Y, Z)]

        per_pair = {}
        for ev in res.trace:
            per_pair.setdefault(ev["pair"], []).append(ev)
        assert list(per_pair) == [(V, W), (X | Y, Z)]
        assert all(len(evs) == 2 for evs in per_pair.values())

        # the closure checks of the example, against the final relation
        ctx = CongruenceContext()
        for p, q in res.relation:
            ctx.assert_pair(p, q)
        assert ctx.in_closure(Z & W, (Y | X) & V)
        assert ctx.in_closure(V | pbf.FALSE, V)
        assert ctx.in_closure(pbf.FALSE | W, V)
        outcomes = {ev["succ"]: ev["result"] for ev in res.trace}
        assert outcomes[(Z & W, (Y | X) & V)] == "congruent"
        assert outcomes[(W, V)] == "congruent"
        note["note"] = f"{rec.wall_time_ms:.1f} ms"


def _equivalent_variant(rng, m):
    """A configuration pair that must be equivalent, over one automaton."""
    kind = rng.randrange(4)
    if kind == 0:
        other = normalize(m)
    elif kind == 1:
        other = complement(complement(m))
    elif kind == 2:
        other = prune(m)
    else:
        other = m
    both, off = disjoint_union(m, other)
    return both, m.initial, pbf.shift(other.initial, off)


def test_criterion_2_engines_agree_on_random_automata():
    with criterion(2, "bisim, reverse-sfa and sfa-eq agree on 500 random automata") as note:
        rng = random.Random(2024)
        alg = IntervalAlgebra(3)
        start = time.perf_counter()
        counts = {"equivalent": 0, "inequivalent": 0, "sfa-eq": 0}
        for trial in range(500):
            shaped = trial % 2 == 0
            m = random_safa(rng, alg, max_states=10, sfa_shaped=shaped)
            if rng.random() < 0.4:
                both, p, q = _equivalent_variant(rng, m)
            else:
                m2 = random_safa(rng, alg, max_states=10, sfa_shaped=shaped)
                both, off = disjoint_union(m, m2)
                p, q = m.initial, pbf.shift(m2.initial, off)
            bis = is_equivalent(both, p, q)
            rev = reverse_equivalent(both, p, q)
            assert bis.equivalent == rev.equivalent, trial
            if shaped and is_sfa_shaped(both.with_initial(p)) and is_sfa_shaped(both.with_initial(q)):
                sfa = sfa_equiv(from_safa(both.with_initial(p)), from_safa(both.with_initial(q)))
                assert sfa.equivalent == bis.equivalent, trial
                counts["sfa-eq"] += 1
            for res in (bis, rev):
                if not res.equivalent:
                    w = res.counterexample
                    assert afa_accepts(both, w, p) != afa_accepts(both, w, q), trial
            counts["equivalent" if bis.equivalent else "inequivalent"] += 1
        elapsed = time.perf_counter() - start
        assert elapsed < 60, elapsed
        assert counts["equivalent"] > 100 and counts["inequivalent"] > 100, counts
        note["note"] = f"{counts}, {elapsed:.1f}s"


def test_criterion_3_boolean_laws():
    with criterion(3, "union/intersection/complement/normalize/prune laws, 1000 trials") as note:
        rng = random.Random(3)
        alg = IntervalAlgebra(3)
        checked = 0
        for trial in range(1000):
            m1 = random_safa(rng, alg, max_states=5)
            m2 = random_safa(rng, alg, max_states=5)
            u, i, c = union(m1, m2), intersection(m1, m2), complement(m1)
            n, pr = normalize(m1), prune(m1)
            for _ in range(8):
                w = tuple(rng.randrange(4) for _ in range(rng.randint(0, 8)))
                a1, a2 = afa_accepts(m1, w), afa_accepts(m2, w)
                assert afa_accepts(u, w) == (a1 or a2), (trial, w)
                assert afa_accepts(i, w) == (a1 and a2), (trial, w)
                assert afa_accepts(c, w) == (not a1), (trial, w)
                assert afa_accepts(n, w) == a1, (trial, w)
                assert afa_accepts(pr, w) == a1, (trial, w)
                checked += 1
        note["note"] = f"{checked} words"


def test_criterion_4_normal_form():
    with criterion(4, "normalize yields disjoint, covering guards on 200 automata"):
        rng = random.Random(4)
        for trial in range(200):
            alg = IntervalAlgebra(rng.choice([3, 15, 0x10FFFF]))
            m = normalize(random_safa(rng, alg, max_states=8))
            for s in range(m.n_states):
                guards = [g for g, _ in m.outgoing(s)]
                for g1, g2 in itertools.combinations(guards, 2):
                    assert not alg.is_sat(alg.and_(g1, g2)), trial
                assert not alg.is_sat(alg.not_(alg.disj(guards))), trial


def _pool():
    """One formula per element of the free distributive lattice on 3 generators."""
    out = {}
    for t in monotone_tables():
        minimal = [m for m in range(8) if (t >> m) & 1 and not any(
            (t >> s) & 1 and s != m and s & m == s for s in range(8))]
        terms = [pbf.conj_all(pbf.var(i) for i in range(3) if (m >> i) & 1) for m in minimal]
        f = pbf.disj_all(terms)
        assert table_of(f) == t
        out[t] = f
    return out


def test_criterion_5_congruence_matches_lattice_oracle():
    with criterion(5, "closure = brute-force lattice congruence, all R with <= 2 pairs") as note:
        pool = _pool()
        tables = sorted(pool)
        assert len(tables) == 20
        pairs = list(itertools.combinations(tables, 2))
        relations = [()] + [(p,) for p in pairs] + list(itertools.combinations(pairs, 2))
        start = time.perf_counter()
        queries = 0
        for rel in relations:
            classes = lattice_congruence(tables, rel)
            ctx = CongruenceContext()
            for a, b in rel:
                ctx.assert_pair(pool[a], pool[b])
            for t in tables:
                assert ctx.in_closure(pool[t], pool[classes[t]]), (rel, t)
            reps = sorted(set(classes.values()))
            for a, b in itertools.combinations(reps, 2):
                assert not ctx.in_closure(pool[a], pool[b]), (rel, a, b)
            queries += len(tables) + len(reps) * (len(reps) - 1) // 2
        elapsed = time.perf_counter() - start
        assert elapsed < 30, elapsed
        note["note"] = f"{len(relations)} relations, {queries} closure checks, {elapsed:.1f}s"


def _truth_table_sat(cnf, n):
    return any(
        all(any((lit > 0) == bool((m >> (abs(lit) - 1)) & 1) for lit in c) for c in cnf)
        for m in range(1 << n)
    )


def test_criterion_6_sat_reduction():
    with criterion(6, "SAT-to-congruence reduction on 200 random 3-CNFs") as note:
        rng = random.Random(6)
        sat = 0
        for trial in range(200):
            n = rng.randint(1, 6)
            cnf = [
                [rng.choice([-1, 1]) * rng.randint(1, n) for _ in range(3)]
                for _ in range(rng.randint(1, 5 * n))
            ]
            expected = _truth_table_sat(cnf, n)
            assert satisfiable_by_congruence(cnf, n) == expected, cnf
            sat += expected
        note["note"] = f"{sat} satisfiable / {200 - sat} unsatisfiable"


def test_criterion_7_ltlf_against_trace_enumeration():
    with criterion(7, "LTLf satisfiability vs trace enumeration on 300 formulas") as note:
        rng = random.Random(7)
        names = ["p", "q", "r"]
        checked = sat = 0
        while checked < 300:
            atoms = names[: rng.randint(1, 3)]
            f = ltlf.random_formula(rng, rng.randint(1, 8), atoms)
            if f.x_depth() > 5:
                continue
            aut = ltlf.translate(f, atoms)
            res = is_equivalent(aut.safa, aut.nonempty_initial, pbf.FALSE)
            witness = ltlf_models_upto(f, atoms, 6)
            assert res.equivalent == (witness is None), str(f)
            if not res.equivalent:
                trace = aut.trace_of(res.counterexample)
                assert trace and ltlf.holds(f, trace), str(f)
                sat += 1
            checked += 1

        def check(text):
            aut = ltlf.translate(ltlf.parse(text))
            return aut, is_equivalent(aut.safa, aut.nonempty_initial, pbf.FALSE)

        assert check("false")[1].equivalent
        aut, res = check("G p")
        assert not res.equivalent and ltlf.format_trace(aut.trace_of(res.counterexample)) == "{p}"
        assert check("(F p) & (G !p)")[1].equivalent

        alg = BitVectorAlgebra([])
        a1 = ltlf.translate(ltlf.parse("X true"), algebra=alg)
        a2 = ltlf.translate(ltlf.parse("true"), algebra=alg)
        both, off = disjoint_union(a1.safa, a2.safa)
        diff = is_equivalent(both, a1.safa.initial, pbf.shift(a2.safa.initial, off))
        assert not diff.equivalent
        note["note"] = f"{sat} satisfiable / {checked - sat} unsatisfiable"


def test_criterion_8_regex_forced_equivalence():
    with criterion(8, "forced equivalence on the 50-regex corpus within 20 s per case") as note:
        manifest = forced_equivalence_manifest()
        assert len(manifest["cases"]) == 50 * 49 // 2
        report = run_manifest(manifest, ["bisim"], timeout_ms=20_000)
        summary = report.summary()["bisim"]
        assert summary["verdicts"] == {"equivalent": len(manifest["cases"])}, summary
        assert summary["timeouts"] == 0 and summary["errors"] == 0
        slowest = max(r["wall_time_ms"] for r in report.records)
        assert slowest < 20_000

        # explored-state metric for every engine, on a slice of the corpus
        part = {"name": "slice", "cases": manifest["cases"][:40]}
        engines = ["bisim", "reverse-sfa", "sfa-eq"]
        rep = run_manifest(part, engines, timeout_ms=20_000)
        rows = rep.explored()
        assert len(rows) == 40
        by_key = {(r["inputs"]["id"], r["engine"]): r for r in rep.records}
        for row in rows:
            for e in engines:
                assert e in row
                rec = by_key[(row["id"], e)]
                if rec["verdict"] is not None:
                    assert rec["verdict"] == "equivalent"
                    assert isinstance(row[e], int) and row[e] >= 1
                    assert row[e] == rec["stats"]["explored"]
                else:
                    assert row[e] is None
        assert all(r["stats"]["explored"] == r["stats"]["pairs_explored"]
                   for r in rep.records if r["engine"] == "bisim")
        timeouts = {e: s["timeouts"] for e, s in rep.summary().items()}
        note["note"] = (f"{len(manifest['cases'])} cases, slowest {slowest:.0f} ms, "
                        f"slice timeouts {timeouts}")


def test_criterion_9_counterexamples_reverify():
    with criterion(9, "every reported counterexample re-verifies by membership") as note:
        rng = random.Random(9)
        alg = IntervalAlgebra(3)
        seen = 0
        for trial in range(150):
            m1 = random_safa(rng, alg, max_states=6, sfa_shaped=trial % 3 == 0)
            m2 = random_safa(rng, alg, max_states=6, sfa_shaped=trial % 3 == 0)
            both, off = disjoint_union(m1, m2)
            p, q = m1.initial, pbf.shift(m2.initial, off)
            results = [is_equivalent(both, p, q), reverse_equivalent(both, p, q)]
            if is_sfa_shaped(m1) and is_sfa_shaped(m2):
                results.append(sfa_equiv(from_safa(m1), from_safa(m2)))
            for res in results:
                if not res.equivalent:
                    w = res.counterexample
                    assert afa_accepts(m1, w) != afa_accepts(m2, w), (trial, res.engine)
                    seen += 1

        # regex counterexamples, checked with Python's matcher
        pats = ["a+", "a*", "(ab|a)*b", "[a-c]*c", ".*@.*\\.ru", "[^@]+@[^@]+"]
        builder = rx.QueryBuilder(pats)
        for i, j in itertools.permutations(range(1, len(pats) + 1), 2):
            q = rx.parse_query(f"{i}&{j} = {j}")
            m, lhs, rhs = builder.configurations(q)
            for res in (is_equivalent(m, lhs, rhs), reverse_equivalent(m, lhs, rhs)):
                if not res.equivalent:
                    text = "".join(map(chr, res.counterexample))
                    both = rx.python_matches(pats[i - 1], text) and rx.python_matches(pats[j - 1], text)
                    assert both != rx.python_matches(pats[j - 1], text), (i, j, text)
                    seen += 1

        # LTLf models, checked with the trace evaluator
        for k in range(100):
            f = ltlf.random_formula(rng, rng.randint(1, 8), ["p", "q"])
            aut = ltlf.translate(f, ["p", "q"])
            res = is_equivalent(aut.safa, aut.nonempty_initial, pbf.FALSE)
            if not res.equivalent:
                assert ltlf.holds(f, aut.trace_of(res.counterexample)), str(f)
                seen += 1
        note["note"] = f"{seen} counterexamples checked"


if __name__ == "__main__":
    import acceptance_log

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(acceptance_log.lines()))
