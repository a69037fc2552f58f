import random
import re

import pytest

from symafa import pbf
from symafa import regex as rx
from symafa.algebra import IntervalAlgebra, minterms
from symafa.bench import bundled_path, read_corpus
from symafa.equivalence import is_equivalent

CORPUS = read_corpus(bundled_path("email_filters.txt"))
FILLER = "a@.0 Z-_x"


def alphabet_slice(sfa, rng, k=6):
    """Up to ``k`` characters covering distinct guard classes, padded with filler."""
    chars = [a for _, a in minterms(sfa.algebra, [g for _, g, _ in sfa.transitions])]
    rng.shuffle(chars)
    out = [chr(a) for a in chars[:k]]
    for c in FILLER:
        if len(out) >= k:
            break
        if c not in out:
            out.append(c)
    return out


def random_accepted(sfa, rng, max_len=12):
    """A string read along a random path that ends in a final state, or None."""
    alg = sfa.algebra
    s = rng.choice(sorted(sfa.initial))
    out = []
    for _ in range(max_len + 1):
        if s in sfa.final and rng.random() < 0.3:
            return "".join(out)
        edges = sfa.outgoing(s)
        if not edges or len(out) == max_len:
            break
        g, s = rng.choice(edges)
        lo, hi = rng.choice(g.intervals)
        out.append(chr(rng.randint(lo, min(hi, lo + 50))))
    return "".join(out) if s in sfa.final else None


def test_corpus_size():
    assert len(CORPUS) == 50
    assert all(not p.startswith("#") for p in CORPUS)


@pytest.mark.parametrize("index", range(len(CORPUS)))
def test_corpus_agrees_with_re(index):
    pattern = CORPUS[index]
    rng = random.Random(index)
    sfa = rx.regex_to_sfa(pattern)
    letters = alphabet_slice(sfa, rng)
    samples = ["".join(rng.choice(letters) for _ in range(rng.randint(0, 12))) for _ in range(100)]
    samples += [s for s in (random_accepted(sfa, rng) for _ in range(30)) if s is not None]
    for text in samples:
        assert sfa.accepts([ord(c) for c in text]) == rx.python_matches(pattern, text), (pattern, text)


@pytest.mark.parametrize("pattern", [
    "a", "a*b", "(ab|c)+", "[^a-c]?d", "x{2,3}", "x{2}", "x{2,}", "x{,2}", "a{", "a|", "()",
    r"\d+\.\d*", r"[\w-]+", r"\S\s", r"[\]\\]", r"\x41é", "[.]", "a.c", "^ab$", "(?:ab)*", "(?P<n>a)b",
])
def test_small_patterns_agree_with_re(pattern):
    rng = random.Random(pattern)
    sfa = rx.regex_to_sfa(pattern)
    letters = list("abcdx.-]\\ 1é\n") + ["{", "}", ",", "2", "A", "_"]
    for _ in range(300):
        text = "".join(rng.choice(letters) for _ in range(rng.randint(0, 6)))
        assert sfa.accepts([ord(c) for c in text]) == rx.python_matches(pattern, text), (pattern, text)


def test_parse_examples():
    assert rx.parse("[a-z0-9]") == rx.Chars(((48, 57), (97, 122)))
    any_ = rx.Star(rx.Chars(((0, 0x10FFFF),)))
    lit = lambda c: rx.Chars(((ord(c), ord(c)),))  # noqa: E731
    assert rx.parse(r".*@.*\.ru") == rx.Concat((any_, lit("@"), any_, lit("."), lit("r"), lit("u")))
    assert rx.parse("a{2,3}") == rx.Concat((lit("a"), lit("a"), rx.Opt(lit("a"))))


@pytest.mark.parametrize("pattern, construct", [
    ("(?=a)", "lookaround"),
    ("(?!a)", "lookaround"),
    ("(?<=a)b", "lookaround"),
    (r"(a)\1", "backreference"),
    (r"\bfoo", "\\b"),
    ("a**", "multiple repeat"),
    ("(a", "missing ')'"),
    ("a{3,1}", "min repeat"),
    ("[z-a]", "bad character range"),
])
def test_unsupported_or_malformed(pattern, construct):
    with pytest.raises(rx.RegexError) as info:
        rx.parse(pattern)
    assert construct in str(info.value).lower()


def test_full_match_semantics():
    sfa = rx.regex_to_sfa("a")
    assert sfa.accepts([97])
    assert not sfa.accepts([])
    assert not sfa.accepts([97, 97])


def test_cyrillic_contains_pattern():
    sfa = rx.regex_to_sfa(".*[Ѐ-ӿ].*")
    rng = random.Random(71)
    for _ in range(10):
        text = "".join(chr(rng.randrange(32, 127)) for _ in range(rng.randint(0, 8)))
        assert not sfa.accepts([ord(c) for c in text])
        mixed = text + "ѐ" + text[::-1]
        assert sfa.accepts([ord(c) for c in mixed])


def test_three_contains_patterns_intersection():
    pats = [".*[Ѐ-ӿ].*", ".*free.*", ".*@.*\\.ru"]
    builder = rx.QueryBuilder(pats)
    m, lhs, _ = builder.configurations(rx.parse_query("1&2&3 = 1"))
    good = "свободно-free@mail.ru"
    bad = ["free@mail.ru", "свободно@mail.ru", "свободно-free@mail.com"]
    assert m.accepts([ord(c) for c in good], lhs)
    for text in bad:
        assert not m.accepts([ord(c) for c in text], lhs)
        assert not all(re.fullmatch(p, text, re.DOTALL) for p in pats)


def test_queries():
    q = rx.parse_query("1&2 = 1&2&2'")
    assert q.lhs == (rx.Term(1), rx.Term(2))
    assert q.rhs == (rx.Term(1), rx.Term(2), rx.Term(2, 1))
    assert str(q) == "1&2 = 1&2&2'"
    for bad in ["1&2", "1 = 2 = 3", "x = 1", "0 = 1"]:
        with pytest.raises(ValueError):
            rx.parse_query(bad)
    with pytest.raises(ValueError):
        rx.parse_query("1 = 3", n_regexes=2)
    assert len(rx.forced_equivalence_queries(5)) == 10


def test_query_configurations():
    builder = rx.QueryBuilder(["a*", "a*b?"])
    m, lhs, rhs = builder.configurations(rx.parse_query("1&2 = 1&2&2'"))
    assert m.n_states == builder.sfa(1).n_states + 2 * builder.sfa(2).n_states
    assert is_equivalent(m, lhs, rhs).equivalent
    m, lhs, rhs = builder.configurations(rx.parse_query("1 = 1"))
    assert lhs is rhs
    builder = rx.QueryBuilder(["a+", "a*"])
    m, lhs, rhs = builder.configurations(rx.parse_query("1&2 = 2"))
    res = is_equivalent(m, lhs, rhs)
    assert not res.equivalent and res.counterexample == ()


def test_three_regex_counterexample():
    builder = rx.QueryBuilder(["a*", "a*b?", "a+"])
    m, lhs, rhs = builder.configurations(rx.parse_query("1&2 = 1&2&3"))
    res = is_equivalent(m, lhs, rhs)
    assert not res.equivalent
    text = "".join(map(chr, res.counterexample))
    in_12 = rx.python_matches("a*", text) and rx.python_matches("a*b?", text)
    assert in_12 and not rx.python_matches("a+", text)
    assert builder.matches(rx.parse_query("1&2 = 1").lhs, res.counterexample)


def test_parse_problem():
    prob = rx.parse_problem("# demo\na*\n\na*b?\nquery: 1&2 = 1&2&2'\nquery: 1 = 2\n")
    assert prob.patterns == ["a*", "a*b?"]
    assert [str(q) for q in prob.queries] == ["1&2 = 1&2&2'", "1 = 2"]
    with pytest.raises(ValueError):
        rx.parse_problem("a\nquery: 1 = 2\n")


def test_regex_to_safa_and_custom_algebra():
    alg = IntervalAlgebra(127)
    m = rx.regex_to_safa("[a-c]+", alg)
    assert m.algebra is alg
    assert m.accepts([97, 99]) and not m.accepts([100])
    assert pbf.states(m.initial)
