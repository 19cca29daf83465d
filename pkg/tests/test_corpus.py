import pytest

from lamshift.bisim import DISTINGUISHED, LIKELY_DISTINGUISHED, NO_COUNTEREXAMPLE
from lamshift.corpus import expand_aliases, parse_corpus, parse_term
from lamshift.ctxequiv import COUNTEREXAMPLE, LIKELY_COUNTEREXAMPLE, NONE_FOUND
from lamshift.syntax import alpha_eq, free_vars, parse

GAME = {DISTINGUISHED, LIKELY_DISTINGUISHED, NO_COUNTEREXAMPLE}
FALSIFIER = {COUNTEREXAMPLE, LIKELY_COUNTEREXAMPLE, NONE_FOUND}


def test_entries_are_well_formed(corpus):
    names = [e.name for e in corpus]
    assert len(names) == len(set(names)) >= 20
    for e in corpus:
        for game, fal in (e.expect_relaxed, e.expect_original):
            assert game in GAME and fal in FALSIFIER
        t0, t1 = e.terms()
        assert not free_vars(t0) and not free_vars(t1)


def test_every_expectation_is_met(corpus_results):
    bad = [r.line() for r in corpus_results.values() if not r.ok]
    assert not bad


def test_aliases():
    assert alpha_eq(parse_term("OMEGA"), parse("(\\x. x x) (\\x. x x)"))
    theta = "(\\x. \\y. y (\\z. x x y z))"
    assert alpha_eq(parse_term("THETA"), parse(f"{theta} {theta}"))
    assert alpha_eq(parse_term("THETA-SHIFT"), parse(f"<{theta} (S k. k k)>"))
    assert expand_aliases("OMEGAS") == "OMEGAS"


def test_parse_errors():
    with pytest.raises(ValueError, match="missing"):
        parse_corpus("name: a\nleft: \\x. x\n")
    with pytest.raises(ValueError, match="field"):
        parse_corpus("name: a\njunk\n")
    with pytest.raises(ValueError, match="verdict"):
        parse_corpus("name: a\nleft: x\nright: x\nexpect-relaxed: no-counterexample\nexpect-original: a b\n")


def test_stanzas_and_comments():
    text = """
# leading comment
name: one
left: \\x. x
right: \\y. y
expect-relaxed: no-counterexample none-found
expect-original: no-counterexample none-found

name: two
left: OMEGA
right: OMEGA
expect-relaxed: no-counterexample none-found
expect-original: no-counterexample none-found
ref: reflexivity
"""
    es = parse_corpus(text)
    assert [e.name for e in es] == ["one", "two"]
    assert es[1].ref == "reflexivity" and es[0].ref == ""
