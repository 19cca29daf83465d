import itertools

import pytest

from lamshift.closures import (
    EVAL,
    PROGRAM,
    PURE,
    ClosureBudget,
    Environment,
    atom_contexts,
    ctx_closure_pairs,
    in_term_closure,
    open_extension_close,
    term_closure_pairs,
    value_closure_pairs,
)
from lamshift.syntax import (
    HOLE,
    AppL,
    AppR,
    Lam,
    ResetFrame,
    Var,
    ctx_key,
    ctx_size,
    free_vars,
    is_eval,
    is_pure,
    parse,
    plug_eval,
)

from oracles import closed_terms_upto, ln, ln_size, star_related

ID = parse("\\x. x")
CTL = parse("\\x. S k. k x")
STUCK0 = parse("S k. k (\\x. x)")
STUCK1 = parse("(\\y. y) (S k. k (\\x. x))")

ENVS = {
    "empty": Environment(),
    "values": Environment(pairs=[(ID, CTL)]),
    "mixed": Environment(pairs=[(ID, CTL), (STUCK0, STUCK1), (parse("\\z. z z"), ID)]),
}


def brute_force(env, budget):
    """All pairs of closed terms within budget, filtered by direct membership."""
    terms = closed_terms_upto(budget)
    rel = {(ln(a), ln(b)) for a, b in env}
    return {(a, b) for a, b in itertools.product(terms, repeat=2) if star_related(a, b, rel)}


@pytest.mark.parametrize("name", ["empty", "values", "mixed"])
@pytest.mark.parametrize("budget", [1, 2, 3, 4, 5])
def test_term_closure_matches_brute_force(name, budget):
    env = ENVS[name]
    got = [(ln(a), ln(b)) for a, b in term_closure_pairs(env, ClosureBudget(budget))]
    assert len(got) == len(set(got))
    assert set(got) == brute_force(env, budget)


def test_term_closure_matches_brute_force_at_six():
    env = ENVS["values"]
    got = {(ln(a), ln(b)) for a, b in term_closure_pairs(env, ClosureBudget(6))}
    assert got == brute_force(env, 6)


def test_empty_closure_at_seven_is_the_diagonal():
    # with no environment the closure relates each term to itself only
    got = {(ln(a), ln(b)) for a, b in term_closure_pairs(Environment(), ClosureBudget(7))}
    assert got == {(t, t) for t in closed_terms_upto(7)}


@pytest.mark.parametrize("name", ["empty", "mixed"])
def test_value_closure_is_the_value_part(name):
    env = ENVS[name]
    terms = {(ln(a), ln(b)) for a, b in term_closure_pairs(env, ClosureBudget(5))}
    values = {(ln(a), ln(b)) for a, b in value_closure_pairs(env, ClosureBudget(5))}
    assert values == {p for p in terms if p[0][0] == "l" and p[1][0] == "l"}


def test_value_closure_examples():
    assert (ID, ID) in list(value_closure_pairs(Environment(), ClosureBudget(2)))
    env = Environment(pairs=[(parse("\\x. \\y. x"), parse("\\x. \\y. y"))])
    pairs = [(ln(a), ln(b)) for a, b in value_closure_pairs(env, ClosureBudget(3))]
    assert (ln(parse("\\x. \\y. x")), ln(parse("\\x. \\y. y"))) in pairs


@pytest.mark.parametrize("kind", [PURE, EVAL])
def test_context_pairs_are_sound(kind):
    env = ENVS["mixed"]
    rel = {(ln(a), ln(b)) for a, b in env}
    hole = Var("hole")
    count = 0
    for c0, c1 in ctx_closure_pairs(env, ClosureBudget(6), kind):
        assert (is_pure if kind == PURE else is_eval)(c0)
        assert (is_pure if kind == PURE else is_eval)(c1)
        assert max(ctx_size(c0), ctx_size(c1)) <= 6
        p0, p1 = plug_eval(c0, hole), plug_eval(c1, hole)
        assert free_vars(p0) == free_vars(p1) == {"hole"}
        assert star_related(ln(p0), ln(p1), rel)
        count += 1
    assert count > 100


def test_pure_contexts_have_no_reset():
    for c0, _ in ctx_closure_pairs(Environment(), ClosureBudget(5), PURE):
        assert is_pure(c0)
    assert any(isinstance(c, ResetFrame) for c, _ in ctx_closure_pairs(Environment(), ClosureBudget(3), EVAL))


def test_monotonicity():
    small = Environment(pairs=[(ID, CTL)])
    big = Environment(pairs=[(ID, CTL), (STUCK0, STUCK1)])
    for fn in (term_closure_pairs, value_closure_pairs):
        a = {(ln(x), ln(y)) for x, y in fn(small, ClosureBudget(5))}
        b = {(ln(x), ln(y)) for x, y in fn(big, ClosureBudget(5))}
        assert a <= b
    a = set(ctx_closure_pairs(small, ClosureBudget(5)))
    b = set(ctx_closure_pairs(big, ClosureBudget(5)))
    assert a <= b


def test_capped_streams_are_prefixes():
    env = ENVS["mixed"]
    full = list(term_closure_pairs(env, ClosureBudget(5)))
    capped = list(term_closure_pairs(env, ClosureBudget(5, 40)))
    assert capped == full[:40]
    sizes = [max(ln_size(ln(a)), ln_size(ln(b))) for a, b in full]
    assert sizes == sorted(sizes)


def test_membership():
    env = ENVS["values"]
    assert in_term_closure(parse("\\y. (\\x. x) y"), parse("\\y. (\\x. S k. k x) y"), env)
    assert not in_term_closure(ID, parse("\\y. y y"), env)


def test_environment_rejects_mixed_pairs():
    with pytest.raises(ValueError):
        Environment(pairs=[(ID, STUCK0)])
    with pytest.raises(ValueError):
        Environment(PROGRAM, [(STUCK0, STUCK1)])
    with pytest.raises(ValueError):
        ClosureBudget(0)


def test_atom_contexts_count_atoms_as_one_node():
    ctxs = atom_contexts([ID, CTL], 3)
    assert HOLE in ctxs
    assert AppL(HOLE, CTL) in ctxs
    assert AppR(ID, HOLE) in ctxs
    assert ResetFrame(ResetFrame(HOLE)) in ctxs
    assert AppL(AppL(HOLE, ID), CTL) not in ctxs
    assert AppL(AppL(HOLE, ID), CTL) in atom_contexts([ID, CTL], 5)
    assert len({ctx_key(c) for c in ctxs}) == len(ctxs)
    assert all(free_vars(plug_eval(c, ID)) == set() for c in atom_contexts([ID, CTL], 5))


def test_open_extension():
    assert open_extension_close(Var("x")) == Lam("x", Var("x"))
    assert open_extension_close(parse("x y")) == parse("\\x. \\y. x y")
    assert open_extension_close(parse("y x")) == parse("\\x. \\y. y x")
    assert open_extension_close(Var("x"), Var("z")) == parse("\\x. \\z. x")
