"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (the lines are repeated in the terminal summary) or
directly with ``python tests/test_acceptance.py``.
"""

import os
import random
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from lamshift.bisim import LIKELY_DISTINGUISHED, NO_COUNTEREXAMPLE, check_programs
from lamshift.corpus import load_corpus, parse_term, run_corpus
from lamshift.cps import Equivalence, beta_normalize, cps_equiv, kh_axioms, kh_search
from lamshift.ctxequiv import COUNTEREXAMPLE, LIKELY_COUNTEREXAMPLE, NONE_FOUND, falsify_relaxed
from lamshift.randterm import random_closed
from lamshift.semantics import NormalForm, Split, decompose, evaluate, is_stuck, redex_term
from lamshift.syntax import HOLE, Lam, Reset, alpha_eq, parse, plug_eval

from oracles import brute_splits, instantiate, matches_stuck

LINES = []


def report(n, ok, text):
    line = f"criterion {n:>2} [{'PASS' if ok else 'FAIL'}] {text}"
    LINES.append(line)
    print(line, flush=True)
    return ok


def sample():
    rng = random.Random(2024)
    return [random_closed(rng, 30) for _ in range(1000)]


_CORPUS = {}


def corpus_run():
    if not _CORPUS:
        entries = load_corpus()
        start = time.perf_counter()
        results = run_corpus(entries)
        _CORPUS["seconds"] = time.perf_counter() - start
        _CORPUS["results"] = {r.entry.name: r for r in results}
    return _CORPUS["results"], _CORPUS["seconds"]


# -- criteria ---------------------------------------------------------------


def criterion_1():
    start = time.perf_counter()
    worst, bad = 0, 0
    for t in sample():
        splits = brute_splits(t)
        worst = max(worst, len(splits))
        d = decompose(t)
        if splits:
            _, r = splits[0]
            agree = isinstance(d, Split) and redex_term(d.redex) == r and plug_eval(d.ctx, r) == t
        else:
            agree = isinstance(d, NormalForm)
        bad += not agree
    secs = time.perf_counter() - start
    ok = worst <= 1 and bad == 0 and secs < 30
    return report(1, ok, f"unique decomposition: 1000 terms, max splits {worst}, {bad} disagreements, {secs:.2f} s (limit 30 s)")


def criterion_2():
    bad = sum(is_stuck(t) != (not isinstance(t, Lam) and matches_stuck(t)) for t in sample())
    return report(2, bad == 0, f"stuck characterization: {bad} disagreements on 1000 terms")


def criterion_3():
    rng = random.Random(3)
    fails, missing, total = 0, 0, 0
    for ax in kh_axioms():
        for _ in range(50):
            lhs, rhs = instantiate(ax, rng, 8)
            total += 1
            fails += cps_equiv(lhs, rhs, 5000) is not Equivalence.EQUIV
            d = kh_search(lhs, rhs, 2)
            missing += d is None or not d.replay()
    ok = fails == 0 and missing == 0
    return report(3, ok, f"axiom soundness: {total} instances of 8 axioms, {fails} not CPS-equivalent, {missing} without a depth-2 derivation")


def criterion_4():
    results, _ = corpus_run()
    names = [n for n in results if n.startswith(("reset-lift-", "reset-reset-"))]
    clean = [
        n for n in names
        if results[n].relaxed == (NO_COUNTEREXAMPLE, NONE_FOUND)
    ]
    lift = sum(n.startswith("reset-lift-") for n in names)
    nested = sum(n.startswith("reset-reset-") for n in names)
    ok = lift >= 5 and nested >= 5 and len(clean) == len(names)
    return report(4, ok, f"reset lifting ({lift}) and nested resets ({nested}): {len(clean)}/{len(names)} clean in relaxed game and falsifier")


def criterion_5():
    t, s = parse("\\x. x"), parse("S k. k (\\x. x)")
    start = time.perf_counter()
    v = falsify_relaxed(t, s)
    secs = time.perf_counter() - start
    results, _ = corpus_run()
    r = results["shift-elim-value"]
    ok = (
        v.kind == COUNTEREXAMPLE
        and v.context == HOLE
        and v.observed == ("value", "stuck")
        and secs < 1
        and r.original == (NO_COUNTEREXAMPLE, NONE_FOUND)
    )
    return report(
        5, ok,
        f"S k. k t vs t: relaxed {v.kind} at [] ({v.observed[0]} vs {v.observed[1]}) in {secs * 1000:.0f} ms; "
        f"original {r.original[0]} / {r.original[1]}",
    )


def criterion_6():
    results, _ = corpus_run()
    r = results["omega-stuck"]
    ok = r.relaxed[0] == LIKELY_DISTINGUISHED and r.original == (NO_COUNTEREXAMPLE, NONE_FOUND)
    return report(6, ok, f"divergence vs stuck divergence: relaxed {r.relaxed[0]}; original {r.original[0]} / {r.original[1]}")


def criterion_7():
    results, _ = corpus_run()
    rows = {
        "s-tail-omega": LIKELY_DISTINGUISHED,
        "s-tail-general-omega": LIKELY_DISTINGUISHED,
        "s-tail-id": NO_COUNTEREXAMPLE,
        "s-tail-general-id": NO_COUNTEREXAMPLE,
    }
    ok = True
    parts = []
    for name, game in rows.items():
        r = results[name]
        good = r.relaxed[0] == game and r.original == (NO_COUNTEREXAMPLE, NONE_FOUND)
        if game == NO_COUNTEREXAMPLE:
            good = good and r.relaxed[1] == NONE_FOUND
        ok = ok and good
        parts.append(f"{name} {r.relaxed[0]}/{r.original[0]}")
    return report(7, ok, "S-tail: " + ", ".join(parts))


ZERO = "(\\f. \\x. x)"
SUCC = "(\\n. \\f. \\x. f (n f x))"
MULT = "(\\m. \\n. \\f. m (n f))"
PRED = "(\\n. \\f. \\x. n (\\g. \\h. h (g f)) (\\u. x) (\\u. u))"
IS_ZERO = "(\\n. n (\\d. \\a. \\b. b) (\\a. \\b. a))"
# branches are thunks so only the chosen one runs
FACT_STEP = f"(\\fact. \\n. {IS_ZERO} n (\\d. {SUCC} {ZERO}) (\\d. {MULT} n (fact ({PRED} n))) (\\d. d))"


def church(k):
    return "(\\f. \\x. " + "f (" * k + "x" + ")" * k + ")"


def criterion_8():
    results, _ = corpus_run()
    game = check_programs(parse_term("THETA"), parse_term("THETA-SHIFT")).kind
    ok = game == NO_COUNTEREXAMPLE and results["fixpoint-shift"].original[0] == NO_COUNTEREXAMPLE
    facts = []
    for n, expect in enumerate((1, 1, 2, 6)):
        # apply the result to successor and zero so the value is canonical
        ref = evaluate(parse(f"{church(expect)} {SUCC} {ZERO}"), 10_000)
        outs = [evaluate(parse_term(f"{fix} {FACT_STEP} {church(n)} {SUCC} {ZERO}"), 100_000) for fix in ("THETA", "THETA-SHIFT")]
        good = all(o.kind == "value" and alpha_eq(o.term, ref.term) for o in outs)
        good = good and alpha_eq(outs[0].term, outs[1].term)
        good = good and all(alpha_eq(beta_normalize(o.term, 10_000), parse(church(expect))) for o in outs)
        ok = ok and good
        facts.append(f"{n}!={expect} {'ok' if good else 'bad'}")
    return report(8, ok, f"fixed points: original game {game}; factorial " + ", ".join(facts))


def criterion_9():
    rng = random.Random(9)
    counts = {e: 0 for e in Equivalence}
    while sum(counts.values()) < 200:
        t = random_closed(rng, 30)
        o = evaluate(Reset(t), 2000)
        if o.kind != "value":
            continue
        counts[cps_equiv(Reset(t), o.term, 5000)] += 1
    unknown = counts[Equivalence.UNKNOWN] / 200
    ok = counts[Equivalence.INEQUIV] == 0 and unknown < 0.05
    return report(
        9, ok,
        f"CPS adequacy: 200 terms, {counts[Equivalence.EQUIV]} equiv, {counts[Equivalence.INEQUIV]} inequiv, "
        f"{unknown:.1%} unknown (limit 5%)",
    )


def criterion_10():
    results, secs = corpus_run()
    bad = []
    for name, r in results.items():
        relaxed_clean = r.relaxed == (NO_COUNTEREXAMPLE, NONE_FOUND)
        program_hit = r.original[0] != NO_COUNTEREXAMPLE or r.original[1] in (COUNTEREXAMPLE, LIKELY_COUNTEREXAMPLE)
        if relaxed_clean and program_hit:
            bad.append(name)
    ok = not bad and secs < 60
    return report(10, ok, f"inclusion over {len(results)} corpus entries: {len(bad)} violations; corpus run {secs:.1f} s (limit 60 s)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
