"""Bounded falsifiers for contextual equivalence.

Instead of arbitrary closing contexts, the harness tests in a restricted
form: an evaluation context ``F`` and a closing substitution ``sigma``
whose range is a small fixed alphabet of closed values.  Contexts are
enumerated by size, smallest first, and the first mismatch in that order
is reported, so the answer does not depend on how the grid is split up.

Relaxed semantics: ``F[t0 sigma]`` and ``F[t1 sigma]`` must agree on
whether they evaluate to a value or get stuck.  Original semantics: the
terms run as programs ``<F[..]>`` and only evaluation to a value counts.
Open terms are closed by abstracting their free variables (sorted) and
applied to the alphabet values, which reduces to the same substitution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .bisim import NO_COUNTEREXAMPLE, GameConfig, check_programs, check_relaxed
from .closures import EVAL, atom_contexts, open_extension_close
from .semantics import Outcome, evaluate_cached, evaluate_trusted
from .syntax import (
    App,
    Context,
    Reset,
    Term,
    alpha_key,
    free_vars,
    parse,
    plug_eval,
    pretty,
    pretty_ctx,
    subst_many,
)

COUNTEREXAMPLE = "counterexample"
LIKELY_COUNTEREXAMPLE = "likely-counterexample"
NONE_FOUND = "none-found"

OMEGA = "(\\x. x x) (\\x. x x)"

# closing values: termination, result shape and control capture
ALPHABET: Tuple[Tuple[str, Term], ...] = tuple(
    (name, parse(text))
    for name, text in (
        ("id", "\\x. x"),
        ("true", "\\x. \\y. x"),
        ("false", "\\x. \\y. y"),  # also the Church numeral 0
        ("one", "\\f. \\x. f x"),
        ("two", "\\f. \\x. f (f x)"),
        ("div", f"\\x. {OMEGA}"),
        ("ctl", "\\x. S k. k x"),
    )
)


@dataclass(frozen=True)
class Budgets:
    ctx_size: int = 6
    fuel: int = 2000
    max_free: int = 3

    def __post_init__(self):
        if self.ctx_size < 1 or self.fuel < 1 or self.max_free < 0:
            raise ValueError("budgets must be positive")

    def describe(self) -> dict:
        return {"ctx_size": self.ctx_size, "fuel": self.fuel}


@dataclass
class FalsifyVerdict:
    kind: str
    context: Optional[Context] = None
    sigma: Tuple[Tuple[str, str], ...] = ()
    observed: Tuple[str, str] = ("", "")
    caveat: Optional[str] = None
    budgets: Budgets = field(default_factory=Budgets)
    checked: int = 0

    def lines(self) -> List[str]:
        out = [self.kind]
        if self.caveat:
            out.append(f"caveat {self.caveat}")
        if self.context is not None:
            out.append(f"context {pretty_ctx(self.context)}")
            out.append("sigma " + (", ".join(f"{x}:={v}" for x, v in self.sigma) or "-"))
            out.append(f"observed {self.observed[0]} | {self.observed[1]}")
        else:
            out.append(f"checked {self.checked}")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


_CTX_CACHE: dict = {}


def _contexts(n: int) -> List[Context]:
    if n not in _CTX_CACHE:
        _CTX_CACHE[n] = atom_contexts([v for _, v in ALPHABET], n, EVAL)
    return _CTX_CACHE[n]


def _sigmas(names: Sequence[str], budgets: Budgets):
    if len(names) > budgets.max_free:
        raise ValueError(f"{len(names)} free variables; the harness closes at most {budgets.max_free}")
    return itertools.product(ALPHABET, repeat=len(names))


def _closers(t0: Term, t1: Term, programs: bool, budgets: Budgets):
    """Yield ``(sigma names, closed t0, closed t1)`` for every closing assignment."""
    names = sorted(free_vars(t0) | free_vars(t1))
    if programs:
        c0, c1 = open_extension_close(t0, t1), open_extension_close(t1, t0)
    for combo in _sigmas(names, budgets):
        shown = tuple((x, n) for x, (n, _) in zip(names, combo))
        if programs:
            u0, u1 = c0, c1
            for _, v in combo:
                u0, u1 = App(u0, v), App(u1, v)
            yield shown, u0, u1
        else:
            m = {x: v for x, (_, v) in zip(names, combo)}
            yield shown, subst_many(t0, m), subst_many(t1, m)


def _observe(o: Outcome, programs: bool) -> str:
    if programs and o.kind == "stuck":
        # a program never gets stuck: the outer reset catches every shift
        raise AssertionError("stuck program")
    return o.kind


def _in_context(ctx: Context, pre: Outcome, fuel: int, programs: bool) -> Outcome:
    # F[t] first reduces t inside F, so a diverging t diverges everywhere and
    # a normalizing one can be replaced by its normal form, steps deducted
    if pre.kind == "timeout":
        return pre
    p = plug_eval(ctx, pre.term)
    if programs:
        p = Reset(p)
    o = evaluate_trusted(p, fuel - pre.steps)
    return Outcome(o.kind, o.term, o.steps + pre.steps, o.cyclic, o.oversize)


def _falsify(t0: Term, t1: Term, budgets: Budgets, programs: bool) -> FalsifyVerdict:
    likely: Optional[FalsifyVerdict] = None
    checked = 0
    closed = []
    for shown, u0, u1 in _closers(t0, t1, programs, budgets):
        pre0, pre1 = evaluate_trusted(u0, budgets.fuel), evaluate_trusted(u1, budgets.fuel)
        # both diverge, or both reach the same normal form: no context can differ
        if pre0.kind == pre1.kind == "timeout":
            continue
        if pre0.kind == pre1.kind and alpha_key(pre0.term) == alpha_key(pre1.term):
            continue
        closed.append((shown, pre0, pre1))
    for ctx in _contexts(budgets.ctx_size):
        for shown, pre0, pre1 in closed:
            o0 = _in_context(ctx, pre0, budgets.fuel, programs)
            o1 = _in_context(ctx, pre1, budgets.fuel, programs)
            checked += 1
            k0, k1 = _observe(o0, programs), _observe(o1, programs)
            if k0 == k1:
                continue
            if k0 != "timeout" and k1 != "timeout":
                return FalsifyVerdict(COUNTEREXAMPLE, ctx, shown, (k0, k1), None, budgets, checked)
            if likely is None:
                side = 0 if k0 == "timeout" else 1
                likely = FalsifyVerdict(
                    LIKELY_COUNTEREXAMPLE, ctx, shown, (k0, k1), _why(side, o0 if side == 0 else o1, budgets.fuel), budgets
                )
    if likely is not None:
        likely.checked = checked
        return likely
    return FalsifyVerdict(NONE_FOUND, budgets=budgets, checked=checked)


def _why(side: int, o: Outcome, fuel: int) -> str:
    if o.oversize:
        return f"side {side} outgrew the term-size bound after {o.steps} steps"
    if o.cyclic:
        return f"side {side} ran out of fuel ({fuel} steps); divergence proven by a cycle"
    return f"side {side} ran out of fuel ({fuel} steps)"


def falsify_relaxed(t0: Term, t1: Term, budgets: Budgets = Budgets()) -> FalsifyVerdict:
    """Search for a context and closing values telling values from stuck terms."""
    return _falsify(t0, t1, budgets, programs=False)


def falsify_programs(t0: Term, t1: Term, budgets: Budgets = Budgets()) -> FalsifyVerdict:
    """Search for a program context under which only one side returns a value.

    Programs cannot get stuck, so any counterexample rests on a timeout and
    is at best ``likely-counterexample``.
    """
    return _falsify(t0, t1, budgets, programs=True)


def replay(t0: Term, t1: Term, verdict: FalsifyVerdict, programs: bool) -> Tuple[str, str]:
    """Re-evaluate a reported witness and return the observed kinds."""
    names = dict(ALPHABET)
    m = {x: names[n] for x, n in verdict.sigma}
    if programs:
        u0, u1 = open_extension_close(t0, t1), open_extension_close(t1, t0)
        for x in sorted(m):
            u0, u1 = App(u0, m[x]), App(u1, m[x])
        p0, p1 = Reset(plug_eval(verdict.context, u0)), Reset(plug_eval(verdict.context, u1))
    else:
        p0 = plug_eval(verdict.context, subst_many(t0, m))
        p1 = plug_eval(verdict.context, subst_many(t1, m))
    return evaluate_cached(p0, verdict.budgets.fuel).kind, evaluate_cached(p1, verdict.budgets.fuel).kind


# ---------------------------------------------------------------------------
# four-way comparison


@dataclass
class Comparison:
    relaxed_game: str
    relaxed_falsifier: FalsifyVerdict
    programs_game: str
    programs_falsifier: FalsifyVerdict
    witnesses: dict = field(default_factory=dict)

    def table(self) -> List[str]:
        rows = [
            ("", "game", "falsifier"),
            ("relaxed", self.relaxed_game, self.relaxed_falsifier.kind),
            ("original", self.programs_game, self.programs_falsifier.kind),
        ]
        w = [max(len(r[i]) for r in rows) for i in range(3)]
        return ["  ".join(c.ljust(w[i]) for i, c in enumerate(r)).rstrip() for r in rows]


def compare_semantics(
    t0: Term, t1: Term, budgets: Budgets = Budgets(), cfg: Optional[GameConfig] = None
) -> Comparison:
    """Both games and both falsifiers on one pair.

    The games need closed terms; open pairs are closed by abstraction first.
    """
    cfg = cfg or GameConfig(fuel=budgets.fuel)
    c0, c1 = open_extension_close(t0, t1), open_extension_close(t1, t0)
    rg, pg = check_relaxed(c0, c1, cfg), check_programs(c0, c1, cfg)
    rf, pf = falsify_relaxed(t0, t1, budgets), falsify_programs(t0, t1, budgets)
    wit = {}
    for name, v in (("relaxed game", rg), ("original game", pg)):
        if v.kind != NO_COUNTEREXAMPLE:
            wit[name] = v.lines()
    for name, v in (("relaxed falsifier", rf), ("original falsifier", pf)):
        if v.kind != NONE_FOUND:
            wit[name] = v.lines()
    return Comparison(rg.kind, rf, pg.kind, pf, wit)
