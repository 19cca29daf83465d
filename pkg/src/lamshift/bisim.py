"""Bounded environmental-bisimulation games.

A play starts from a pair of closed terms with an empty (or seeded)
environment.  Each round first discharges the pending term pairs: both
sides are run, normal forms must agree in kind, and agreeing normal forms
join the environment.  Then every environment pair is tested: value pairs
are applied to argument pairs drawn from the environment's value closure,
stuck pairs are put under resets with context pairs from its context
closure.  The tests are the next round's pending pairs.

The search is bounded by fuel, closure budgets and the number of rounds,
so ``no-counterexample`` is evidence, not a proof.  Verdicts never claim
more than the evaluations show: a normal form facing a timeout is only
``likely-distinguished``.

Up-to techniques used to keep plays small:

* one growing environment per play (up to environment);
* a pair already related by the term closure of the environment, or equal
  to a discharged pair under related evaluation contexts, is not replayed
  (up to context);
* for the same reason, normal forms already related by the closure are not
  added to the environment.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .closures import (
    PROGRAM,
    PURE,
    RELAXED,
    ClosureBudget,
    Environment,
    closure_related,
    ctx_closure_pairs,
    value_closure_pairs,
)
from . import kernel
from .semantics import (
    Outcome,
    evaluate,
    evaluate_cached,
    stuck_parts,
    _require_closed,
)
from .syntax import (
    APP,
    LAM,
    RESET,
    Context,
    Lam,
    Reset,
    Term,
    Var,
    alpha_eq,
    alpha_key,
    compose,
    ctx_key,
    fresh,
    plug_pure,
    pretty,
    pretty_ctx,
    size_exceeds,
    subst,
    subst_closed,
)
from ._pykernel import MAX_TERM_SIZE

DISTINGUISHED = "distinguished"
LIKELY_DISTINGUISHED = "likely-distinguished"
NO_COUNTEREXAMPLE = "no-counterexample"

LOCKSTEP_PREFIX = 64


@dataclass(frozen=True)
class GameConfig:
    fuel: int = 2000
    closure: ClosureBudget = ClosureBudget(5, 48)
    depth: int = 3
    big_step: bool = False
    max_obligations: int = 1500

    def __post_init__(self):
        if self.fuel < 1 or self.depth < 1 or self.max_obligations < 1:
            raise ValueError("fuel, depth and max_obligations must be positive")

    def describe(self) -> dict:
        return {
            "fuel": self.fuel,
            "closure_budget": self.closure.max_nodes,
            "closure_pairs": self.closure.max_pairs,
            "depth": self.depth,
            "big_step": self.big_step,
            "max_obligations": self.max_obligations,
        }


@dataclass(frozen=True)
class Move:
    """One line of a game transcript.

    kinds: ``reduce`` (side, steps), ``value``/``stuck`` (pair reached),
    ``timeout`` (side), ``test-value`` (entry, argument pair),
    ``test-stuck`` (entry, context pair), ``wrap-reset`` (context pair),
    ``mismatch`` (outcome kinds).
    """

    kind: str
    data: tuple = ()

    def line(self) -> str:
        k, d = self.kind, self.data
        if k == "reduce":
            return f"reduce {d[0]} {d[1]}"
        if k in ("value", "stuck"):
            return f"{k} {pretty(d[0])} | {pretty(d[1])}"
        if k == "timeout":
            return f"timeout {d[0]}"
        if k == "test-value":
            return f"test-value {pretty(d[0][0])} | {pretty(d[0][1])} with {pretty(d[1][0])} | {pretty(d[1][1])}"
        if k == "test-stuck":
            return f"test-stuck {pretty(d[0][0])} | {pretty(d[0][1])} with {pretty_ctx(d[1][0])} | {pretty_ctx(d[1][1])}"
        if k == "wrap-reset":
            return f"wrap-reset {pretty_ctx(d[0])} | {pretty_ctx(d[1])}"
        if k == "mismatch":
            return f"mismatch {d[0]} | {d[1]}"
        return k


@dataclass
class Verdict:
    kind: str
    trace: Tuple[Move, ...] = ()
    caveat: Optional[str] = None
    config: Optional[GameConfig] = None
    stats: dict = field(default_factory=dict)

    def lines(self) -> List[str]:
        out = [self.kind]
        if self.caveat:
            out.append(f"caveat {self.caveat}")
        out.extend(m.line() for m in self.trace)
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


@dataclass
class _Obligation:
    t0: Term
    t1: Term
    trace: Tuple[Move, ...]


def _reduces(*counts) -> Tuple[Move, ...]:
    return tuple(Move("reduce", c) for c in counts if c[1])


def _is_program(t: Term) -> bool:
    return t.__class__ is Reset


class _Game:
    def __init__(self, cfg: GameConfig, mode: str, seed: Optional[Environment]):
        self.cfg = cfg
        self.mode = mode
        self.env = Environment(mode)
        self.entry_trace = {}
        if seed is not None:
            for t0, t1 in seed:
                self._add_entry(t0, t1, ())
        self.discharged = set()
        self.wrapped = set()
        self.tested = set()
        self.likely: Optional[Verdict] = None
        self.obligations = 0
        self.skipped = 0
        self.truncated = False
        self._streams = {}
        self.deferred: deque = deque()

    def _stream(self, which):
        # closure streams are taken from the environment as it stood when
        # the round began, so a round's tests do not depend on the order its
        # obligations were discharged in
        if which not in self._streams:
            if which == "values":
                self._streams[which] = list(value_closure_pairs(self.env, self.cfg.closure))
            else:
                self._streams[which] = list(ctx_closure_pairs(self.env, self.cfg.closure, PURE))
        return self._streams[which]

    # -- environment ----------------------------------------------------

    def _add_entry(self, t0, t1, trace):
        k0, k1 = alpha_key(t0), alpha_key(t1)
        if closure_related(k0, k1, self.env.key_set()):
            return
        if self.env.add(t0, t1):
            self.entry_trace[(k0, k1)] = trace

    def _factored(self, k0, k1, env_keys) -> bool:
        # F0[u0] / F1[u1] with related evaluation contexts and (u0, u1) discharged
        while True:
            if (k0, k1) in self.discharged:
                return True
            if k0[0] != k1[0]:
                return False
            if k0[0] == APP:
                if closure_related(k0[2], k1[2], env_keys):
                    k0, k1 = k0[1], k1[1]
                    continue
                if k0[1][0] == LAM and closure_related(k0[1], k1[1], env_keys):
                    k0, k1 = k0[2], k1[2]
                    continue
                return False
            if k0[0] == RESET:
                k0, k1 = k0[1], k1[1]
                continue
            return False

    # -- running terms --------------------------------------------------

    def _run_pair(self, t0, t1):
        """Outcomes of both sides plus the reduce moves that led there."""
        fuel = self.cfg.fuel
        if self.cfg.big_step:
            o0, o1 = evaluate_cached(t0, fuel), evaluate_cached(t1, fuel)
            return o0, o1, _reduces((0, o0.steps), (1, o1.steps)), False
        # small-step: side 1 answers each step of side 0 with one step of its
        # own, so the pair stays aligned; aligned pairs already related by the
        # closure are discharged on the spot
        env_keys = self.env.key_set()
        a, b = t0, t1
        n = 0
        limit = min(fuel, LOCKSTEP_PREFIX)
        while n < limit:
            if size_exceeds(a, MAX_TERM_SIZE) or size_exceeds(b, MAX_TERM_SIZE):
                break
            if closure_related(alpha_key(a), alpha_key(b), env_keys):
                return None, None, _reduces(("both", n)), True
            ka, na, sa, _ = kernel.run(a, 1, False)
            kb, nb, sb, _ = kernel.run(b, 1, False)
            if sa == 0 and sb == 0:
                break
            a, b = na, nb
            n += 1
        o0, o1 = evaluate_cached(a, fuel - n), evaluate_cached(b, fuel - n)
        moves = _reduces(("both", n), (0, o0.steps), (1, o1.steps))
        o0 = replace(o0, steps=o0.steps + n)
        o1 = replace(o1, steps=o1.steps + n)
        return o0, o1, moves, False

    # -- the game ---------------------------------------------------------

    def _verdict(self, kind, trace, caveat=None):
        return Verdict(kind, trace, caveat, self.cfg, self._stats())

    def _stats(self):
        return {
            "obligations": self.obligations,
            "skipped": self.skipped,
            "environment": len(self.env),
            "truncated": self.truncated,
        }

    def discharge(self, ob: _Obligation, queue) -> Optional[Verdict]:
        k0, k1 = alpha_key(ob.t0), alpha_key(ob.t1)
        env_keys = self.env.key_set()
        if (k0, k1) in self.wrapped or closure_related(k0, k1, env_keys) or self._factored(k0, k1, env_keys):
            self.skipped += 1
            return None
        self.obligations += 1

        if self.mode == PROGRAM and not (_is_program(ob.t0) and _is_program(ob.t1)):
            # only evaluated pairs may justify skipping under a context
            self.wrapped.add((k0, k1))
            # the bare reset first; larger contexts wait until the round's
            # other obligations are done
            for i, (e0, e1) in enumerate(self._stream("contexts")):
                (queue if i == 0 else self.deferred).append(
                    _Obligation(
                        Reset(plug_pure(e0, ob.t0)),
                        Reset(plug_pure(e1, ob.t1)),
                        ob.trace + (Move("wrap-reset", (e0, e1)),),
                    )
                )
            return None

        self.discharged.add((k0, k1))
        o0, o1, moves, converged = self._run_pair(ob.t0, ob.t1)
        if converged:
            return None
        trace = ob.trace + moves
        if o0.kind == "timeout" and o1.kind == "timeout":
            return None
        if o0.kind == o1.kind:
            self._add_entry(o0.term, o1.term, trace + (Move(o0.kind, (o0.term, o1.term)),))
            return None
        if o0.kind == "timeout" or o1.kind == "timeout":
            side = 0 if o0.kind == "timeout" else 1
            v = self._verdict(
                LIKELY_DISTINGUISHED,
                trace + (Move("timeout", (side,)), Move("mismatch", (o0.kind, o1.kind))),
                timeout_caveat(side, o0 if side == 0 else o1, self.cfg.fuel),
            )
            if self.likely is None:
                self.likely = v
            return None
        return self._verdict(
            DISTINGUISHED,
            trace + (Move("mismatch", (o0.kind, o1.kind)),),
        )

    def tests(self) -> Iterator[_Obligation]:
        """Tests of the environment as it stands, produced on demand.

        Argument-major order: every entry meets the smallest test pairs
        before any entry meets a larger one.
        """
        entries = []
        for entry in self.env.pairs:
            k = (alpha_key(entry[0]), alpha_key(entry[1]))
            parts = None if entry[0].__class__ is Lam else (stuck_parts(entry[0]), stuck_parts(entry[1]))
            entries.append((entry, k, self.entry_trace.get(k, ()), parts))
        args = self._stream("values")
        ctxs = self._stream("contexts")
        for i in range(max(len(args), len(ctxs))):
            for entry, k, prefix, parts in entries:
                if parts is None:
                    if i >= len(args):
                        continue
                    w0, w1 = args[i]
                    tk = (k, alpha_key(w0), alpha_key(w1))
                    if tk in self.tested:
                        continue
                    self.tested.add(tk)
                    yield _Obligation(
                        subst_closed(entry[0].body, entry[0].var, w0),
                        subst_closed(entry[1].body, entry[1].var, w1),
                        prefix + (Move("test-value", (entry, (w0, w1))),),
                    )
                else:
                    if i >= len(ctxs):
                        continue
                    c0, c1 = ctxs[i]
                    tk = (k, ctx_key(c0), ctx_key(c1))
                    if tk in self.tested:
                        continue
                    self.tested.add(tk)
                    yield _Obligation(
                        _capture(parts[0], c0),
                        _capture(parts[1], c1),
                        prefix + (Move("test-stuck", (entry, (c0, c1))),),
                    )

    def play(self, t0: Term, t1: Term) -> Verdict:
        source: Iterator[_Obligation] = iter([_Obligation(t0, t1, ())])
        cap = self.cfg.max_obligations
        for rnd in range(self.cfg.depth + 1):
            self._streams = {}
            # each round gets a fair share of what is left, so a wide early
            # round cannot starve the later ones
            share = self.obligations + (cap - self.obligations) // (self.cfg.depth + 1 - rnd)
            if rnd == self.cfg.depth:
                share = cap
            queue: deque = deque()
            while True:
                if queue:
                    ob = queue.popleft()
                else:
                    ob = next(source, None)
                    if ob is None:
                        if not self.deferred:
                            break
                        ob = self.deferred.popleft()
                if self.obligations >= share:
                    if queue:
                        self.deferred.extendleft(reversed(queue))
                    self.deferred.appendleft(ob)
                    break
                v = self.discharge(ob, queue)
                if v is not None:
                    return v
            if rnd == self.cfg.depth:
                self.truncated = bool(queue or self.deferred) or next(source, None) is not None
                break
            self._streams = {}
            source = self.tests()
        if self.likely is not None:
            self.likely.stats = self._stats()
            return self.likely
        caveat = None
        if self.truncated:
            caveat = f"search truncated by the limit of {cap} obligations"
        return self._verdict(NO_COUNTEREXAMPLE, (), caveat)


def timeout_caveat(side, outcome: Outcome, fuel: int) -> str:
    if outcome.oversize:
        return f"side {side} outgrew the term-size bound ({MAX_TERM_SIZE} nodes) after {outcome.steps} steps"
    if outcome.cyclic:
        return f"side {side} ran out of fuel ({fuel} steps); divergence proven by a cycle"
    return f"side {side} ran out of fuel ({fuel} steps)"


def _capture(parts, outer: Context) -> Term:
    """``<t[k := \\x. <E'[E[x]]>]>`` for a stuck ``E[S k. t]`` tested in ``E'``."""
    e, k, body = parts
    x = fresh("x")
    return Reset(subst(body, k, Lam(x, Reset(plug_pure(compose(outer, e), Var(x))))))


def check_relaxed(
    t0: Term, t1: Term, cfg: GameConfig = GameConfig(), seed: Optional[Environment] = None
) -> Verdict:
    """Play the relaxed-semantics game, where stuck terms are observable."""
    _require_closed(t0)
    _require_closed(t1)
    return _Game(cfg, RELAXED, seed).play(t0, t1)


def check_programs(
    t0: Term, t1: Term, cfg: GameConfig = GameConfig(), seed: Optional[Environment] = None
) -> Verdict:
    """Play the game for the semantics with a top-level reset.

    Terms that are not both programs are first compared under pairs of pure
    contexts and a reset; only evaluation to values is observed.
    """
    _require_closed(t0)
    _require_closed(t1)
    return _Game(cfg, PROGRAM, seed).play(t0, t1)


# ---------------------------------------------------------------------------
# replay


def replay(t0: Term, t1: Term, trace: Sequence[Move], fuel: int) -> Optional[Tuple[str, str]]:
    """Re-run a transcript; returns the observed outcome kinds at its end.

    Every reached normal form and every constructed test pair is recomputed
    with the semantics, so the result does not trust the game.
    """
    cur = (t0, t1)
    for m in trace:
        if m.kind == "wrap-reset":
            e0, e1 = m.data
            cur = (Reset(plug_pure(e0, cur[0])), Reset(plug_pure(e1, cur[1])))
        elif m.kind in ("value", "stuck"):
            o0, o1 = evaluate(cur[0], fuel), evaluate(cur[1], fuel)
            if o0.kind != m.kind or o1.kind != m.kind:
                return None
            if not (alpha_eq(o0.term, m.data[0]) and alpha_eq(o1.term, m.data[1])):
                return None
            cur = (o0.term, o1.term)
        elif m.kind == "test-value":
            (v0, v1), (w0, w1) = m.data
            if not (alpha_eq(v0, cur[0]) and alpha_eq(v1, cur[1])):
                return None
            cur = (subst(v0.body, v0.var, w0), subst(v1.body, v1.var, w1))
        elif m.kind == "test-stuck":
            (s0, s1), (c0, c1) = m.data
            if not (alpha_eq(s0, cur[0]) and alpha_eq(s1, cur[1])):
                return None
            cur = (_capture(stuck_parts(s0), c0), _capture(stuck_parts(s1), c1))
        elif m.kind == "mismatch":
            o0, o1 = evaluate(cur[0], fuel), evaluate(cur[1], fuel)
            return o0.kind, o1.kind
    return None


# ---------------------------------------------------------------------------
# inclusion of the relaxed equivalence in the program one


@dataclass
class InclusionRow:
    t0: Term
    t1: Term
    relaxed: str
    programs: str

    @property
    def ok(self) -> bool:
        return not (self.relaxed == NO_COUNTEREXAMPLE and self.programs != NO_COUNTEREXAMPLE)


@dataclass
class InclusionReport:
    rows: List[InclusionRow]

    @property
    def violations(self) -> List[InclusionRow]:
        return [r for r in self.rows if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_inclusion_property(pairs: Iterable[Tuple[Term, Term]], cfg: GameConfig = GameConfig()) -> InclusionReport:
    """Clean under the relaxed game must imply clean under the program game."""
    rows = []
    for t0, t1 in pairs:
        rows.append(InclusionRow(t0, t1, check_relaxed(t0, t1, cfg).kind, check_programs(t0, t1, cfg).kind))
    return InclusionReport(rows)
