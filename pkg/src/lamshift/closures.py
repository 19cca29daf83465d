"""Environments and budgeted enumerators for their term and context closures.

The term-generating closure of an environment relates ``t0`` and ``t1`` when
they have the same shape except where an environment pair is substituted.
It is infinite, so enumeration is budgeted: each side has at most
``max_nodes`` nodes and at most ``max_pairs`` pairs are yielded.  Streams
are ordered by the size of the larger side, then structurally, and contain
each pair once up to alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .syntax import (
    APP,
    HOLE,
    LAM,
    RESET,
    SHIFT,
    VAR,
    App,
    AppL,
    AppR,
    Context,
    Lam,
    Reset,
    ResetFrame,
    Shift,
    Term,
    Var,
    alpha_key,
    canon_name,
    ctx_key,
    free_vars,
    lams,
    size,
)

RELAXED = "relaxed"
PROGRAM = "program"


@dataclass
class Environment:
    """Finite relation on closed normal forms, deduplicated up to alpha.

    In relaxed mode pairs relate two values or two stuck terms; in program
    mode only values.
    """

    mode: str = RELAXED
    pairs: List[Tuple[Term, Term]] = field(default_factory=list)
    _keys: Dict[Tuple[tuple, tuple], int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        pairs, self.pairs = self.pairs, []
        for p in pairs:
            self.add(*p)

    def add(self, t0: Term, t1: Term) -> bool:
        """Add a pair; False if it was already present."""
        from .semantics import is_stuck

        v0, v1 = t0.__class__ is Lam, t1.__class__ is Lam
        if self.mode == PROGRAM and not (v0 and v1):
            raise ValueError("program environments relate values only")
        if v0 != v1 or (not v0 and not (is_stuck(t0) and is_stuck(t1))):
            raise ValueError("environment pairs relate two values or two stuck terms")
        key = (alpha_key(t0), alpha_key(t1))
        if key in self._keys:
            return False
        self._keys[key] = len(self.pairs)
        self.pairs.append((t0, t1))
        return True

    def __contains__(self, pair) -> bool:
        return (alpha_key(pair[0]), alpha_key(pair[1])) in self._keys

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def key_set(self) -> frozenset:
        return frozenset(self._keys)

    def copy(self) -> "Environment":
        return Environment(self.mode, list(self.pairs))

    def values(self):
        return [p for p in self.pairs if p[0].__class__ is Lam]

    def stuck(self):
        return [p for p in self.pairs if p[0].__class__ is not Lam]


@dataclass(frozen=True)
class ClosureBudget:
    max_nodes: int = 5
    max_pairs: Optional[int] = None

    def __post_init__(self):
        if self.max_nodes < 1 or (self.max_pairs is not None and self.max_pairs < 1):
            raise ValueError("closure budgets must be positive")


# ---------------------------------------------------------------------------
# term closure


class _Gen:
    """Closure pairs whose sides fit per-side node budgets.

    Generators yield ``(t0, t1, n0, n1)`` with the node counts of each side,
    so budgets can be split without re-measuring.  With ``unit_leaves`` an
    environment pair counts as one node per side.  With ``lazy`` set nothing
    is materialized, so a capped stream only pays for the prefix it yields;
    otherwise results are cached as lists.
    """

    def __init__(self, leaves: Tuple[Tuple[Term, Term], ...], lazy: bool, unit_leaves: bool = False):
        if unit_leaves:
            self.leaves = tuple((p[0], p[1], 1, 1) for p in leaves)
        else:
            self.leaves = tuple((p[0], p[1], size(p[0]), size(p[1])) for p in leaves)
        self.lazy = lazy
        self.cache: dict = {}

    def _get(self, kind, b0, b1, depth, make):
        if self.lazy:
            return make(b0, b1, depth)
        ck = (kind, b0, b1, depth)
        if ck not in self.cache:
            self.cache[ck] = list(make(b0, b1, depth))
        return self.cache[ck]

    def terms(self, b0: int, b1: int, depth: int):
        return self._get("t", b0, b1, depth, self._terms)

    def values(self, b0: int, b1: int, depth: int):
        return self._get("v", b0, b1, depth, self._values)

    def ctxs(self, b0: int, b1: int, pure: bool):
        return self._get("p" if pure else "e", b0, b1, pure, self._ctxs)

    def _leaves(self, b0, b1, values_only):
        for leaf in self.leaves:
            if leaf[2] <= b0 and leaf[3] <= b1 and (not values_only or leaf[0].__class__ is Lam):
                yield leaf

    def _values(self, b0, b1, depth):
        if b0 < 1 or b1 < 1:
            return
        yield from self._leaves(b0, b1, True)
        x = canon_name(depth)
        for c0, c1, n0, n1 in self.terms(b0 - 1, b1 - 1, depth + 1):
            yield Lam(x, c0), Lam(x, c1), n0 + 1, n1 + 1

    def _terms(self, b0, b1, depth):
        if b0 < 1 or b1 < 1:
            return
        for i in range(depth):
            v = Var(canon_name(i))
            yield v, v, 1, 1
        yield from self._leaves(b0, b1, False)
        x = canon_name(depth)
        for c0, c1, n0, n1 in self.terms(b0 - 1, b1 - 1, depth + 1):
            yield Lam(x, c0), Lam(x, c1), n0 + 1, n1 + 1
        for c0, c1, n0, n1 in self.terms(b0 - 1, b1 - 1, depth + 1):
            yield Shift(x, c0), Shift(x, c1), n0 + 1, n1 + 1
        for c0, c1, n0, n1 in self.terms(b0 - 1, b1 - 1, depth):
            yield Reset(c0), Reset(c1), n0 + 1, n1 + 1
        for f0, f1, m0, m1 in self.terms(b0 - 2, b1 - 2, depth):
            for a0, a1, n0, n1 in self.terms(b0 - 1 - m0, b1 - 1 - m1, depth):
                yield App(f0, a0), App(f1, a1), m0 + n0 + 1, m1 + n1 + 1

    def _ctxs(self, b0, b1, pure):
        if b0 < 1 or b1 < 1:
            return
        yield HOLE, HOLE, 1, 1
        # AppR: a value pair from the closure, then the inner context
        for v0, v1, m0, m1 in self.values(b0 - 2, b1 - 2, 0):
            for e0, e1, n0, n1 in self.ctxs(b0 - 1 - m0, b1 - 1 - m1, pure):
                yield AppR(v0, e0), AppR(v1, e1), m0 + n0 + 1, m1 + n1 + 1
        # AppL: the inner context, then an argument pair
        for e0, e1, m0, m1 in self.ctxs(b0 - 2, b1 - 2, pure):
            for a0, a1, n0, n1 in self.terms(b0 - 1 - m0, b1 - 1 - m1, 0):
                yield AppL(e0, a0), AppL(e1, a1), m0 + n0 + 1, m1 + n1 + 1
        if not pure:
            for e0, e1, n0, n1 in self.ctxs(b0 - 1, b1 - 1, pure):
                yield ResetFrame(e0), ResetFrame(e1), n0 + 1, n1 + 1


def _stream(budget: ClosureBudget, sized, key) -> Iterator:
    """Pairs ordered by their larger side, deduplicated, capped."""
    seen = set()
    count = 0
    for n in range(1, budget.max_nodes + 1):
        for p0, p1, n0, n1 in sized(n):
            if max(n0, n1) != n:
                continue
            k = (key(p0), key(p1))
            if k in seen:
                continue
            seen.add(k)
            yield p0, p1
            count += 1
            if budget.max_pairs is not None and count >= budget.max_pairs:
                return


def term_closure_pairs(env: Environment, budget: ClosureBudget) -> Iterator[Tuple[Term, Term]]:
    """Closed pairs of the term-generating closure of ``env``."""
    g = _Gen(tuple(env.pairs), budget.max_pairs is not None)
    return _stream(budget, lambda n: g.terms(n, n, 0), alpha_key)


def value_closure_pairs(env: Environment, budget: ClosureBudget) -> Iterator[Tuple[Lam, Lam]]:
    """Closed value pairs of the term-generating closure of ``env``."""
    g = _Gen(tuple(env.pairs), budget.max_pairs is not None)
    return _stream(budget, lambda n: g.values(n, n, 0), alpha_key)


# ---------------------------------------------------------------------------
# context closure

PURE = "pure"
EVAL = "eval"


def ctx_closure_pairs(env: Environment, budget: ClosureBudget, kind: str = EVAL) -> Iterator[Tuple[Context, Context]]:
    """Closed context pairs of the context-generating closure of ``env``.

    Sizes count the hole as one node; the budget applies to each context.
    ``kind=PURE`` leaves out reset frames.
    """
    if kind not in (PURE, EVAL):
        raise ValueError(f"unknown context kind {kind!r}")
    g = _Gen(tuple(env.pairs), budget.max_pairs is not None)
    return _stream(budget, lambda n: g.ctxs(n, n, kind == PURE), ctx_key)


def atom_contexts(atoms, max_nodes: int, kind: str = EVAL) -> List[Context]:
    """Closed contexts built from ``atoms`` (closed values) by the closure rules.

    Here each atom counts as a single node: atoms play the part of named
    constants, so the budget measures context structure only.
    """
    if kind not in (PURE, EVAL):
        raise ValueError(f"unknown context kind {kind!r}")
    g = _Gen(tuple((a, a) for a in atoms), True, unit_leaves=True)
    pairs = _stream(ClosureBudget(max_nodes), lambda n: g.ctxs(n, n, kind == PURE), ctx_key)
    return [c for c, _ in pairs]


# ---------------------------------------------------------------------------
# membership


def in_term_closure(t0: Term, t1: Term, env: Environment) -> bool:
    """Whether ``t0`` and ``t1`` are related by the term closure of ``env``."""
    return closure_related(alpha_key(t0), alpha_key(t1), env.key_set())


def closure_related(k0: tuple, k1: tuple, env_keys: frozenset) -> bool:
    if k0 == k1 or (k0, k1) in env_keys:
        return True
    tag = k0[0]
    if tag != k1[0] or tag == VAR:
        return False
    if tag == APP:
        return closure_related(k0[1], k1[1], env_keys) and closure_related(k0[2], k1[2], env_keys)
    return closure_related(k0[1], k1[1], env_keys)


# ---------------------------------------------------------------------------
# open extension


def open_extension_close(t: Term, *others: Term) -> Term:
    """Abstract the free variables of ``t`` (and of ``others``) in sorted order."""
    fv = set(free_vars(t))
    for u in others:
        fv |= free_vars(u)
    return lams(sorted(fv), t)


def open_extension_pair(t0: Term, t1: Term) -> Tuple[Term, Term]:
    return open_extension_close(t0, t1), open_extension_close(t1, t0)
