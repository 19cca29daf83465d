"""CPS translation, beta-eta normalization, and the Kameyama-Hasegawa axioms.

Two terms are CPS equivalent when their CPS images are beta-eta
convertible.  :func:`cps_equiv` decides this on instances where both images
have a beta normal form within the fuel; :func:`kh_search` looks for an
equational derivation using the eight axioms.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .syntax import (
    APP,
    HOLE,
    LAM,
    VAR,
    App,
    AppL,
    AppR,
    Context,
    Lam,
    Reset,
    Shift,
    Term,
    Var,
    alpha_eq,
    alpha_key,
    canonical,
    fresh,
    from_key,
    occurs_free,
    plug_pure,
    pretty,
    subst,
)

# ---------------------------------------------------------------------------
# CPS translation


def cps_translate(t: Term) -> Term:
    """Call-by-value CPS with one continuation parameter.

    ``[x]      = \\c. c x``
    ``[\\x. t]  = \\c. c (\\x. [t])``
    ``[t0 t1]  = \\c. [t0] (\\f. [t1] (\\a. f a c))``
    ``[<t>]    = \\c. c ([t] (\\w. w))``
    ``[S k. t] = \\c. (\\k. [t]) (\\a. \\c'. c' (c a)) (\\w. w)``
    """
    c = fresh("c")
    match t:
        case Var(x):
            return Lam(c, App(Var(c), t))
        case Lam(x, b):
            return Lam(c, App(Var(c), Lam(x, cps_translate(b))))
        case App(f0, a0):
            f, a = fresh("f"), fresh("a")
            inner = Lam(a, App(App(Var(f), Var(a)), Var(c)))
            return Lam(c, App(cps_translate(f0), Lam(f, App(cps_translate(a0), inner))))
        case Reset(b):
            w = fresh("w")
            return Lam(c, App(Var(c), App(cps_translate(b), Lam(w, Var(w)))))
        case Shift(k, b):
            a, c2, w = fresh("a"), fresh("c"), fresh("w")
            captured = Lam(a, Lam(c2, App(Var(c2), App(Var(c), Var(a)))))
            return Lam(c, App(App(Lam(k, cps_translate(b)), captured), Lam(w, Var(w))))
    raise TypeError(t)


def is_pure_term(t: Term) -> bool:
    match t:
        case Var():
            return True
        case Lam(_, b):
            return is_pure_term(b)
        case App(f, a):
            return is_pure_term(f) and is_pure_term(a)
    return False


# ---------------------------------------------------------------------------
# beta-eta normalization on nameless keys
#
# Keys are those of ``syntax.alpha_key``: (VAR, int) bound, (VAR, str) free,
# (LAM, body), (APP, f, a).


class _OutOfFuel(Exception):
    pass


def _shift(t, d, cutoff=0):
    tag = t[0]
    if tag == VAR:
        i = t[1]
        if isinstance(i, int) and i >= cutoff:
            return (VAR, i + d)
        return t
    if tag == LAM:
        return (LAM, _shift(t[1], d, cutoff + 1))
    return (APP, _shift(t[1], d, cutoff), _shift(t[2], d, cutoff))


def _subst(t, j, s):
    # t[j := s]; s is already shifted for the binder depth at t
    tag = t[0]
    if tag == VAR:
        return s if t[1] == j else t
    if tag == LAM:
        return (LAM, _subst(t[1], j + 1, _shift(s, 1)))
    return (APP, _subst(t[1], j, s), _subst(t[2], j, s))


def _beta(lam, arg):
    return _shift(_subst(lam[1], 0, _shift(arg, 1)), -1)


class _Normalizer:
    def __init__(self, fuel: int):
        self.fuel = fuel

    def whnf(self, t):
        if t[0] != APP:
            return t
        f = self.whnf(t[1])
        while f[0] == LAM:
            if self.fuel <= 0:
                raise _OutOfFuel
            self.fuel -= 1
            t = _beta(f, t[2])
            if t[0] != APP:
                return t
            f = self.whnf(t[1])
        return (APP, f, t[2])

    def nf(self, t):
        t = self.whnf(t)
        if t[0] == LAM:
            return (LAM, self.nf(t[1]))
        if t[0] == APP:
            return (APP, self.nf(t[1]), self.nf(t[2]))
        return t


def _free_index(t, i) -> bool:
    tag = t[0]
    if tag == VAR:
        return t[1] == i
    if tag == LAM:
        return _free_index(t[1], i + 1)
    return _free_index(t[1], i) or _free_index(t[2], i)


def _eta(t):
    tag = t[0]
    if tag == VAR:
        return t
    if tag == APP:
        return (APP, _eta(t[1]), _eta(t[2]))
    body = _eta(t[1])
    if body[0] == APP and body[2] == (VAR, 0) and not _free_index(body[1], 0):
        return _shift(body[1], -1)
    return (LAM, body)


def beta_eta_key(t: Term, fuel: int) -> Optional[tuple]:
    """Nameless beta-eta normal form of a pure term, or None when fuel runs out."""
    if not is_pure_term(t):
        raise ValueError("beta-eta normalization needs a term without shift/reset")
    try:
        k = _Normalizer(fuel).nf(alpha_key(t))
    except _OutOfFuel:
        return None
    while True:
        k2 = _eta(k)
        if k2 == k:
            return k
        k = k2


def beta_eta_normalize(t: Term, fuel: int) -> Optional[Term]:
    """Leftmost-outermost beta normal form, then eta; None on fuel exhaustion."""
    k = beta_eta_key(t, fuel)
    return None if k is None else from_key(k)


def beta_normalize(t: Term, fuel: int) -> Optional[Term]:
    """Beta normal form only (no eta); None on fuel exhaustion."""
    if not is_pure_term(t):
        raise ValueError("beta normalization needs a term without shift/reset")
    try:
        return from_key(_Normalizer(fuel).nf(alpha_key(t)))
    except _OutOfFuel:
        return None


class Equivalence(str, enum.Enum):
    EQUIV = "equiv"
    INEQUIV = "inequiv"
    UNKNOWN = "unknown"


def cps_equiv(t0: Term, t1: Term, fuel: int) -> Equivalence:
    n0 = beta_eta_key(cps_translate(t0), fuel)
    if n0 is None:
        return Equivalence.UNKNOWN
    n1 = beta_eta_key(cps_translate(t1), fuel)
    if n1 is None:
        return Equivalence.UNKNOWN
    return Equivalence.EQUIV if n0 == n1 else Equivalence.INEQUIV


# ---------------------------------------------------------------------------
# the eight axioms
#
# The axioms are stated on open terms with variables counted as values, so
# matching here accepts a variable wherever a value is expected.


def _kh_value(t: Term) -> bool:
    return t.__class__ in (Lam, Var)


def _pure_around_var(t: Term, x: str) -> Optional[Context]:
    """``E`` with ``t = E[x]``, ``E`` pure and ``x`` not free in ``E``."""
    match t:
        case Var(y) if y == x:
            return HOLE
        case App(f, a):
            if _kh_value(f):
                if occurs_free(x, f):
                    if f == Var(x) and not occurs_free(x, a):
                        return AppL(HOLE, a)
                    return None
                inner = _pure_around_var(a, x)
                return None if inner is None else AppR(f, inner)
            if occurs_free(x, a):
                return None
            inner = _pure_around_var(f, x)
            return None if inner is None else AppL(inner, a)
    return None


def _pure_around_shift(t: Term):
    """``(E, k, body)`` with ``t = E[S k. body]`` and ``E`` pure."""
    match t:
        case Shift(k, b):
            return HOLE, k, b
        case App(f, a):
            if _kh_value(f):
                found = _pure_around_shift(a)
                if found is None:
                    return None
                return AppR(f, found[0]), found[1], found[2]
            found = _pure_around_shift(f)
            if found is None:
                return None
            return AppL(found[0], a), found[1], found[2]
    return None


Bindings = Dict[str, object]


@dataclass(frozen=True)
class AxiomSchema:
    """One equation ``lhs = rhs`` with its metavariables.

    ``metavars`` lists ``(name, kind, scope)`` with kind one of ``name``,
    ``term``, ``value``, ``pure``; ``scope`` names the binder metavariables
    that may occur free in an instantiation.
    """

    name: str
    lhs_text: str
    rhs_text: str
    metavars: Tuple[Tuple[str, str, Tuple[str, ...]], ...]
    side_condition: str
    match: Callable[[Term], Optional[Bindings]] = field(repr=False, compare=False)
    lhs: Callable[[Bindings], Term] = field(repr=False, compare=False)
    rhs: Callable[[Bindings], Term] = field(repr=False, compare=False)
    side_ok: Callable[[Bindings], bool] = field(repr=False, compare=False)


def _m_beta_v(t):
    match t:
        case App(Lam(x, b), v) if _kh_value(v):
            return {"x": x, "t": b, "v": v}
    return None


def _m_beta_omega(t):
    match t:
        case App(Lam(x, b), arg):
            e = _pure_around_var(b, x)
            if e is not None:
                return {"x": x, "E": e, "t": arg}
    return None


def _m_shift(t):
    match t:
        case Reset(b):
            found = _pure_around_shift(b)
            if found is not None:
                e, k, body = found
                return {"E": e, "k": k, "t": body, "x": fresh("x")}
    return None


def _m_reset_lift(t):
    match t:
        case Reset(App(Lam(x, t0), Reset(t1))):
            return {"x": x, "t0": t0, "t1": t1}
    return None


def _m_reset_value(t):
    match t:
        case Reset(v) if _kh_value(v):
            return {"v": v}
    return None


def _m_shift_reset(t):
    match t:
        case Shift(k, Reset(b)):
            return {"k": k, "t": b}
    return None


def _m_eta_v(t):
    match t:
        case Lam(x, App(v, Var(y))) if y == x and _kh_value(v) and not occurs_free(x, v):
            return {"x": x, "v": v}
    return None


def _m_shift_elim(t):
    match t:
        case Shift(k, App(Var(j), b)) if j == k and not occurs_free(k, b):
            return {"k": k, "t": b}
    return None


def _ctx_avoids(b, var="x", ctx="E"):
    from .syntax import ctx_free_vars

    return b[var] not in ctx_free_vars(b[ctx])


_AXIOMS = (
    AxiomSchema(
        "beta_v", "(\\x. t) v", "t[x := v]",
        (("x", "name", ()), ("t", "term", ("x",)), ("v", "value", ())),
        "",
        _m_beta_v,
        lambda b: App(Lam(b["x"], b["t"]), b["v"]),
        lambda b: subst(b["t"], b["x"], b["v"]),
        lambda b: _kh_value(b["v"]),
    ),
    AxiomSchema(
        "beta_omega", "(\\x. E[x]) t", "E[t]",
        (("x", "name", ()), ("E", "pure", ()), ("t", "term", ())),
        "x not free in E",
        _m_beta_omega,
        lambda b: App(Lam(b["x"], plug_pure(b["E"], Var(b["x"]))), b["t"]),
        lambda b: plug_pure(b["E"], b["t"]),
        _ctx_avoids,
    ),
    AxiomSchema(
        "shift", "<E[S k. t]>", "<t[k := \\x. <E[x]>]>",
        (("k", "name", ()), ("E", "pure", ()), ("t", "term", ("k",)), ("x", "name", ())),
        "x not free in E",
        _m_shift,
        lambda b: Reset(plug_pure(b["E"], Shift(b["k"], b["t"]))),
        lambda b: Reset(subst(b["t"], b["k"], Lam(b["x"], Reset(plug_pure(b["E"], Var(b["x"])))))),
        _ctx_avoids,
    ),
    AxiomSchema(
        "reset_lift", "<(\\x. t0) <t1>>", "(\\x. <t0>) <t1>",
        (("x", "name", ()), ("t0", "term", ("x",)), ("t1", "term", ())),
        "",
        _m_reset_lift,
        lambda b: Reset(App(Lam(b["x"], b["t0"]), Reset(b["t1"]))),
        lambda b: App(Lam(b["x"], Reset(b["t0"])), Reset(b["t1"])),
        lambda b: True,
    ),
    AxiomSchema(
        "reset_value", "<v>", "v",
        (("v", "value", ()),),
        "",
        _m_reset_value,
        lambda b: Reset(b["v"]),
        lambda b: b["v"],
        lambda b: _kh_value(b["v"]),
    ),
    AxiomSchema(
        "shift_reset", "S k. <t>", "S k. t",
        (("k", "name", ()), ("t", "term", ("k",))),
        "",
        _m_shift_reset,
        lambda b: Shift(b["k"], Reset(b["t"])),
        lambda b: Shift(b["k"], b["t"]),
        lambda b: True,
    ),
    AxiomSchema(
        "eta_v", "\\x. v x", "v",
        (("x", "name", ()), ("v", "value", ())),
        "x not free in v",
        _m_eta_v,
        lambda b: Lam(b["x"], App(b["v"], Var(b["x"]))),
        lambda b: b["v"],
        lambda b: _kh_value(b["v"]) and not occurs_free(b["x"], b["v"]),
    ),
    AxiomSchema(
        "shift_elim", "S k. k t", "t",
        (("k", "name", ()), ("t", "term", ())),
        "k not free in t",
        _m_shift_elim,
        lambda b: Shift(b["k"], App(Var(b["k"]), b["t"])),
        lambda b: b["t"],
        lambda b: not occurs_free(b["k"], b["t"]),
    ),
)


def kh_axioms() -> List[AxiomSchema]:
    return list(_AXIOMS)


def axiom(name: str) -> AxiomSchema:
    for ax in _AXIOMS:
        if ax.name == name:
            return ax
    raise KeyError(name)


# ---------------------------------------------------------------------------
# derivations

Path = Tuple[int, ...]


def subterm(t: Term, path: Path) -> Term:
    for i in path:
        if t.__class__ is App:
            t = t.fn if i == 0 else t.arg
        else:
            t = t.body
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    i, rest = path[0], path[1:]
    match t:
        case App(f, a):
            return App(replace_at(f, rest, new), a) if i == 0 else App(f, replace_at(a, rest, new))
        case Lam(x, b) | Shift(x, b):
            return t.__class__(x, replace_at(b, rest, new))
        case Reset(b):
            return Reset(replace_at(b, rest, new))
    raise ValueError(f"bad path {path} for {t!r}")


def positions(t: Term, path: Path = ()):
    yield path, t
    match t:
        case App(f, a):
            yield from positions(f, path + (0,))
            yield from positions(a, path + (1,))
        case Lam(_, b) | Shift(_, b) | Reset(b):
            yield from positions(b, path + (0,))


@dataclass(frozen=True)
class Step:
    axiom: str
    direction: str  # "lr" rewrites lhs to rhs, "rl" the converse
    path: Path
    bindings: Bindings = field(compare=False)

    def describe(self) -> str:
        arrow = "->" if self.direction == "lr" else "<-"
        where = ".".join(map(str, self.path)) or "root"
        return f"{self.axiom} {arrow} at {where}"


@dataclass
class Derivation:
    start: Term
    end: Term
    steps: List[Step]

    def __len__(self) -> int:
        return len(self.steps)

    def replay(self) -> bool:
        """Apply the steps to ``start``; True iff the result is ``end`` up to alpha."""
        cur = canonical(self.start)
        for st in self.steps:
            cur = apply_step(cur, st)
            if cur is None:
                return False
            cur = canonical(cur)
        return alpha_eq(cur, self.end)

    def lines(self) -> List[str]:
        out = [pretty(self.start)]
        cur = canonical(self.start)
        for st in self.steps:
            cur = canonical(apply_step(cur, st))
            out.append(f"  = {pretty(cur)}    [{st.describe()}]")
        return out


def apply_step(t: Term, st: Step) -> Optional[Term]:
    ax = axiom(st.axiom)
    b = st.bindings
    src, dst = (ax.lhs, ax.rhs) if st.direction == "lr" else (ax.rhs, ax.lhs)
    try:
        here = subterm(t, st.path)
    except AttributeError:
        return None
    if not ax.side_ok(b) or not alpha_eq(here, src(b)):
        return None
    return replace_at(t, st.path, dst(b))


def _rewrites(t: Term):
    for path, sub in positions(t):
        for ax in _AXIOMS:
            b = ax.match(sub)
            if b is not None and ax.side_ok(b):
                yield Step(ax.name, "lr", path, b), replace_at(t, path, ax.rhs(b))


def kh_search(t0: Term, t1: Term, depth: int) -> Optional[Derivation]:
    """Bounded search for an axiom derivation of ``t0 = t1``.

    Breadth-first from both ends at once, rewriting left to right at every
    position; a term reached from both sides closes the derivation (the
    right-hand half is replayed backwards).  Visited terms are kept by
    alpha-key.  ``depth`` bounds the total derivation length.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    k0, k1 = alpha_key(t0), alpha_key(t1)
    if k0 == k1:
        return Derivation(t0, t1, [])
    seen = ({k0: []}, {k1: []})
    frontier = ([canonical(t0)], [canonical(t1)])
    levels = [0, 0]
    while levels[0] + levels[1] < depth:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        if not frontier[side]:
            side = 1 - side
            if not frontier[side]:
                return None
        nxt = []
        for t in frontier[side]:
            here = seen[side][alpha_key(t)]
            for st, u in _rewrites(t):
                u = canonical(u)
                ku = alpha_key(u)
                if ku in seen[side]:
                    continue
                path = here + [st]
                seen[side][ku] = path
                if ku in seen[1 - side]:
                    other = seen[1 - side][ku]
                    fw, bw = (path, other) if side == 0 else (other, path)
                    back = [Step(s.axiom, "rl", s.path, s.bindings) for s in reversed(bw)]
                    return Derivation(t0, t1, fw + back)
                nxt.append(u)
        frontier[side][:] = nxt
        levels[side] += 1
    return None
