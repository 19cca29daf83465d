"""Terms and contexts of the call-by-value lambda calculus with shift and reset.

Terms are immutable and named.  Equality of terms as *objects* is
structural on names; the equality used by every algorithm downstream is
alpha-equivalence, exposed as :func:`alpha_eq` and :func:`alpha_key`.

Contexts share one set of frame classes.  A context is pure when its spine
holds only :class:`AppL`/:class:`AppR` frames with value functions, an
evaluation context when it may also hold :class:`ResetFrame`, and a general
context when holes may sit under binders (:class:`LamFrame`,
:class:`ShiftFrame`) or right of an arbitrary term.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Mapping, Tuple, Union


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    body: "Term"


@dataclass(frozen=True, slots=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class Shift:
    var: str
    body: "Term"


@dataclass(frozen=True, slots=True)
class Reset:
    body: "Term"


Term = Union[Var, Lam, App, Shift, Reset]
Value = Lam
Substitution = Mapping[str, Lam]


def is_value(t: Term) -> bool:
    return t.__class__ is Lam


def app(*ts: Term) -> Term:
    """Left-nested application ``t0 t1 ... tn``."""
    out = ts[0]
    for t in ts[1:]:
        out = App(out, t)
    return out


def lams(names, body: Term) -> Term:
    for x in reversed(list(names)):
        body = Lam(x, body)
    return body


def size(t: Term) -> int:
    """Number of syntax nodes."""
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        c = u.__class__
        if c is App:
            stack.append(u.fn)
            stack.append(u.arg)
        elif c is not Var:
            stack.append(u.body)
    return n


def size_exceeds(t: Term, limit: int) -> bool:
    """Whether ``t`` has more than ``limit`` nodes.

    Substitution shares subterms, so a term can be exponentially larger than
    the objects it is made of.  Shared nodes are sized once, so the answer
    costs time in the number of distinct objects, at most ``limit``-ish.
    """
    memo = {}

    def go(u):
        k = id(u)
        n = memo.get(k)
        if n is not None:
            return n
        c = u.__class__
        if c is Var:
            n = 1
        elif c is App:
            n = go(u.fn)
            if n <= limit:
                n += go(u.arg) + 1
        else:
            n = go(u.body) + 1
        memo[k] = n
        return n

    return go(t) > limit


# ---------------------------------------------------------------------------
# fresh names
#
# Fresh names carry a ``#n`` suffix, which no parsed identifier can contain,
# so they never collide with user names.  The printer strips the suffix.

_counter = itertools.count(1)


def fresh(base: str = "x") -> str:
    return f"{base_name(base)}#{next(_counter)}"


def base_name(name: str) -> str:
    return name.split("#", 1)[0]


# ---------------------------------------------------------------------------
# free variables, alpha-equivalence


def free_vars(t: Term) -> FrozenSet[str]:
    match t:
        case Var(x):
            return frozenset((x,))
        case Lam(x, b) | Shift(x, b):
            return free_vars(b) - {x}
        case App(f, a):
            return free_vars(f) | free_vars(a)
        case Reset(b):
            return free_vars(b)
    raise TypeError(f"not a term: {t!r}")


def is_closed(t: Term) -> bool:
    return not free_vars(t)


def occurs_free(x: str, t: Term) -> bool:
    match t:
        case Var(y):
            return x == y
        case Lam(y, b) | Shift(y, b):
            return x != y and occurs_free(x, b)
        case App(f, a):
            return occurs_free(x, f) or occurs_free(x, a)
        case Reset(b):
            return occurs_free(x, b)
    raise TypeError(f"not a term: {t!r}")


# Nameless keys.  Bound variables become integers (de Bruijn indices), free
# variables stay strings; binders drop their names.  Two terms are
# alpha-equivalent iff their keys are equal.
VAR, LAM, APP, SHIFT, RESET = range(5)


def alpha_key(t: Term, env: Tuple[str, ...] = ()) -> tuple:
    match t:
        case Var(x):
            for i in range(len(env) - 1, -1, -1):
                if env[i] == x:
                    return (VAR, len(env) - 1 - i)
            return (VAR, x)
        case Lam(x, b):
            return (LAM, alpha_key(b, env + (x,)))
        case App(f, a):
            return (APP, alpha_key(f, env), alpha_key(a, env))
        case Shift(x, b):
            return (SHIFT, alpha_key(b, env + (x,)))
        case Reset(b):
            return (RESET, alpha_key(b, env))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(t0: Term, t1: Term) -> bool:
    return alpha_key(t0) == alpha_key(t1)


_CANON = ("x", "y", "z", "w", "u", "v", "a", "b", "c", "d")


def canon_name(depth: int) -> str:
    """Binder name used for terms rebuilt from keys or enumerated."""
    if depth < len(_CANON):
        return _CANON[depth]
    return f"x{depth}"


def from_key(key: tuple, depth: int = 0) -> Term:
    """Rebuild a named term from a nameless key.

    Binders are named by depth with a ``#`` marker, so they cannot capture
    any user-written free name, and equal keys rebuild to identical terms.
    """
    tag = key[0]
    if tag == VAR:
        i = key[1]
        if isinstance(i, str):
            return Var(i)
        return Var(canon_name(depth - 1 - i) + "#")
    if tag == LAM:
        return Lam(canon_name(depth) + "#", from_key(key[1], depth + 1))
    if tag == APP:
        return App(from_key(key[1], depth), from_key(key[2], depth))
    if tag == SHIFT:
        return Shift(canon_name(depth) + "#", from_key(key[1], depth + 1))
    return Reset(from_key(key[1], depth))


def canonical(t: Term) -> Term:
    """The representative of ``t``'s alpha-class with canonical binder names."""
    return from_key(alpha_key(t))


# ---------------------------------------------------------------------------
# substitution


def subst(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding ``t[x := v]``."""
    return subst_many(t, {x: v})


def subst_many(t: Term, sigma: Mapping[str, Term]) -> Term:
    """Simultaneous capture-avoiding substitution."""
    if not sigma:
        return t
    fvs = frozenset().union(*(free_vars(v) for v in sigma.values()))
    return _subst(t, dict(sigma), fvs)


def _subst(t: Term, sigma: Dict[str, Term], fvs: FrozenSet[str]) -> Term:
    match t:
        case Var(x):
            return sigma.get(x, t)
        case App(f, a):
            return App(_subst(f, sigma, fvs), _subst(a, sigma, fvs))
        case Reset(b):
            return Reset(_subst(b, sigma, fvs))
        case Lam(x, b) | Shift(x, b):
            inner = {y: v for y, v in sigma.items() if y != x}
            if not inner:
                return t
            if x in fvs:
                y = fresh(x)
                b = _subst(b, {x: Var(y)}, frozenset((y,)))
                x = y
            return t.__class__(x, _subst(b, inner, fvs))
    raise TypeError(f"not a term: {t!r}")


def subst_closed(t: Term, x: str, v: Term) -> Term:
    """``t[x := v]`` for a closed ``v``; no renaming is ever needed."""
    c = t.__class__
    if c is Var:
        return v if t.name == x else t
    if c is App:
        return App(subst_closed(t.fn, x, v), subst_closed(t.arg, x, v))
    if c is Reset:
        return Reset(subst_closed(t.body, x, v))
    if t.var == x:
        return t
    return c(t.var, subst_closed(t.body, x, v))


# ---------------------------------------------------------------------------
# contexts
#
# Frames are listed outside-in, as in the grammar: ``AppL(inner, arg)`` is
# ``inner[.] arg`` and ``AppR(fn, inner)`` is ``fn inner[.]``.


@dataclass(frozen=True, slots=True)
class Hole:
    pass


@dataclass(frozen=True, slots=True)
class AppL:
    inner: "Context"
    arg: Term


@dataclass(frozen=True, slots=True)
class AppR:
    fn: Term
    inner: "Context"


@dataclass(frozen=True, slots=True)
class ResetFrame:
    inner: "Context"


@dataclass(frozen=True, slots=True)
class LamFrame:
    var: str
    inner: "Context"


@dataclass(frozen=True, slots=True)
class ShiftFrame:
    var: str
    inner: "Context"


Context = Union[Hole, AppL, AppR, ResetFrame, LamFrame, ShiftFrame]
PureContext = Context
EvalContext = Context
GeneralContext = Context

HOLE = Hole()


def is_pure(c: Context) -> bool:
    while True:
        match c:
            case Hole():
                return True
            case AppL(inner, _):
                c = inner
            case AppR(fn, inner) if is_value(fn):
                c = inner
            case _:
                return False


def is_eval(c: Context) -> bool:
    while True:
        match c:
            case Hole():
                return True
            case AppL(inner, _) | ResetFrame(inner):
                c = inner
            case AppR(fn, inner) if is_value(fn):
                c = inner
            case _:
                return False


def embed(e: PureContext) -> EvalContext:
    """Pure contexts are evaluation contexts; the frames are shared."""
    if not is_pure(e):
        raise ValueError("not a pure context")
    return e


def plug_general(c: Context, t: Term) -> Term:
    """Fill the hole of ``c`` with ``t``; free variables of ``t`` may be captured."""
    match c:
        case Hole():
            return t
        case AppL(inner, a):
            return App(plug_general(inner, t), a)
        case AppR(f, inner):
            return App(f, plug_general(inner, t))
        case ResetFrame(inner):
            return Reset(plug_general(inner, t))
        case LamFrame(x, inner):
            return Lam(x, plug_general(inner, t))
        case ShiftFrame(x, inner):
            return Shift(x, plug_general(inner, t))
    raise TypeError(f"not a context: {c!r}")


def plug_pure(e: PureContext, t: Term) -> Term:
    return plug_general(e, t)


def plug_eval(f: EvalContext, t: Term) -> Term:
    return plug_general(f, t)


def compose(outer: Context, inner: Context) -> Context:
    """The context ``outer[inner[.]]``."""
    match outer:
        case Hole():
            return inner
        case AppL(c, a):
            return AppL(compose(c, inner), a)
        case AppR(f, c):
            return AppR(f, compose(c, inner))
        case ResetFrame(c):
            return ResetFrame(compose(c, inner))
        case LamFrame(x, c):
            return LamFrame(x, compose(c, inner))
        case ShiftFrame(x, c):
            return ShiftFrame(x, compose(c, inner))
    raise TypeError(f"not a context: {outer!r}")


def ctx_free_vars(c: Context) -> FrozenSet[str]:
    match c:
        case Hole():
            return frozenset()
        case AppL(inner, a):
            return ctx_free_vars(inner) | free_vars(a)
        case AppR(f, inner):
            return free_vars(f) | ctx_free_vars(inner)
        case ResetFrame(inner):
            return ctx_free_vars(inner)
        case LamFrame(x, inner) | ShiftFrame(x, inner):
            return ctx_free_vars(inner) - {x}
    raise TypeError(f"not a context: {c!r}")


def ctx_size(c: Context) -> int:
    """Nodes in a context, counting the hole as one."""
    match c:
        case Hole():
            return 1
        case AppL(inner, a):
            return 1 + ctx_size(inner) + size(a)
        case AppR(f, inner):
            return 1 + size(f) + ctx_size(inner)
        case ResetFrame(inner) | LamFrame(_, inner) | ShiftFrame(_, inner):
            return 1 + ctx_size(inner)
    raise TypeError(f"not a context: {c!r}")


def ctx_key(c: Context) -> tuple:
    """Alpha-invariant key of a closed context (the hole is a free ``[.]``)."""
    return alpha_key(plug_general(c, Var("[.]")))


# ---------------------------------------------------------------------------
# concrete syntax
#
#   t ::= x | \x. t | t t | S x. t | < t >
#
# Application is left-associative, binder bodies extend as far right as
# possible, parentheses group.  ``λ`` is accepted for ``\``.


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:([A-Za-z][A-Za-z0-9_']*)|(\\|λ)|(\.)|(\()|(\))|(<)|(>))")
_KINDS = ("ident", "lam", "dot", "lparen", "rparen", "langle", "rangle")


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        for kind, val in zip(_KINDS, m.groups()):
            if val is not None:
                start = m.start(m.lastindex)
                if kind == "ident" and val == "S":
                    kind = "shift"
                toks.append((kind, val, start))
                break
        pos = m.end()
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str):
        tok = self.toks[self.i]
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise ParseError(f"expected {kind}, found {shown!r}", tok[2])
        self.i += 1
        return tok

    def term(self) -> Term:
        kind = self.peek()[0]
        if kind == "lam":
            self.i += 1
            x = self.take("ident")[1]
            self.take("dot")
            return Lam(x, self.term())
        if kind == "shift":
            self.i += 1
            k = self.take("ident")[1]
            self.take("dot")
            return Shift(k, self.term())
        t = self.atom()
        while True:
            kind = self.peek()[0]
            if kind in ("lam", "shift"):
                return App(t, self.term())
            if kind in ("ident", "lparen", "langle"):
                t = App(t, self.atom())
            else:
                return t

    def atom(self) -> Term:
        kind, val, pos = self.peek()
        if kind == "ident":
            self.i += 1
            return Var(val)
        if kind == "lparen":
            self.i += 1
            t = self.term()
            self.take("rparen")
            return t
        if kind == "langle":
            self.i += 1
            t = self.term()
            self.take("rangle")
            return Reset(t)
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {val!r}", pos)
    return t


def _display_names(t: Term, env: Dict[str, str], free: Dict[str, str]):
    """Rename binders for display: strip fresh-name suffixes, then prime on clash."""
    match t:
        case Var(x):
            if x in env:
                return Var(env[x])
            return Var(free.setdefault(x, x))
        case App(f, a):
            return App(_display_names(f, env, free), _display_names(a, env, free))
        case Reset(b):
            return Reset(_display_names(b, env, free))
        case Lam(x, b) | Shift(x, b):
            taken = set()
            for y in free_vars(t):
                taken.add(env.get(y, y))
            name = base_name(x)
            while name in taken or name == "S":
                name += "'"
            inner = dict(env)
            inner[x] = name
            return t.__class__(name, _display_names(b, inner, free))
    raise TypeError(f"not a term: {t!r}")


def pretty(t: Term) -> str:
    """Concrete syntax; ``parse(pretty(t))`` is alpha-equivalent to ``t``."""
    return _show(_display_names(t, {}, {}))


def _show(t: Term, tail: bool = True) -> str:
    # ``tail``: nothing follows t, so a binder may extend to the right
    match t:
        case Var(x):
            return x
        case Lam(x, b):
            out = f"\\{x}. {_show(b)}"
            return out if tail else f"({out})"
        case Shift(k, b):
            out = f"S {k}. {_show(b)}"
            return out if tail else f"({out})"
        case Reset(b):
            return f"<{_show(b)}>"
        case App(f, a):
            right = f"({_show(a)})" if a.__class__ is App else _show(a, tail)
            return f"{_show(f, False)} {right}"
    raise TypeError(f"not a term: {t!r}")


def pretty_ctx(c: Context) -> str:
    return pretty(plug_general(c, Var("[.]"))).replace("[.]", "[]")
