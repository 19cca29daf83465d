"""Independent reference implementations used by the tests.

None of these reuse the package's own traversal code: terms are converted
to a locally nameless form (bound variables as indices, free ones by name)
and everything else is written directly against that.
"""

from __future__ import annotations

import random

from lamshift.syntax import App, Lam, Reset, Shift, Var


# -- locally nameless form --------------------------------------------------


def ln(t, bound=()):
    if isinstance(t, Var):
        if t.name in bound:
            return ("b", bound.index(t.name))
        return ("f", t.name)
    if isinstance(t, Lam):
        return ("l", ln(t.body, (t.var,) + bound))
    if isinstance(t, Shift):
        return ("s", ln(t.body, (t.var,) + bound))
    if isinstance(t, App):
        return ("a", ln(t.fn, bound), ln(t.arg, bound))
    if isinstance(t, Reset):
        return ("r", ln(t.body, bound))
    raise TypeError(t)


def ln_subst(t, x, v):
    """Replace free ``x`` by ``v``; bound indices never clash with names."""
    tag = t[0]
    if tag == "f":
        return v if t[1] == x else t
    if tag == "b":
        return t
    if tag == "a":
        return ("a", ln_subst(t[1], x, v), ln_subst(t[2], x, v))
    return (tag, ln_subst(t[1], x, v))


def ln_free(t):
    tag = t[0]
    if tag == "f":
        return {t[1]}
    if tag == "b":
        return set()
    if tag == "a":
        return ln_free(t[1]) | ln_free(t[2])
    return ln_free(t[1])


def from_ln(t, depth=0):
    tag = t[0]
    if tag == "f":
        return Var(t[1])
    if tag == "b":
        return Var(f"v{depth - 1 - t[1]}")
    if tag == "a":
        return App(from_ln(t[1], depth), from_ln(t[2], depth))
    if tag == "r":
        return Reset(from_ln(t[1], depth))
    cls = Lam if tag == "l" else Shift
    return cls(f"v{depth}", from_ln(t[1], depth + 1))


# -- exhaustive enumeration -------------------------------------------------


def all_ln_terms(n, depth=0):
    """Every locally nameless term with exactly ``n`` nodes over ``depth`` binders."""
    out = []
    if n == 1:
        out.extend(("b", i) for i in range(depth))
        return out
    for body in all_ln_terms(n - 1, depth + 1):
        out.append(("l", body))
        out.append(("s", body))
    out.extend(("r", b) for b in all_ln_terms(n - 1, depth))
    for left in range(1, n - 1):
        rights = all_ln_terms(n - 1 - left, depth)
        for f in all_ln_terms(left, depth):
            out.extend(("a", f, a) for a in rights)
    return out


def closed_terms_upto(n):
    return [t for k in range(1, n + 1) for t in all_ln_terms(k)]


def ln_size(t):
    if t[0] in ("f", "b"):
        return 1
    if t[0] == "a":
        return 1 + ln_size(t[1]) + ln_size(t[2])
    return 1 + ln_size(t[1])


def star_related(a, b, env):
    """Direct recursive test for the term-generating closure of ``env``.

    ``env`` is a set of pairs in locally nameless form.  Terms are related
    when they are an environment pair, the same variable, or built by the
    same constructor from related parts.
    """
    if (a, b) in env:
        return True
    if a[0] != b[0]:
        return False
    if a[0] in ("b", "f"):
        return a == b
    if a[0] == "a":
        return star_related(a[1], b[1], env) and star_related(a[2], b[2], env)
    return star_related(a[1], b[1], env)


# -- splits and stuck terms -------------------------------------------------


def _positions(t, path=()):
    yield path, t
    if isinstance(t, App):
        yield from _positions(t.fn, path + (0,))
        yield from _positions(t.arg, path + (1,))
    elif isinstance(t, (Lam, Shift, Reset)):
        yield from _positions(t.body, path + (0,))


def _frames(t, path):
    """The (parent, index) pairs along ``path``."""
    out = []
    for i in path:
        out.append((t, i))
        t = t.fn if isinstance(t, App) and i == 0 else t.arg if isinstance(t, App) else t.body
    return out


def _pure_path(t, path):
    for parent, i in _frames(t, path):
        if not isinstance(parent, App):
            return False
        if i == 1 and not isinstance(parent.fn, Lam):
            return False
    return True


def _eval_path(t, path):
    for parent, i in _frames(t, path):
        if isinstance(parent, Reset):
            continue
        if not isinstance(parent, App):
            return False
        if i == 1 and not isinstance(parent.fn, Lam):
            return False
    return True


def matches_stuck(t):
    """``t = E[S k. u]`` for a pure ``E``, checked position by position."""
    return any(isinstance(s, Shift) and _pure_path(t, p) for p, s in _positions(t))


def is_redex(t):
    if isinstance(t, App):
        return isinstance(t.fn, Lam) and isinstance(t.arg, Lam)
    if isinstance(t, Reset):
        return isinstance(t.body, Lam) or matches_stuck(t.body)
    return False


def brute_splits(t):
    """Every ``(path, redex)`` with ``t = F[redex]`` for an evaluation context ``F``."""
    return [(p, s) for p, s in _positions(t) if is_redex(s) and _eval_path(t, p)]


# -- random axiom instances -------------------------------------------------


def instantiate(ax, rng: random.Random, size: int = 8):
    """A random closed instance ``(lhs, rhs)`` of an axiom schema."""
    from lamshift.randterm import NAMES, random_context, random_term, random_value

    while True:
        b = {}
        for name, kind, scope in ax.metavars:
            if kind == "name":
                b[name] = rng.choice(NAMES)
        for name, kind, scope in ax.metavars:
            sc = tuple(b[s] for s in scope)
            n = rng.randint(1, size)
            if kind == "term":
                b[name] = random_term(rng, n, sc)
            elif kind == "value":
                b[name] = random_value(rng, max(n, 2), sc)
            elif kind == "pure":
                b[name] = random_context(rng, rng.randint(0, 4), pure=True)
        if ax.side_ok(b):
            return ax.lhs(b), ax.rhs(b)
