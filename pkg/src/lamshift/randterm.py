"""Random terms and contexts for property tests and benchmarks.

Names come from a small pool so shadowing and capture are common.
"""

from __future__ import annotations

import random
from typing import Sequence

from .syntax import HOLE, App, AppL, AppR, Context, Lam, Reset, ResetFrame, Shift, Term, Var

NAMES = ("x", "y", "z", "k")


def random_term(rng: random.Random, size: int, scope: Sequence[str] = ()) -> Term:
    """A term of at most ``size`` nodes whose free variables lie in ``scope``."""
    scope = tuple(scope)
    if size <= 1:
        if scope:
            return Var(rng.choice(scope))
        x = rng.choice(NAMES)
        return Lam(x, Var(x))
    r = rng.random()
    if size == 2 or r < 0.3:
        x = rng.choice(NAMES)
        return Lam(x, random_term(rng, size - 1, scope + (x,)))
    if r < 0.6:
        left = rng.randint(1, size - 2)
        return App(random_term(rng, left, scope), random_term(rng, size - 1 - left, scope))
    if r < 0.75:
        k = rng.choice(NAMES)
        return Shift(k, random_term(rng, size - 1, scope + (k,)))
    if r < 0.9:
        return Reset(random_term(rng, size - 1, scope))
    return random_term(rng, 1, scope)


def random_closed(rng: random.Random, max_size: int = 30) -> Term:
    """A closed term, usually not a value at the root."""
    t = random_term(rng, rng.randint(1, max_size), ())
    while isinstance(t, Lam) and rng.random() < 0.8:
        t = random_term(rng, rng.randint(1, max_size), ())
    return t


def random_value(rng: random.Random, size: int, scope: Sequence[str] = ()) -> Term:
    x = rng.choice(NAMES)
    return Lam(x, random_term(rng, max(size - 1, 1), tuple(scope) + (x,)))


def random_context(rng: random.Random, size: int, pure: bool = False, scope: Sequence[str] = ()) -> Context:
    """A pure or evaluation context with about ``size`` nodes around the hole."""
    if size <= 0:
        return HOLE
    r = rng.random()
    if not pure and r < 0.25:
        return ResetFrame(random_context(rng, size - 1, pure, scope))
    part = rng.randint(0, size - 1)
    if r < 0.6:
        return AppL(random_context(rng, part, pure, scope), random_term(rng, max(size - 1 - part, 1), scope))
    return AppR(random_value(rng, max(size - 1 - part, 2), scope), random_context(rng, part, pure, scope))
