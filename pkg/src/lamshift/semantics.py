"""Call-by-value reduction semantics: decomposition, one-step reduction, evaluation.

``decompose`` and ``reduce_step`` implement the three rules directly on
contexts and are the reference.  ``evaluate`` runs the same rules through
the evaluation kernel (compiled when available), which is checked against
iterated ``reduce_step`` in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Union

from . import kernel
from .syntax import (
    HOLE,
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
    free_vars,
    fresh,
    from_key,
    plug_eval,
    plug_pure,
    subst,
)


class OpenTermError(ValueError):
    """Raised when a closed term is required."""


def _require_closed(t: Term) -> None:
    fv = free_vars(t)
    if fv:
        raise OpenTermError(f"term is not closed: free {sorted(fv)}")


# ---------------------------------------------------------------------------
# redexes and decompositions


@dataclass(frozen=True)
class BetaV:
    """``(\\x. body) arg`` with ``arg`` a value."""

    var: str
    body: Term
    arg: Lam


@dataclass(frozen=True)
class ShiftCapture:
    """``<E[S k. body]>`` with ``E`` pure."""

    ctx: Context
    var: str
    body: Term


@dataclass(frozen=True)
class ResetValue:
    """``<v>``."""

    value: Lam


Redex = Union[BetaV, ShiftCapture, ResetValue]


def redex_term(r: Redex) -> Term:
    match r:
        case BetaV(x, b, v):
            return App(Lam(x, b), v)
        case ShiftCapture(e, k, b):
            return Reset(plug_pure(e, Shift(k, b)))
        case ResetValue(v):
            return Reset(v)
    raise TypeError(r)


@dataclass(frozen=True)
class NormalForm:
    kind: str  # "value" | "stuck"


@dataclass(frozen=True)
class Split:
    ctx: Context
    redex: Redex


Decomposition = Union[NormalForm, Split]


def _dec(t: Term):
    # ("value",) | ("stuck", E, k, body) | ("split", F, redex)
    match t:
        case Lam():
            return ("value",)
        case Shift(k, b):
            return ("stuck", HOLE, k, b)
        case App(f, a):
            d = _dec(f)
            if d[0] == "split":
                return ("split", AppL(d[1], a), d[2])
            if d[0] == "stuck":
                return ("stuck", AppL(d[1], a), d[2], d[3])
            d = _dec(a)
            if d[0] == "split":
                return ("split", AppR(f, d[1]), d[2])
            if d[0] == "stuck":
                return ("stuck", AppR(f, d[1]), d[2], d[3])
            return ("split", HOLE, BetaV(f.var, f.body, a))
        case Reset(b):
            d = _dec(b)
            if d[0] == "split":
                return ("split", ResetFrame(d[1]), d[2])
            if d[0] == "stuck":
                return ("split", HOLE, ShiftCapture(d[1], d[2], d[3]))
            return ("split", HOLE, ResetValue(b))
        case Var(x):
            raise OpenTermError(f"free variable {x!r}")
    raise TypeError(t)


def decompose(t: Term) -> Decomposition:
    """Split a closed term into its unique evaluation context and redex."""
    _require_closed(t)
    d = _dec(t)
    if d[0] == "value":
        return NormalForm("value")
    if d[0] == "stuck":
        return NormalForm("stuck")
    return Split(d[1], d[2])


def stuck_parts(t: Term):
    """For a stuck closed ``t = E[S k. body]`` return ``(E, k, body)``, else None."""
    d = _dec(t)
    if d[0] != "stuck":
        return None
    return d[1], d[2], d[3]


def contract(r: Redex) -> Term:
    match r:
        case BetaV(x, b, v):
            return subst(b, x, v)
        case ShiftCapture(e, k, b):
            # the rule asks for x not free in E; a globally fresh name is used always
            x = fresh("x")
            return Reset(subst(b, k, Lam(x, Reset(plug_pure(e, Var(x))))))
        case ResetValue(v):
            return v
    raise TypeError(r)


def reduce_step(t: Term) -> Optional[Term]:
    """One reduction step, or None if ``t`` is a normal form."""
    d = decompose(t)
    if isinstance(d, NormalForm):
        return None
    return plug_eval(d.ctx, contract(d.redex))


def is_stuck(t: Term) -> bool:
    _require_closed(t)
    return _dec(t)[0] == "stuck"


def is_normal_form(t: Term) -> bool:
    _require_closed(t)
    return _dec(t)[0] != "split"


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Outcome:
    """Result of a fuelled evaluation.

    ``kind`` is ``"value"``, ``"stuck"`` or ``"timeout"``.  For a timeout,
    ``term`` is where evaluation stopped and ``steps`` the fuel spent;
    ``cyclic`` is set when the reduction sequence was seen to revisit a term,
    which proves divergence; ``oversize`` when the run stopped early because
    the term outgrew the kernel's size bound.
    """

    kind: str
    term: Term
    steps: int
    cyclic: bool = False
    oversize: bool = False

    @property
    def is_normal(self) -> bool:
        return self.kind != "timeout"

    def __str__(self) -> str:
        from .syntax import pretty

        if self.kind == "timeout":
            return "timeout"
        return f"{self.kind}: {pretty(self.term)}"


_KINDS = ("value", "stuck", "timeout")


def evaluate(t: Term, fuel: int) -> Outcome:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    _require_closed(t)
    kind, term, steps, reason = kernel.run(t, fuel)
    return Outcome(_KINDS[kind], term, steps, reason == 1, reason == 2)


def evaluate_trusted(t: Term, fuel: int) -> Outcome:
    """``evaluate`` without the closedness check, for terms closed by construction."""
    kind, term, steps, reason = kernel.run(t, fuel)
    return Outcome(_KINDS[kind], term, steps, reason == 1, reason == 2)


@lru_cache(maxsize=200_000)
def _evaluate_key(key: tuple, fuel: int):
    kind, term, steps, reason = kernel.run(from_key(key), fuel)
    return _KINDS[kind], alpha_key(term) if kind != 2 else None, steps, reason


def evaluate_cached(t: Term, fuel: int) -> Outcome:
    """``evaluate`` memoized on the alpha-class of ``t``.

    Timeouts come back with the input term in place of the stopping point;
    the games and falsifiers never look at it.
    """
    _require_closed(t)
    kind, key, steps, reason = _evaluate_key(alpha_key(t), fuel)
    term = from_key(key) if key is not None else t
    return Outcome(kind, term, steps, reason == 1, reason == 2)


def trace(t: Term, fuel: int) -> List[Term]:
    """The reduction sequence from ``t``, at most ``fuel`` steps long."""
    _require_closed(t)
    out = [t]
    for _ in range(fuel):
        nxt = reduce_step(out[-1])
        if nxt is None:
            break
        out.append(nxt)
    return out
