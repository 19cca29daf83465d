"""Command-line front end.

Exit codes: 0 success, 1 corpus expectation mismatch, 2 parse error,
3 open term where a closed one is needed, 4 bad budget.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional

from . import bisim, cps, ctxequiv, semantics
from .closures import ClosureBudget
from .corpus import load_corpus, parse_term, run_corpus
from .syntax import Lam, ParseError, pretty

EXIT_OK, EXIT_MISMATCH, EXIT_PARSE, EXIT_OPEN, EXIT_BUDGET = 0, 1, 2, 3, 4

DEFAULT_FUEL = 2000


class _Fail(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--semantics", choices=("relaxed", "original"), default="relaxed")
    common.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    common.add_argument("--closure-budget", type=int, default=5)
    common.add_argument("--depth", type=int, default=None, help="game rounds, or derivation length for kh")
    common.add_argument("--ctx-size", type=int, default=6)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--big-step", action="store_true", help="evaluate game pairs in one go")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for corpus runs")

    p = argparse.ArgumentParser(prog="lamshift", description="Shift/reset calculus workbench.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, n, text in (
        ("eval", 1, "evaluate a closed term"),
        ("trace", 1, "print the reduction sequence"),
        ("stuck", 1, "is the term stuck"),
        ("cps", 1, "CPS-translate a term"),
        ("cps-equiv", 2, "compare CPS images up to beta-eta"),
        ("kh", 2, "search for an axiom derivation"),
        ("bisim", 2, "play the bisimulation game"),
        ("falsify", 2, "search for a distinguishing context"),
        ("compare", 2, "games and falsifiers under both semantics"),
    ):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("terms", nargs=n, metavar="TERM")
    cp = sub.add_parser("corpus", parents=[common], help="run the example corpus")
    cp.add_argument("action", choices=("run",))
    cp.add_argument("--file", default=None, help="corpus file (default: the bundled one)")
    return p


def _terms(texts: List[str]):
    out = []
    for s in texts:
        try:
            out.append(parse_term(s))
        except ParseError as e:
            raise _Fail(EXIT_PARSE, f"parse error in {s!r}: {e}")
    return out


def _closed(t):
    try:
        semantics._require_closed(t)
    except semantics.OpenTermError as e:
        raise _Fail(EXIT_OPEN, str(e))


def _budgets(a):
    try:
        if a.fuel < 0:
            raise ValueError("fuel must be non-negative")
        depth = 3 if a.depth is None else a.depth
        cfg = bisim.GameConfig(
            fuel=max(a.fuel, 1),
            closure=ClosureBudget(a.closure_budget, 48),
            depth=depth,
            big_step=a.big_step,
        )
        fb = ctxequiv.Budgets(ctx_size=a.ctx_size, fuel=max(a.fuel, 1))
        if a.jobs < 1:
            raise ValueError("jobs must be positive")
    except ValueError as e:
        raise _Fail(EXIT_BUDGET, f"bad budget: {e}")
    return cfg, fb


def _emit(a, texts, verdict: str, witness, budgets: dict, start: float, lines: List[str]):
    if a.format == "json":
        obj = {
            "command": a.command,
            "input": texts,
            "verdict": verdict,
            "witness": witness,
            "budgets": budgets,
            "millis": int((time.perf_counter() - start) * 1000),
        }
        print(json.dumps(obj))
    else:
        for ln in lines:
            print(ln)


def _run(a) -> int:
    start = time.perf_counter()
    texts = getattr(a, "terms", [])
    if a.command == "corpus":
        return _corpus(a, start)
    ts = _terms(texts)
    cfg, fb = _budgets(a)

    if a.command in ("eval", "trace", "stuck"):
        (t,) = ts
        _closed(t)
        if a.command == "eval":
            o = semantics.evaluate(t, a.fuel)
            w = pretty(o.term) if o.kind != "timeout" else None
            _emit(a, texts, o.kind, w, {"fuel": a.fuel}, start, [str(o)])
        elif a.command == "trace":
            seq = semantics.trace(t, a.fuel)
            last = seq[-1]
            kind = "value" if isinstance(last, Lam) else "stuck" if semantics.is_stuck(last) else "timeout"
            shown = [pretty(u) for u in seq]
            _emit(a, texts, kind, shown, {"fuel": a.fuel}, start, shown + [kind])
        else:
            b = semantics.is_stuck(t)
            _emit(a, texts, str(b).lower(), None, {}, start, [str(b).lower()])
        return EXIT_OK

    if a.command == "cps":
        out = pretty(cps.cps_translate(ts[0]))
        _emit(a, texts, "ok", out, {}, start, [out])
        return EXIT_OK
    if a.command == "cps-equiv":
        r = cps.cps_equiv(ts[0], ts[1], a.fuel).value
        _emit(a, texts, r, None, {"fuel": a.fuel}, start, [r])
        return EXIT_OK
    if a.command == "kh":
        depth = 4 if a.depth is None else a.depth
        if depth < 0:
            raise _Fail(EXIT_BUDGET, "bad budget: depth must be non-negative")
        d = cps.kh_search(ts[0], ts[1], depth)
        if d is None:
            _emit(a, texts, "none", None, {"depth": depth}, start, ["none"])
        else:
            _emit(a, texts, "derivation", d.lines(), {"depth": depth}, start, d.lines())
        return EXIT_OK

    if a.command == "bisim":
        for t in ts:
            _closed(t)
        check = bisim.check_relaxed if a.semantics == "relaxed" else bisim.check_programs
        v = check(ts[0], ts[1], cfg)
        _emit(a, texts, v.kind, v.lines()[1:], cfg.describe(), start, v.lines())
        return EXIT_OK
    if a.command == "falsify":
        f = ctxequiv.falsify_relaxed if a.semantics == "relaxed" else ctxequiv.falsify_programs
        try:
            v = f(ts[0], ts[1], fb)
        except ValueError as e:
            raise _Fail(EXIT_BUDGET, f"bad budget: {e}")
        _emit(a, texts, v.kind, v.lines()[1:], fb.describe(), start, v.lines())
        return EXIT_OK
    if a.command == "compare":
        try:
            c = ctxequiv.compare_semantics(ts[0], ts[1], fb, cfg)
        except ValueError as e:
            raise _Fail(EXIT_BUDGET, f"bad budget: {e}")
        verdict = {
            "relaxed": [c.relaxed_game, c.relaxed_falsifier.kind],
            "original": [c.programs_game, c.programs_falsifier.kind],
        }
        lines = c.table()
        for name, ws in c.witnesses.items():
            lines.append(f"{name}:")
            lines.extend("  " + w for w in ws)
        _emit(a, texts, verdict, c.witnesses, {**cfg.describe(), **fb.describe()}, start, lines)
        return EXIT_OK
    raise AssertionError(a.command)


def _corpus(a, start: float) -> int:
    cfg, fb = _budgets(a)
    try:
        entries = load_corpus(a.file)
    except (OSError, ValueError) as e:
        raise _Fail(EXIT_PARSE, f"cannot load corpus: {e}")
    try:
        for e in entries:
            e.terms()
    except ParseError as e:
        raise _Fail(EXIT_PARSE, f"parse error in corpus: {e}")
    results = run_corpus(entries, fb, cfg, a.jobs)
    budgets = {**cfg.describe(), **fb.describe()}
    bad = sum(not r.ok for r in results)
    if a.format == "json":
        for r in results:
            print(
                json.dumps(
                    {
                        "command": "corpus",
                        "input": [r.entry.left, r.entry.right],
                        "verdict": {"relaxed": list(r.relaxed), "original": list(r.original)},
                        "witness": None,
                        "budgets": budgets,
                        "millis": r.millis,
                        "name": r.entry.name,
                        "expected": {
                            "relaxed": list(r.entry.expect_relaxed),
                            "original": list(r.entry.expect_original),
                        },
                        "ok": r.ok,
                    }
                )
            )
    else:
        for r in results:
            print(r.line())
        print(f"{len(results)} entries, {bad} mismatches")
    return EXIT_MISMATCH if bad else EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    a = _parser().parse_args(argv)
    try:
        return _run(a)
    except _Fail as f:
        print(f"error: {f}", file=sys.stderr)
        return f.code


if __name__ == "__main__":
    sys.exit(main())
