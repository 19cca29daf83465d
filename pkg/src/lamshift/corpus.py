"""The example corpus: named term pairs with expected verdicts."""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .bisim import GameConfig
from .ctxequiv import Budgets, Comparison, compare_semantics
from .syntax import Term, parse

_THETA = "(\\x. \\y. y (\\z. x x y z))"
ALIASES: Dict[str, str] = {
    "OMEGA": "((\\x. x x) (\\x. x x))",
    "THETA-SHIFT": f"<{_THETA} (S k. k k)>",
    "THETA": f"({_THETA} {_THETA})",
}
_ALIAS_RE = re.compile(r"\b(THETA-SHIFT|THETA|OMEGA)\b")


def expand_aliases(text: str) -> str:
    return _ALIAS_RE.sub(lambda m: ALIASES[m.group(1)], text)


def parse_term(text: str) -> Term:
    """Parse with the corpus aliases expanded."""
    return parse(expand_aliases(text))


@dataclass(frozen=True)
class Entry:
    name: str
    left: str
    right: str
    expect_relaxed: Tuple[str, str]
    expect_original: Tuple[str, str]
    ref: str = ""

    def terms(self) -> Tuple[Term, Term]:
        return parse_term(self.left), parse_term(self.right)


_FIELDS = ("name", "left", "right", "expect-relaxed", "expect-original")


def parse_corpus(text: str) -> List[Entry]:
    entries = []
    for lineno, block in _blocks(text):
        fields: Dict[str, str] = {}
        for off, line in block:
            key, sep, val = line.partition(":")
            if not sep:
                raise ValueError(f"line {lineno + off}: expected 'field: value'")
            fields[key.strip()] = val.strip()
        missing = [f for f in _FIELDS if f not in fields]
        if missing:
            raise ValueError(f"entry at line {lineno}: missing {', '.join(missing)}")

        def pair(key):
            parts = fields[key].split()
            if len(parts) != 2:
                raise ValueError(f"entry {fields['name']}: {key} needs a game and a falsifier verdict")
            return parts[0], parts[1]

        entries.append(
            Entry(
                fields["name"],
                fields["left"],
                fields["right"],
                pair("expect-relaxed"),
                pair("expect-original"),
                fields.get("ref", ""),
            )
        )
    return entries


def _blocks(text):
    block, start = [], 0
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            if block:
                yield start, block
            block = []
            continue
        if not block:
            start = i
        block.append((i - start, line))
    if block:
        yield start, block


def load_corpus(path: Optional[str] = None) -> List[Entry]:
    if path is None:
        text = resources.files("lamshift").joinpath("data/corpus.txt").read_text()
    else:
        with open(path) as f:
            text = f.read()
    return parse_corpus(text)


@dataclass
class EntryResult:
    entry: Entry
    relaxed: Tuple[str, str]
    original: Tuple[str, str]
    millis: int
    comparison: Optional[Comparison] = None

    @property
    def ok(self) -> bool:
        return self.relaxed == self.entry.expect_relaxed and self.original == self.entry.expect_original

    def line(self) -> str:
        tag = "ok" if self.ok else "MISMATCH"
        s = f"{tag} {self.entry.name}: relaxed {' '.join(self.relaxed)}; original {' '.join(self.original)}"
        if not self.ok:
            e = self.entry
            s += f" (expected relaxed {' '.join(e.expect_relaxed)}; original {' '.join(e.expect_original)})"
        return s


def run_entry(entry: Entry, budgets: Budgets = Budgets(), cfg: Optional[GameConfig] = None) -> EntryResult:
    t0, t1 = entry.terms()
    start = time.perf_counter()
    c = compare_semantics(t0, t1, budgets, cfg)
    ms = int((time.perf_counter() - start) * 1000)
    return EntryResult(
        entry,
        (c.relaxed_game, c.relaxed_falsifier.kind),
        (c.programs_game, c.programs_falsifier.kind),
        ms,
        c,
    )


def _run_one(args):
    return run_entry(*args)


def run_corpus(
    entries: List[Entry], budgets: Budgets = Budgets(), cfg: Optional[GameConfig] = None, jobs: int = 1
) -> List[EntryResult]:
    """Run every entry; results come back in corpus order whatever ``jobs`` is."""
    work = [(e, budgets, cfg) for e in entries]
    if jobs <= 1 or len(work) <= 1:
        return [_run_one(w) for w in work]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))
