"""Pure-Python evaluation kernel.

Runs the reduction semantics by refocusing: the evaluation context is kept
as an explicit frame stack, so after each contraction decomposition resumes
at the hole instead of restarting from the root.  Every contraction is one
of the three reduction rules and counts one unit of fuel, so step counts
and results coincide with iterating ``semantics.reduce_step``.

Only closed terms are accepted; substituted values are therefore closed and
substitution never renames.

A periodic alpha-key snapshot detects exact cycles (``Omega`` and friends).
A cycle means the term never reaches a normal form, so the run reports a
timeout with the whole fuel spent, exactly as a full run would.  Snapshots
are skipped while the term is large, with the interval doubling after
each skip; short loops are what they are for.

Terms that outgrow ``MAX_TERM_SIZE`` nodes also end the run as a timeout,
flagged ``OVERSIZE``: duplicating reductions can double the term at every
step, and nothing downstream could inspect such a term anyway.  Only a
substitution hitting two or more occurrences can grow the term by more than
a constant, so the size is measured after those alone.
"""

from .syntax import App, Lam, Reset, Shift, Var, alpha_key, fresh, size_exceeds

VALUE, STUCK, TIMEOUT = 0, 1, 2

_APPL, _APPR, _RESET = 0, 1, 2

CHECK_EVERY = 16

# reasons attached to a timeout
NO_REASON, CYCLE, OVERSIZE = 0, 1, 2

MAX_TERM_SIZE = 10_000

# no cycle snapshots above these sizes
CYCLE_FRAMES = 64
CYCLE_NODES = 512


def subst_count(t, x, v, hits):
    """``t[x := v]`` for closed ``v``; ``hits[0]`` counts replaced occurrences."""
    c = t.__class__
    if c is Var:
        if t.name == x:
            hits[0] += 1
            return v
        return t
    if c is App:
        return App(subst_count(t.fn, x, v, hits), subst_count(t.arg, x, v, hits))
    if c is Reset:
        return Reset(subst_count(t.body, x, v, hits))
    if t.var == x:
        return t
    return c(t.var, subst_count(t.body, x, v, hits))


def plug_frames(frames, t):
    for i in range(len(frames) - 1, -1, -1):
        tag, payload = frames[i]
        if tag == _APPL:
            t = App(t, payload)
        elif tag == _APPR:
            t = App(payload, t)
        else:
            t = Reset(t)
    return t


def _revisited(seen, frames, cur):
    """True on a revisit, False on a fresh snapshot, None when skipped."""
    if len(frames) > CYCLE_FRAMES:
        return None
    t = plug_frames(frames, cur)
    if size_exceeds(t, CYCLE_NODES):
        return None
    key = alpha_key(t)
    if key in seen:
        return True
    seen.add(key)
    return False


def run(t, fuel, detect_cycles=True):
    """Evaluate closed ``t`` for at most ``fuel`` steps.

    Returns ``(kind, term, steps, reason)``; ``term`` is the normal form, or
    the term reached when the run stopped.
    """
    if size_exceeds(t, MAX_TERM_SIZE):
        return TIMEOUT, t, 0, OVERSIZE
    frames = []
    resets = []
    cur = t
    steps = 0
    seen = set()
    interval = next_check = CHECK_EVERY
    while True:
        c = cur.__class__
        if c is App:
            frames.append((_APPL, cur.arg))
            cur = cur.fn
            continue
        if c is Reset:
            resets.append(len(frames))
            frames.append((_RESET, None))
            cur = cur.body
            continue
        if c is Shift:
            if not resets:
                return STUCK, plug_frames(frames, cur), steps, NO_REASON
            if steps >= fuel:
                return TIMEOUT, plug_frames(frames, cur), steps, NO_REASON
            r = resets.pop()
            x = fresh("x")
            captured = Lam(x, Reset(plug_frames(frames[r + 1:], Var(x))))
            del frames[r:]
            hits = [0]
            cur = Reset(subst_count(cur.body, cur.var, captured, hits))
            steps += 1
            if hits[0] > 1 and size_exceeds(cur, MAX_TERM_SIZE):
                return TIMEOUT, plug_frames(frames, cur), steps, OVERSIZE
        elif c is Var:
            raise ValueError(f"open term: free variable {cur.name!r}")
        else:
            # a value: pop frames until something can be done with it
            while True:
                if not frames:
                    return VALUE, cur, steps, NO_REASON
                tag, payload = frames[-1]
                if tag == _APPL:
                    frames[-1] = (_APPR, cur)
                    cur = payload
                    break
                if steps >= fuel:
                    return TIMEOUT, plug_frames(frames, cur), steps, NO_REASON
                frames.pop()
                steps += 1
                if tag == _APPR:
                    hits = [0]
                    cur = subst_count(payload.body, payload.var, cur, hits)
                    if hits[0] > 1 and size_exceeds(cur, MAX_TERM_SIZE):
                        return TIMEOUT, plug_frames(frames, cur), steps, OVERSIZE
                    break
                resets.pop()
                if detect_cycles and steps >= next_check:
                    hit = _revisited(seen, frames, cur)
                    if hit:
                        return TIMEOUT, plug_frames(frames, cur), fuel, CYCLE
                    interval = CHECK_EVERY if hit is False else 2 * interval
                    next_check = steps + interval
            if tag == _APPL:
                continue
        if detect_cycles and steps >= next_check:
            hit = _revisited(seen, frames, cur)
            if hit:
                return TIMEOUT, plug_frames(frames, cur), fuel, CYCLE
            interval = CHECK_EVERY if hit is False else 2 * interval
            next_check = steps + interval
