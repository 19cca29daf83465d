# cython: language_level=3
"""Compiled evaluation kernel; same algorithm and results as ``_pykernel``."""

from .syntax import App, Lam, Reset, Shift, Var, alpha_key, fresh, size_exceeds
from ._pykernel import CYCLE_FRAMES, CYCLE_NODES, MAX_TERM_SIZE

cdef int VALUE = 0, STUCK = 1, TIMEOUT = 2
cdef int _APPL = 0, _APPR = 1, _RESET = 2
cdef int CHECK_EVERY = 16
cdef int NO_REASON = 0, CYCLE = 1, OVERSIZE = 2
cdef long MAX_SIZE = MAX_TERM_SIZE

cdef object _App = App, _Lam = Lam, _Reset = Reset, _Shift = Shift, _Var = Var


cdef object subst_count(object t, str x, object v, long *hits):
    cdef object c = type(t)
    if c is _Var:
        if t.name == x:
            hits[0] += 1
            return v
        return t
    if c is _App:
        return _App(subst_count(t.fn, x, v, hits), subst_count(t.arg, x, v, hits))
    if c is _Reset:
        return _Reset(subst_count(t.body, x, v, hits))
    if t.var == x:
        return t
    return c(t.var, subst_count(t.body, x, v, hits))


cdef object plug_frames(list tags, list payloads, Py_ssize_t lo, object t):
    cdef Py_ssize_t i
    cdef int tag
    for i in range(len(tags) - 1, lo - 1, -1):
        tag = tags[i]
        if tag == _APPL:
            t = _App(t, payloads[i])
        elif tag == _APPR:
            t = _App(payloads[i], t)
        else:
            t = _Reset(t)
    return t


cdef int revisited(set seen, list tags, list payloads, object cur):
    # 1 on a revisit, 0 on a fresh snapshot, -1 when skipped
    if len(tags) > CYCLE_FRAMES:
        return -1
    cdef object t = plug_frames(tags, payloads, 0, cur)
    if size_exceeds(t, CYCLE_NODES):
        return -1
    cdef object key = alpha_key(t)
    if key in seen:
        return 1
    seen.add(key)
    return 0


def run(t, long fuel, bint detect_cycles=True):
    cdef list tags = []
    cdef list payloads = []
    cdef list resets = []
    cdef object cur = t
    cdef object c
    cdef long steps = 0
    cdef int tag = -1
    cdef Py_ssize_t r
    cdef set seen = set()
    cdef object payload, captured
    cdef str x
    cdef long hits = 0
    cdef long interval = CHECK_EVERY, next_check = CHECK_EVERY
    cdef int hit
    if size_exceeds(t, MAX_SIZE):
        return TIMEOUT, t, 0, OVERSIZE
    while True:
        c = type(cur)
        if c is _App:
            tags.append(_APPL)
            payloads.append(cur.arg)
            cur = cur.fn
            continue
        if c is _Reset:
            resets.append(len(tags))
            tags.append(_RESET)
            payloads.append(None)
            cur = cur.body
            continue
        if c is _Shift:
            if not resets:
                return STUCK, plug_frames(tags, payloads, 0, cur), steps, NO_REASON
            if steps >= fuel:
                return TIMEOUT, plug_frames(tags, payloads, 0, cur), steps, NO_REASON
            r = resets.pop()
            x = fresh("x")
            captured = _Lam(x, _Reset(plug_frames(tags, payloads, r + 1, _Var(x))))
            del tags[r:]
            del payloads[r:]
            hits = 0
            cur = _Reset(subst_count(cur.body, cur.var, captured, &hits))
            steps += 1
            if hits > 1 and size_exceeds(cur, MAX_SIZE):
                return TIMEOUT, plug_frames(tags, payloads, 0, cur), steps, OVERSIZE
        elif c is _Var:
            raise ValueError(f"open term: free variable {cur.name!r}")
        else:
            while True:
                if not tags:
                    return VALUE, cur, steps, NO_REASON
                tag = tags[-1]
                if tag == _APPL:
                    tags[-1] = _APPR
                    payload = payloads[-1]
                    payloads[-1] = cur
                    cur = payload
                    break
                if steps >= fuel:
                    return TIMEOUT, plug_frames(tags, payloads, 0, cur), steps, NO_REASON
                tags.pop()
                payload = payloads.pop()
                steps += 1
                if tag == _APPR:
                    hits = 0
                    cur = subst_count(payload.body, payload.var, cur, &hits)
                    if hits > 1 and size_exceeds(cur, MAX_SIZE):
                        return TIMEOUT, plug_frames(tags, payloads, 0, cur), steps, OVERSIZE
                    break
                resets.pop()
                if detect_cycles and steps >= next_check:
                    hit = revisited(seen, tags, payloads, cur)
                    if hit == 1:
                        return TIMEOUT, plug_frames(tags, payloads, 0, cur), fuel, CYCLE
                    interval = CHECK_EVERY if hit == 0 else 2 * interval
                    next_check = steps + interval
            if tag == _APPL:
                continue
        if detect_cycles and steps >= next_check:
            hit = revisited(seen, tags, payloads, cur)
            if hit == 1:
                return TIMEOUT, plug_frames(tags, payloads, 0, cur), fuel, CYCLE
            interval = CHECK_EVERY if hit == 0 else 2 * interval
            next_check = steps + interval
