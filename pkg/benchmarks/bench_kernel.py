"""Compare the compiled evaluation kernel with the pure-Python fallback.

    python benchmarks/bench_kernel.py [--repeat N]

Each workload is run by both kernels; the table shows the best wall time
over the repeats, reduction steps per second and the speedup.  A run
that finds a cycle is credited its whole fuel, so steps per second on the
OMEGA row measure the cycle check rather than reduction.
"""

import argparse
import random
import time

from lamshift import _pykernel
from lamshift.corpus import parse_term
from lamshift.randterm import random_closed
from lamshift.syntax import alpha_eq

try:
    from lamshift import _ckernel
except ImportError:
    _ckernel = None

SUCC = "(\\n. \\f. \\x. f (n f x))"
ZERO = "(\\f. \\x. x)"
MULT = "(\\m. \\n. \\f. m (n f))"
PRED = "(\\n. \\f. \\x. n (\\g. \\h. h (g f)) (\\u. x) (\\u. u))"
IS_ZERO = "(\\n. n (\\d. \\a. \\b. b) (\\a. \\b. a))"
FACT = f"(\\fact. \\n. {IS_ZERO} n (\\d. {SUCC} {ZERO}) (\\d. {MULT} n (fact ({PRED} n))) (\\d. d))"
FOUR = "(\\f. \\x. f (f (f (f x))))"


def workloads():
    rng = random.Random(0)
    randoms = [random_closed(rng, 30) for _ in range(2000)]
    return [
        ("2000 random terms", randoms, 2000),
        ("factorial 4 via THETA", [parse_term(f"THETA {FACT} {FOUR} {SUCC} {ZERO}")], 100_000),
        ("factorial 4 via THETA-SHIFT", [parse_term(f"THETA-SHIFT {FACT} {FOUR} {SUCC} {ZERO}")], 100_000),
        ("OMEGA, cycle check", [parse_term("OMEGA")] * 200, 2000),
        ("growing loop, no cycle", [parse_term("(\\x. x x x) (\\x. x x x)")] * 5, 400),
    ]


def bench(impl, terms, fuel, repeat):
    best, steps, out = float("inf"), 0, None
    for _ in range(repeat):
        start = time.perf_counter()
        res = [impl.run(t, fuel) for t in terms]
        best = min(best, time.perf_counter() - start)
        steps = sum(r[2] for r in res)
        out = res
    return best, steps, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = [("python", _pykernel)] + ([("cython", _ckernel)] if _ckernel else [])
    if _ckernel is None:
        print("compiled kernel not built; timing the fallback only")
    print(f"{'workload':30} {'kernel':7} {'seconds':>8} {'steps/s':>10} {'speedup':>8}")
    for name, terms, fuel in workloads():
        base = None
        results = []
        for label, impl in impls:
            secs, steps, out = bench(impl, terms, fuel, args.repeat)
            results.append(out)
            base = base or secs
            print(f"{name:30} {label:7} {secs:8.4f} {steps / secs:10.0f} {base / secs:7.2f}x")
        if len(results) == 2:
            same = all(
                a[0] == b[0] and a[2] == b[2] and alpha_eq(a[1], b[1]) for a, b in zip(*results)
            )
            if not same:
                raise SystemExit(f"kernels disagree on {name}")


if __name__ == "__main__":
    main()
