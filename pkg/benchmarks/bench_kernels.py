"""Compare the compiled kernel core against the pure-Python fallback.

Times the two hot paths, diagram tallies and batched substitution tests,
on identical inputs and prints the speedup.  Run from the repo root:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --tally-n 6 --batch-trials 20000
"""

import argparse
import random
import time

import egflab._kernels_py as pure

try:
    import egflab._kernels as fast
except ImportError:
    fast = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_tally(n):
    rows = []
    t_py, ref = timeit(pure.diagram_tally, n)
    rows.append(("python", t_py))
    if fast is not None:
        t_cy, got = timeit(fast.diagram_tally, n)
        assert sorted(got) == sorted(ref)
        rows.append(("cython", t_cy))
    return rows


def bench_batch(n, trials, r, seed):
    rng = random.Random(seed)
    m = n * (n - 1) // 2
    entries = [rng.randrange(1, r + 1) for _ in range(trials * m)]
    rows = []
    t_py, ref = timeit(pure.batch_exact_test, entries, n, trials)
    rows.append(("python", t_py))
    if fast is not None:
        t_cy, got = timeit(fast.batch_exact_test, entries, n, trials)
        assert got == ref
        rows.append(("cython", t_cy))
    return rows, ref


def report(name, rows):
    base = rows[0][1]
    print(f"\n{name}")
    for backend, t in rows:
        speed = base / t if t else float("inf")
        print(f"  {backend:<8} {t * 1000:10.2f} ms   x{speed:.1f}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tally-n", type=int, default=6)
    ap.add_argument("--batch-n", type=int, default=4)
    ap.add_argument("--batch-trials", type=int, default=10000)
    ap.add_argument("--batch-range", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if fast is None:
        print("compiled core not available; timing the fallback only")

    report(f"diagram_tally(n={args.tally_n})", bench_tally(args.tally_n))
    rows, hits = bench_batch(
        args.batch_n, args.batch_trials, args.batch_range, args.seed
    )
    report(
        f"batch_exact_test(n={args.batch_n}, trials={args.batch_trials}, "
        f"r={args.batch_range}); hits={hits}",
        rows,
    )


if __name__ == "__main__":
    main()
