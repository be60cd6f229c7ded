"""Compare the compiled and pure-Python phrase extraction kernels.

    python benchmarks/bench_phrase_align.py --lengths 10 50 100 200 --sentences 200
"""
import argparse
import random
import time

from tsforge import _kernels_py

try:
    from tsforge import _kernels
except ImportError:
    _kernels = None


def make_alignment(rng, m, n, coverage=0.9, jitter=2):
    """Roughly monotone links with some gaps and one-to-many links."""
    links = set()
    for a in range(m):
        if rng.random() < coverage:
            centre = round(a * n / m)
            for _ in range(rng.choice((1, 1, 1, 2))):
                links.add((a, min(n - 1, max(0, centre + rng.randint(-jitter, jitter)))))
    return links


def time_kernel(fn, cases, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for m, n, links in cases:
            fn(m, n, links)
        best = min(best, time.perf_counter() - t0)
    return best / len(cases)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lengths", type=int, nargs="+", default=[10, 30, 50, 100, 200])
    ap.add_argument("--sentences", type=int, default=200)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    kernels = [("python", _kernels_py.maximal_pairs)]
    if _kernels is not None:
        kernels.insert(0, ("cython", _kernels.maximal_pairs))
    else:
        print("compiled kernel not built; timing the fallback only")

    rng = random.Random(args.seed)
    print(f"{'length':>6}  " + "  ".join(f"{name + ' ms/sent':>16}" for name, _ in kernels)
          + ("  speedup" if len(kernels) == 2 else ""))
    for length in args.lengths:
        cases = []
        for _ in range(args.sentences):
            m = max(1, length + rng.randint(-length // 10, length // 10))
            n = max(1, length + rng.randint(-length // 10, length // 10))
            cases.append((m, n, make_alignment(rng, m, n)))
        per = [time_kernel(fn, cases, args.repeats) for _, fn in kernels]
        for (_, fn) in kernels[1:]:
            assert fn(*cases[0]) == kernels[0][1](*cases[0])
        row = f"{length:>6}  " + "  ".join(f"{1e3 * t:>16.4f}" for t in per)
        if len(per) == 2:
            row += f"  {per[1] / per[0]:>6.1f}x"
        print(row)


if __name__ == "__main__":
    main()
