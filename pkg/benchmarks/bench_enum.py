"""Compiled vs pure-Python Fincke-Pohst enumeration on random reduced Gram matrices.

    python3 benchmarks/bench_enum.py [--dims 4 8] [--scale 6] [--repeat 3]

The compiled kernel handles rank <= 8 (quaternion norm forms have rank 4).
"""

import argparse
import random
import time

from btquot import _enum_py
from btquot.lattice import _float_cholesky, lll_gram

try:
    from btquot import _enum
except ImportError:
    _enum = None


def random_gram(n, rng, size=6):
    B = [[rng.randint(-size, size) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        B[i][i] += 3 * size
    G = [[sum(B[k][i] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return lll_gram(G)[1]


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[4, 6, 8])
    ap.add_argument("--scale", type=float, default=6.0, help="bound as a multiple of the largest diagonal entry")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if _enum is None:
        print("compiled extension not built; only the pure-Python timings are shown")
    rng = random.Random(args.seed)
    print(f"{'dim':>4} {'bound':>8} {'vectors':>8} {'pure (s)':>10} {'cython (s)':>11} {'speedup':>8}")
    for n in args.dims:
        G = random_gram(n, rng)
        q = _float_cholesky(G)
        bound = args.scale * max(G[i][i] for i in range(n))
        tp, vp = best_of(lambda: _enum_py.enumerate_short(q, bound), args.repeat)
        if _enum is None:
            print(f"{n:>4} {bound:>8.0f} {len(vp):>8} {tp:>10.4f} {'-':>11} {'-':>8}")
            continue
        tc, vc = best_of(lambda: _enum.enumerate_short(q, bound), args.repeat)
        assert sorted(vp) == sorted(vc), "implementations disagree"
        print(f"{n:>4} {bound:>8.0f} {len(vp):>8} {tp:>10.4f} {tc:>11.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
