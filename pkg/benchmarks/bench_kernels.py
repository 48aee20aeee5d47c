"""Compare the compiled and pure-Python kernels on a random 3-regular graph.

    python3 benchmarks/bench_kernels.py [--n 16384] [--repeat 3]
"""
import argparse
import time

import numpy as np

from fpplab import kernels
from fpplab.fpp import assign_weights
from fpplab.graph import sample_simple


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1 << 14)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    g, _ = sample_simple(np.full(args.n, 3), args.seed)
    wg = assign_weights(g, 1.0, args.seed)
    indptr, nbr, _ = g.csr
    sw = wg.slot_weights

    def push(mod):
        rng = np.random.default_rng(args.seed)
        first = float(rng.standard_exponential())
        return mod.async_push(indptr, nbr, 0, first,
                              lambda k: (rng.random(k), rng.standard_exponential(2 * k)),
                              max(1024, 2 * args.n), False)[0]

    cases = {
        "dijkstra": lambda m: m.dijkstra(indptr, nbr, sw, 0),
        "bfs": lambda m: m.bfs(indptr, nbr, 0),
        "async_push": push,
    }
    mods = kernels.backends()
    print(f"n={args.n}  backends={', '.join(mods)}")
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name in mods) + f"{'speedup':>10}")
    for case, fn in cases.items():
        row = {}
        outs = {}
        for name, mod in mods.items():
            row[name], outs[name] = best_of(lambda: fn(mod), args.repeat)
        vals = list(outs.values())
        same = all(np.array_equal(vals[0], v) for v in vals[1:])
        speed = row["python"] / row["cython"] if "cython" in row else float("nan")
        print(f"{case:<12}" + "".join(f"{row[k] * 1e3:>10.2f}ms" for k in mods)
              + f"{speed:>9.1f}x" + ("" if same else "  MISMATCH"))


if __name__ == "__main__":
    main()
