"""Compare the compiled and NumPy primal kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from canodual import kernels
from canodual.bundled import load_example


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--starts", type=int, default=200)
    ap.add_argument("--grid", type=int, default=200)
    args = ap.parse_args()

    p = load_example(1)
    pa = kernels.problem_args(p)
    rng = np.random.default_rng(0)
    X0 = rng.uniform(-4, 4, size=(args.starts, p.n))
    ax = np.linspace(-4, 4, args.grid)
    grid = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1).reshape(-1, 2)

    if "cython" not in kernels.BACKENDS:
        print("compiled extension not built; only the python backend is available")
    rows = []
    for name, mod in kernels.BACKENDS.items():
        t_desc = _best(lambda: [mod.descend(*pa, x0, 1e-8, 20000) for x0 in X0], args.repeat)
        t_grid = _best(lambda: mod.primal_values(*pa, grid), args.repeat)
        rows.append((name, t_desc, t_grid))
    print(f"{'backend':<8} {'descent x' + str(args.starts):>14} {'grid ' + str(len(grid)):>12}")
    for name, a, b in rows:
        print(f"{name:<8} {a * 1e3:12.2f}ms {b * 1e3:10.2f}ms")
    if len(rows) == 2:
        print(f"speedup  {rows[0][1] / rows[1][1]:13.1f}x {rows[0][2] / rows[1][2]:11.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
