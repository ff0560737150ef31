"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py --steps 2000 --repeat 5
"""

import argparse
import itertools
import timeit

import numpy as np

from gwalk import _accel
from gwalk.graph import complete_graph
from gwalk.oracle import injection


def walk_case(N, ell, steps):
    g = complete_graph(N, ell)
    alpha = np.zeros(ell, dtype=complex)
    alpha[0] = 1.0
    args = (g.origin, g.terminus, g.inverse, 2.0 / g.tailed_degree, injection(g, alpha), np.exp(0.7j), g.n_vertices)
    # tol 0 pins the step count so both backends do identical work
    return lambda kern: kern.iterate_walk(*args, 0.0, steps)


def forest_case(N):
    eu, ev = (np.array(x, dtype=np.int64) for x in zip(*itertools.combinations(range(N), 2)))
    return lambda kern: kern.count_forests(N, eu, ev, 0, N - 1)


def best_of(fn, kern, repeat):
    return min(timeit.repeat(lambda: fn(kern), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", default="8,16,32")
    ap.add_argument("--forest-n", type=int, default=5)
    args = ap.parse_args(argv)

    backends = _accel.BACKENDS
    if "cython" not in backends:
        print("compiled extension not available; timing the Python backend only")
    names = sorted(backends)
    cases = [(f"iterate_walk K_{n} x{args.steps}", walk_case(n, 2, args.steps)) for n in map(int, args.sizes.split(","))]
    cases.append((f"count_forests K_{args.forest_n}", forest_case(args.forest_n)))

    print(f"{'case':<28}" + "".join(f"{b:>12}" for b in names) + (f"{'speedup':>10}" if len(names) > 1 else ""))
    for label, fn in cases:
        t = {b: best_of(fn, backends[b], args.repeat) for b in names}
        row = f"{label:<28}" + "".join(f"{t[b] * 1e3:>10.2f}ms" for b in names)
        if len(names) > 1:
            row += f"{t['python'] / t['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
