"""Compare the compiled kernels with the numpy fallback.

Run from the repository root::

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best wall time per call for every available backend
on the problem shapes used by moment recovery: a grid NNLS in the
Bernstein basis, the golden-section refinement of a few atoms, and the
Jacobi eigensolver on small Hankel matrices.
"""

import argparse
import math
import timeit

import numpy as np

from definetti import kernels


def bernstein_grid(n, size):
    grid = np.linspace(0.0, 1.0, size)
    A = np.array([math.comb(n, i) * grid**i * (1 - grid) ** (n - i) for i in range(n + 1)])
    return grid, A


def cases(rng):
    out = []
    for n, size in ((6, 256), (8, 1024), (12, 4096)):
        _, A = bernstein_grid(n, size)
        w = rng.dirichlet(np.ones(3))
        b = A[:, rng.choice(size, 3, replace=False)] @ w
        out.append((f"nnls n={n} grid={size}", "nnls", (A, b)))
    for k in (2, 4):
        locs = np.sort(rng.uniform(0.05, 0.95, k))
        w = rng.dirichlet(np.ones(k))
        m = np.array([np.sum(w * locs**i) for i in range(2 * k + 3)])
        start = list(np.clip(locs + rng.normal(0, 0.01, k), 0, 1))
        out.append((f"refine_atoms k={k}", "refine_atoms", (start, m, 0.02)))
    for d in (4, 8, 16):
        B = rng.standard_normal((d, d))
        out.append((f"symmetric_eigen d={d}", "symmetric_eigen", (B + B.T,)))
    return out


def time_call(fn, args, repeat):
    number = 1
    while True:
        t = timeit.timeit(lambda: fn(*args), number=number)
        if t > 0.05 or number >= 10**5:
            break
        number *= 4
    best = min(timeit.repeat(lambda: fn(*args), number=number, repeat=repeat))
    return best / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    impls = kernels.implementations()
    names = sorted(impls)
    rng = np.random.default_rng(args.seed)
    header = f"{'case':<26}" + "".join(f"{name:>14}" for name in names)
    if "cython" in impls:
        header += f"{'speedup':>10}"
    print(f"active backend: {kernels.BACKEND}")
    print(header)
    for label, fname, call_args in cases(rng):
        times = {name: time_call(getattr(impls[name], fname), call_args, args.repeat) for name in names}
        row = f"{label:<26}" + "".join(f"{times[name] * 1e6:>11.1f} us" for name in names)
        if "cython" in impls:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
