"""Compare the compiled and pure-numpy harmonic path kernels.

    python benchmarks/bench_kernels.py [--paths 4096] [--steps 2400] [--repeat 3]

Both backends get identical inputs; the script checks that their outputs
are bit-identical before reporting timings.
"""
import argparse
import time

import numpy as np

from gfkmc.kernels import compiled_harmonic_paths, python_harmonic_paths


def _inputs(n_paths, n_steps, n_coords, h, seed=0):
    rng = np.random.default_rng(seed)
    x0 = np.zeros((n_paths, n_coords))
    noise = np.sqrt(h) * rng.standard_normal((n_paths, n_steps, n_coords))
    neg_a = -np.full(n_coords, 1.2)
    c2 = 0.5 * (1.0 - 1.2**2) * np.ones(n_coords)
    c0 = 0.6 * n_coords - 0.5 * n_coords
    record = np.arange(30, n_steps + 1, 30, dtype=np.int64)
    return x0, noise, h, neg_a, c2, c0, 0, record, 1.0, 1


def _best(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=4096)
    ap.add_argument("--steps", type=int, default=2400)
    ap.add_argument("--coords", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    inputs = _inputs(args.paths, args.steps, args.coords, 1.0 / 30.0)
    t_py, out_py = _best(python_harmonic_paths, inputs, args.repeat)
    print(f"python   {t_py:8.3f} s  ({args.paths} paths x {args.steps} steps)")
    if compiled_harmonic_paths is None:
        print("compiled extension not built; only the fallback was timed")
        return 0
    t_c, out_c = _best(compiled_harmonic_paths, inputs, args.repeat)
    same = all(np.array_equal(a, b) for a, b in zip(out_py, out_c))
    print(f"compiled {t_c:8.3f} s")
    print(f"speed-up {t_py / t_c:8.1f}x   bit-identical: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
