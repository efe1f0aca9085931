"""Wall-clock comparison of the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from fraccut import kernels


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation for the numba variant)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    vals = rng.uniform(0, 1, size=(64, 64))
    coeffs = rng.normal(size=(2000, 3))
    yield ("halfplane mass, 64x64 grid, 2000 cuts",
           lambda: kernels.rect_halfplane_mass_many_nb(vals, 0.0, 0.0, 1 / 64, 1 / 64, coeffs),
           lambda: kernels.rect_halfplane_mass_many_np(vals, 0.0, 0.0, 1 / 64, 1 / 64, coeffs))
    pts = rng.uniform(0, 1, size=(16 * 16 * 16, 2))
    w = rng.uniform(0, 1, size=(len(pts), 3))
    for m in (2, 3):
        funcs = rng.normal(size=(m, 4))
        for soft in (True, False):
            yield (f"cell measures, {len(pts)} samples, m={m}, {'soft' if soft else 'hard'}",
                   lambda f=funcs, s=soft: kernels.cell_measures_nb(pts, w, f, 0.01, s),
                   lambda f=funcs, s=soft: kernels.cell_measures_np(pts, w, f, 0.01, s))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"numba available: {kernels.USE_NUMBA}")
    print(f"{'case':<48} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, nb, npf in cases(np.random.default_rng(args.seed)):
        np.testing.assert_allclose(nb(), npf(), atol=1e-10)
        a, b = best_of(nb, args.repeat), best_of(npf, args.repeat)
        print(f"{name:<48} {a * 1e3:10.3f} {b * 1e3:10.3f} {b / a:8.1f}")


if __name__ == "__main__":
    main()
