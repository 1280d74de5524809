"""Compare the compiled and pure-numpy convolution backends on tower-field
multiplication, the hot path of encoding and server computation.

Run:  python3 benchmarks/bench_kernels.py [--primes 5,7,11] [--p 3] [--d 3] [--reps 50]
"""

import argparse
import time

from ftp_sdmm import kernels
from ftp_sdmm.fields import BaseField, TowerField


def bench(tower, backend, reps):
    from ftp_sdmm.matrices import SplitMix64
    rng_x = tower.random(SplitMix64(1))
    rng_y = tower.random(SplitMix64(2))
    # warm-up (includes JIT compilation for the compiled backend)
    kernels.convolve(
        rng_x.reshape(tower.flat_size, tower.base.d),
        rng_y.reshape(tower.flat_size, tower.base.d), tower._addtable,
        tower._ext_flat, backend=backend,
    )
    start = time.perf_counter()
    for _ in range(reps):
        kernels.convolve(
            rng_x.reshape(tower.flat_size, tower.base.d),
        rng_y.reshape(tower.flat_size, tower.base.d), tower._addtable,
            tower._ext_flat, backend=backend,
        )
    return (time.perf_counter() - start) / reps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", default="5,7,11")
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--reps", type=int, default=50)
    args = ap.parse_args()

    primes = tuple(int(x) for x in args.primes.split(","))
    print(f"building tower F_({args.p}^{args.d})^{'*'.join(map(str, primes))} ...")
    t0 = time.perf_counter()
    tower = TowerField(BaseField(args.p, args.d), primes)
    print(f"tower built in {time.perf_counter() - t0:.2f}s "
          f"(flat size {tower.flat_size}, ext {tower._ext_flat})")

    results = {}
    for backend in ("numpy", "numba"):
        try:
            dt = bench(tower, backend, args.reps)
        except Exception as exc:
            print(f"{backend:>6}: unavailable ({exc})")
            continue
        results[backend] = dt
        print(f"{backend:>6}: {dt * 1e3:8.3f} ms / multiply")
    if len(results) == 2:
        print(f"speedup numba vs numpy: {results['numpy'] / results['numba']:.1f}x")


if __name__ == "__main__":
    main()
