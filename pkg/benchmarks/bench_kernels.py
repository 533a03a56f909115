"""Time the numba and pure-numpy kernel backends side by side.

    python benchmarks/bench_kernels.py [--repeats N]

The first numba call per signature includes compilation (or a cache load);
a warm-up call is made before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from witnessforge import _kernels
from witnessforge.maps import Psi, choi


def _hermitian(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (X + X.conj().T) / 2


def _time(fn, repeats: int) -> float:
    fn()  # warm-up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    for n in (16, 36, 64):
        A = _hermitian(n, n)
        yield f"jacobi n={n}", lambda b, A=A: _kernels.jacobi_eigh(A, backend=b)
    for k in (2, 3, 4):
        d = 2 * k
        W4 = choi(Psi(k)).matrix.to_complex().reshape(d, d, d, d)
        rng = np.random.default_rng([0, 0])
        phi0 = rng.normal(size=d) + 1j * rng.normal(size=d)
        phi0 /= np.linalg.norm(phi0)
        yield f"altmin k={k}", lambda b, W4=W4, phi0=phi0: _kernels.altmin(W4, phi0, 500, backend=b)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"{'case':<16}" + "".join(f"{b:>14}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases():
        times = [_time(lambda: fn(b), args.repeats) for b in backends]
        row = f"{name:<16}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
