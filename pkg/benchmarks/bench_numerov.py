"""Compiled vs pure-Python Numerov kernels.

Times the raw sweep on oscillator weights of several lengths, then one full
eigenvalue search per backend (the backend is chosen at import, so each
search runs in a fresh interpreter).

    python benchmarks/bench_numerov.py [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from quarkspec import _numerov_py

try:
    from quarkspec import _numerov_core
except ImportError:
    _numerov_core = None

SEARCH = (
    "import time; from quarkspec import CornellSpin, QuarkoniumParams, find_eigenvalue;"
    "from quarkspec._kernels import BACKEND;"
    "p = QuarkoniumParams(0.5, 0.15, 1.0, 1.5, 1.5, 0);"
    "t = time.perf_counter(); E = find_eigenvalue(CornellSpin(p), p, 0, 3).energy;"
    "print(BACKEND, time.perf_counter() - t, repr(E))"
)


def weights(n):
    r = np.linspace(1e-6, 10.0, n)
    h = r[1] - r[0]
    return np.ascontiguousarray(1 - h * h * (r**2 - 3.0) / 12)


def kernel_table(repeat):
    print(f"{'points':>8}  {'python [ms]':>12}  {'cython [ms]':>12}  {'speedup':>8}")
    for n in (2_000, 20_000, 200_000):
        f = weights(n)
        t_py = min(timeit.repeat(lambda: _numerov_py.shoot(f, 0.0, 1e-6), number=1, repeat=repeat))
        if _numerov_core is None:
            print(f"{n:>8}  {1e3 * t_py:>12.2f}  {'n/a':>12}  {'n/a':>8}")
            continue
        t_cy = min(timeit.repeat(lambda: _numerov_core.shoot(f, 0.0, 1e-6), number=1, repeat=repeat))
        assert _numerov_core.shoot(f, 0.0, 1e-6) == _numerov_py.shoot(f, 0.0, 1e-6)
        print(f"{n:>8}  {1e3 * t_py:>12.2f}  {1e3 * t_cy:>12.3f}  {t_py / t_cy:>7.0f}x")


def search_table():
    print("\nfull eigenvalue search (Cornell, n_r = 3):")
    energies = {}
    for pure in ("1", "0"):
        env = dict(os.environ, QUARKSPEC_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", SEARCH], env=env, capture_output=True, text=True,
                             check=True).stdout.split()
        backend, seconds, energy = out[0], float(out[1]), out[2]
        energies[backend] = energy
        print(f"  {backend:>6}: {seconds:7.3f} s  E = {energy}")
    if len(set(energies.values())) == 1:
        print("  energies identical across backends")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    kernel_table(args.repeat)
    search_table()


if __name__ == "__main__":
    main()
