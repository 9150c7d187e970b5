#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the NumPy fallback.

Times the symmetric eigensolver and the midpoint stepping loop on both
backends and prints the speedup table.  The stepping loop is where the
compiled core earns its keep: one eigendecomposition per time step, with
the previous step's eigenbasis warm-starting the next.

    python benchmarks/bench_kernels.py [--steps 20000]
"""

import argparse
import time

import numpy as np

from gaplab.backends import _py_kernels

try:
    from gaplab import _kernels as compiled
except ImportError:
    compiled = None


def _pair(rng, d):
    a0 = rng.standard_normal((d, d))
    a1 = rng.standard_normal((d, d))
    return (a0 + a0.T) / 2, (a1 + a1.T) / 2


def time_eigh(kernels, a, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        kernels.eigh_sym(a)
    return (time.perf_counter() - t0) / repeats


def time_midpoint(kernels, a0, a1, steps, psi):
    rec = np.array([steps], dtype=np.int64)
    t0 = time.perf_counter()
    kernels.midpoint_propagate(a0, a1, 10.0, steps, psi, rec)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20_000)
    args = parser.parse_args()

    if compiled is None:
        print("compiled kernels unavailable; showing the fallback alone")
    rng = np.random.default_rng(0)

    print(f"{'kernel':<26}{'dim':>5}{'python':>12}{'compiled':>12}{'speedup':>9}")
    for d in (9, 17, 33, 65):
        a, _ = _pair(rng, d)
        t_py = time_eigh(_py_kernels, a, 200)
        if compiled is not None:
            t_c = time_eigh(compiled, a, 200)
            print(f"{'eigh_sym':<26}{d:>5}{t_py*1e6:>10.1f}us{t_c*1e6:>10.1f}us"
                  f"{t_py/t_c:>8.2f}x")
        else:
            print(f"{'eigh_sym':<26}{d:>5}{t_py*1e6:>10.1f}us{'-':>12}{'-':>9}")

    for d in (9, 17, 33, 65):
        a0, a1 = _pair(rng, d)
        psi = np.zeros(d, complex)
        psi[0] = 1.0
        steps = args.steps
        t_py = time_midpoint(_py_kernels, a0, a1, max(steps // 10, 100), psi)
        t_py *= steps / max(steps // 10, 100)  # extrapolate the slow loop
        if compiled is not None:
            t_c = time_midpoint(compiled, a0, a1, steps, psi)
            print(f"{'midpoint/random x' + str(steps):<26}{d:>5}{t_py:>10.2f}s {t_c:>10.2f}s "
                  f"{t_py/t_c:>8.2f}x")
        else:
            print(f"{'midpoint/random x' + str(steps):<26}{d:>5}{t_py:>10.2f}s {'-':>12}{'-':>9}")

    # the production workload: interpolation schedules whose eigenbasis
    # rotates slowly, so the warm-started sweep skips most rotations
    from gaplab.model import build_theta_model, uniform_superposition

    for n, theta in ((16, 16), (30, 1)):
        model = build_theta_model(n, theta)
        psi = uniform_superposition(n).amps
        steps = args.steps
        t_py = time_midpoint(
            _py_kernels, model.h0.matrix, model.h1.matrix, max(steps // 10, 100), psi
        ) * steps / max(steps // 10, 100)
        label = f"midpoint/model({n},{theta})"
        if compiled is not None:
            t_c = time_midpoint(compiled, model.h0.matrix, model.h1.matrix, steps, psi)
            print(f"{label:<26}{n + 1:>5}{t_py:>10.2f}s {t_c:>10.2f}s "
                  f"{t_py/t_c:>8.2f}x")
        else:
            print(f"{label:<26}{n + 1:>5}{t_py:>10.2f}s {'-':>12}{'-':>9}")


if __name__ == "__main__":
    main()
