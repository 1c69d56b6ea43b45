"""Throughput comparison: compiled episode kernel vs pure-Python engine.

Run:  python benchmarks/bench_kernel.py
"""

import time

import numpy as np

from olpce import _episode_py
from olpce import distributions as D
from olpce.seeding import make_rng

try:
    from olpce import _episode_kernel
except ImportError:
    _episode_kernel = None

CASES = [
    ("MultisecretaryBeta(0)", D.MultisecretaryBeta(0.0), 0, 0.0),
    ("MultisecretaryBeta(2)", D.MultisecretaryBeta(2.0), 0, 2.0),
    ("GapMultisecretary", D.GapMultisecretary(), 1, 0.0),
    ("TwoPointConsumption", D.TwoPointConsumption(), 2, 0.0),
    ("UnitSquareShifted", D.UnitSquareShifted(), 3, 0.0),
]


def bench(engine, code, beta, b0, T, a, r, reps):
    thr = np.empty(T)
    acc = np.zeros(T, dtype=np.uint8)
    b_after = np.empty(T)
    start = time.perf_counter()
    total = 0.0
    for _ in range(reps):
        total = engine.run_ce_m1(code, beta, b0, T, a, r, thr, acc, b_after)
    elapsed = time.perf_counter() - start
    return total, reps * T / elapsed


def main():
    T = 16000
    reps = 20
    rng = make_rng(12345)
    print(f"T={T}, {reps} episodes per case")
    print(f"{'case':24s} {'python steps/s':>16s} {'compiled steps/s':>18s} {'speedup':>9s}")
    for name, dist, code, beta in CASES:
        A, R = dist.sample_batch(T, rng)
        a = np.ascontiguousarray(A[:, 0])
        b0 = 0.5 * T if code != 3 else 1.5 * T
        tot_py, rate_py = bench(_episode_py, code, beta, b0, T, a, R, max(1, reps // 10))
        if _episode_kernel is None:
            print(f"{name:24s} {rate_py:16.3e} {'n/a':>18s} {'n/a':>9s}")
            continue
        tot_cy, rate_cy = bench(_episode_kernel, code, beta, b0, T, a, R, reps)
        assert tot_py == tot_cy, f"{name}: engines disagree ({tot_py} vs {tot_cy})"
        print(f"{name:24s} {rate_py:16.3e} {rate_cy:18.3e} {rate_cy / rate_py:8.1f}x")


if __name__ == "__main__":
    main()
