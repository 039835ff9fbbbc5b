"""Compiled vs numpy kernels: wall time and agreement.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from kpii_ist import kernels


def _chirp_case(n=1024, k=32, seed=0):
    rng = np.random.default_rng(seed)
    xi1 = np.sort(rng.uniform(0.01, 1.2, n) * rng.choice([-1, 1], n))
    coef = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    eta = np.linspace(-1.2, 1.2, k)
    return xi1, coef, eta, eta[1] - eta[0], 20.0, -3.0, 0.3 + 0.7j


def _box_case(m=2000, seed=1):
    rng = np.random.default_rng(seed)
    k1 = rng.uniform(0.01, 1.0, m) * rng.choice([-1, 1], m)
    k2 = rng.uniform(-1.0, 1.0, m)
    amp = (rng.normal(size=m) + 1j * rng.normal(size=m)) / m
    return k1, k2, amp, 1e-14


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels.BACKEND != "cython":
        print("compiled extension not available; only the numpy timings are shown")
    cases = [
        ("chirp_pole_sum (pole)", kernels.chirp_pole_sum_numpy, kernels.chirp_pole_sum, _chirp_case() + (True,)),
        ("chirp_pole_sum (plain)", kernels.chirp_pole_sum_numpy, kernels.chirp_pole_sum, _chirp_case() + (False,)),
        ("box_second_order", kernels.box_second_order_numpy, kernels.box_second_order, _box_case()),
    ]
    print(f"{'kernel':<24}{'numpy [s]':>12}{kernels.BACKEND + ' [s]':>14}{'speed-up':>10}{'max rel diff':>14}")
    for name, ref, fast, case in cases:
        t_ref = min(timeit.repeat(lambda: ref(*case), number=1, repeat=args.repeat))
        t_fast = min(timeit.repeat(lambda: fast(*case), number=1, repeat=args.repeat))
        a = np.atleast_1d(np.asarray(ref(*case)))
        b = np.atleast_1d(np.asarray(fast(*case)))
        diff = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
        print(f"{name:<24}{t_ref:>12.4f}{t_fast:>14.4f}{t_ref / t_fast:>10.1f}{diff:>14.2e}")


if __name__ == "__main__":
    main()
