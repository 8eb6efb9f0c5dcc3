"""Compare the numba kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--nodes N] [--horizon H]

Times the three hot kernels on one mid-size configuration.  The numba path
is warmed up once before timing so JIT compilation is not counted.
"""

import argparse
import time

import numpy as np

import cyclewalk._kernels as kernels
from cyclewalk import WalkConfig, coin_state, pauli_decompose
from cyclewalk.fourier import all_pair_matrices, phase_table


def build_inputs(n, p):
    cfg = WalkConfig(n_nodes=n, decoherence_rate=p, initial_coin=coin_state("up"))
    matrices, d_index = all_pair_matrices(cfg)
    projector = np.outer(cfg.initial_coin, cfg.initial_coin.conj())
    v0 = np.tile(pauli_decompose(projector).coeffs, (n * n, 1))
    return matrices, v0, d_index, phase_table(n)


def best_of(repeats, fn):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=15)
    parser.add_argument("--rate", type=float, default=0.3)
    parser.add_argument("--horizon", type=int, default=20_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    n, horizon = args.nodes, args.horizon
    matrices, v0, d_index, phase = build_inputs(n, args.rate)
    group = kernels._group_matrix(d_index, n)
    target = np.full(n, 1.0 / n)
    taus = np.array([horizon // 100, horizon // 10, horizon], dtype=np.int64)
    steps = max(1, horizon // 10)

    cases = {
        "trajectory": (
            lambda: kernels._distribution_trajectory_np(matrices, v0, group, phase, steps),
            (lambda: kernels._distribution_trajectory_nb(matrices, v0, d_index, phase, steps))
            if kernels.NUMBA_AVAILABLE else None,
        ),
        "tv_scan": (
            lambda: kernels._tv_scan_np(matrices, v0, group, phase, horizon,
                                        target, target, kernels.MODE_AVERAGED, 0.0),
            (lambda: kernels._tv_scan_nb(matrices, v0, d_index, phase, horizon,
                                         target, target, kernels.MODE_AVERAGED, 0.0))
            if kernels.NUMBA_AVAILABLE else None,
        ),
        "snapshots": (
            lambda: kernels._averaged_snapshots_np(matrices, v0, group, phase, taus),
            (lambda: kernels._averaged_snapshots_nb(matrices, v0, d_index, phase, taus))
            if kernels.NUMBA_AVAILABLE else None,
        ),
    }

    print(f"nodes={n} rate={args.rate} horizon={horizon} "
          f"(pairs={n * n}, numba={'yes' if kernels.NUMBA_AVAILABLE else 'no'})")
    print(f"{'kernel':<12} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for name, (np_fn, nb_fn) in cases.items():
        t_np = best_of(args.repeats, np_fn)
        if nb_fn is None:
            print(f"{name:<12} {t_np:>10.4f} {'-':>10} {'-':>8}")
            continue
        nb_fn()  # warm up / compile
        t_nb = best_of(args.repeats, nb_fn)
        print(f"{name:<12} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
