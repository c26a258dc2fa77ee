"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_backends.py [--repeat N]

Times the three hot kernels (grid evaluation, profile integration, curve
tracing) on representative workloads and reports the speedup plus the
maximum deviation between backends (expected: exactly zero).
"""
import argparse
import time

import numpy as np

import rlws._kernels_py as PK

try:
    import rlws._kernels as CK
except ImportError:
    CK = None

INTEGRATE_ARGS = (1e-11, 1e-13, 1e-4, 1e-14, 0.02, 400.0, 10_000_000,
                  1e-5, 1e-9, 1e-5, 2e-2, 1e-6, 1e-14 * 3.1, 1e-12 * 7.0)
TRACE_ARGS = (5e-4, 1e-11, 1e-3, 1e-12, 2_000_000, 1.0, 7e-8)


def _time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if CK is None:
        print("compiled kernel extension not built; nothing to compare")
        return

    workloads = [
        ("grid_eval 2048x2048 (3,1,3)",
         lambda K: K.grid_eval(3.0, 1.0, 3.0, 2048)),
        ("integrate closed orbit (3,1,3) alpha=2.1, rtol 1e-11",
         lambda K: K.integrate_core(3.0, 1.0, 3.0, 2.1,
                                    0.8423229160812052, 0.0, *INTEGRATE_ARGS)),
        ("integrate locus stop (1,1,0) alpha=0.55",
         lambda K: K.integrate_core(1.0, 1.0, 0.0, 0.55,
                                    0.7828902417716693, 0.0, *INTEGRATE_ARGS)),
        ("trace closed curve (3,1,3) alpha=2.1, step 5e-4",
         lambda K: K.trace_core(3.0, 1.0, 3.0, 2.1,
                                0.8423229160812052, 0.0, *TRACE_ARGS)),
    ]

    print(f"{'workload':<55} {'compiled':>10} {'python':>10} "
          f"{'speedup':>8} {'max|diff|':>10}")
    for name, fn in workloads:
        tc, rc = _time(lambda: fn(CK), args.repeat)
        tp, rp = _time(lambda: fn(PK), args.repeat)
        if isinstance(rc, np.ndarray):
            dev = float(np.max(np.abs(rc - rp)))
        else:
            dev = 0.0
            for a, b in zip(rc, rp):
                if isinstance(a, np.ndarray) and len(a) == len(b):
                    if len(a):
                        dev = max(dev, float(np.max(np.abs(a - b))))
                elif isinstance(a, float) and np.isfinite(a) and np.isfinite(b):
                    dev = max(dev, abs(a - b))
        print(f"{name:<55} {tc * 1e3:>8.2f}ms {tp * 1e3:>8.2f}ms "
              f"{tp / tc:>7.1f}x {dev:>10.3g}")


if __name__ == "__main__":
    main()
