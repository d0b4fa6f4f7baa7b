"""Compare the jitted kernel path against the pure-numpy fallback.

The backend is chosen at import time from TRACELAB_NUMBA, so each mode runs
in its own subprocess. The parent collects per-kernel timings and prints a
speedup table. Usage:

    python3 benchmarks/bench_kernels.py            # both modes, table
    python3 benchmarks/bench_kernels.py --repeat 5
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time


def _timings(repeat):
    import tracelab as tl

    g_walk = tl.random_regular(2000, 16, 0)
    g_seg = tl.random_regular(1000, 16, 0)
    seg_len = math.ceil(2 * 1000 * math.log(1000))
    g_posa = tl.random_regular(400, 8, 0)
    g_dp = tl.random_regular(18, 4, 0)
    g_dense = tl.random_regular(300, 12, 0)

    cases = [
        ("walk 200k steps", lambda: tl.simulate_walk(g_walk, 0, 200_000, 1)),
        ("cover trial n=2000", lambda: tl.cover_trial(g_walk, 7, 0)),
        ("segmented visits x20", lambda: tl.segmented_visit_experiment(
            g_seg, seg_len, 16.0, 20, 3)),
        ("posa n=400", lambda: tl.hamiltonian_posa(g_posa, 5)),
        ("hamilton dp n=18", lambda: tl.hamiltonian_exact(g_dp, method="dp")),
        ("jacobi eigen n=300", lambda: tl.eigen_extremes(g_dense, method="dense")),
        ("resistance matrix n=300", lambda: tl.resistance_matrix(g_dense)),
    ]

    out = {}
    for name, fn in cases:
        fn()
        best = min(_clock(fn) for _ in range(repeat))
        out[name] = best
    return out


def _clock(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _run_mode(flag, repeat):
    env = dict(os.environ, TRACELAB_NUMBA=flag)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--inner",
         "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--inner", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.inner:
        from tracelab import _accel
        payload = {"backend": "numba" if _accel.NUMBA_ENABLED else "numpy",
                   "timings": _timings(args.repeat)}
        json.dump(payload, sys.stdout)
        return

    fast = _run_mode("1", args.repeat)
    slow = _run_mode("0", args.repeat)
    print(f"backends: {fast['backend']} vs {slow['backend']}")
    width = max(len(k) for k in fast["timings"])
    print(f"{'kernel':<{width}}  {'jit (s)':>10}  {'numpy (s)':>10}  {'speedup':>8}")
    for name, t_fast in fast["timings"].items():
        t_slow = slow["timings"][name]
        ratio = t_slow / t_fast if t_fast > 0 else float("inf")
        print(f"{name:<{width}}  {t_fast:>10.4f}  {t_slow:>10.4f}  {ratio:>7.1f}x")


if __name__ == "__main__":
    main()
