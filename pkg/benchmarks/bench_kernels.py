"""Benchmark the numba kernels against the pure-numpy fallback.

Two layers:

* kernel microbenchmarks, both implementations called on the same
  workloads in-process;
* an optional end-to-end comparison (``--full``) that runs the Monte
  Carlo CLI in subprocesses with ``WQSC_BACKEND`` forced each way, so the
  numbers include interpreter startup and (first run) JIT compilation.

Usage: python benchmarks/bench_kernels.py [--repeats N] [--full]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from wqsc import _kernels


def _workloads() -> dict:
    rng = np.random.default_rng(42)

    def state(n):
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        return amps / np.linalg.norm(amps)

    gate = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    s3, s4 = state(3), state(4)
    positions2 = np.array([3, 2], dtype=np.int64)
    pair_idx = np.empty((2, 2, 4), dtype=np.int64)
    for ba in (0, 1):
        for bb in (0, 1):
            for r in range(4):
                pair_idx[ba, bb, r] = (ba << 3) | (bb << 2) | r
    return {
        "apply_gate_1q (3q)": ("apply_gate_1q", (s3, 1, gate)),
        "apply_cnot (4q)": ("apply_cnot", (s4, 3, 0)),
        "z_probabilities (4q, 2 qubits)": ("z_probabilities", (s4, positions2)),
        "collapse_z (4q, 2 qubits)": ("collapse_z", (s4, positions2, 1)),
        "bell_probabilities (4q)": ("bell_probabilities", (s4, pair_idx)),
        "bell_collapse (4q)": ("bell_collapse", (s4, pair_idx, 0)),
    }


def bench_kernels(repeats: int) -> None:
    if _kernels.NUMBA_IMPL is None:
        print("numba unavailable; nothing to compare")
        return
    print(f"{'kernel':36s} {'numba':>12s} {'numpy':>12s} {'speedup':>9s}")
    for label, (name, args) in _workloads().items():
        times = {}
        for impl_name, impl in (("numba", _kernels.NUMBA_IMPL), ("numpy", _kernels.NUMPY_IMPL)):
            fn = impl[name]
            fn(*args)  # warm (JIT / cache priming)
            start = time.perf_counter()
            for _ in range(repeats):
                fn(*args)
            times[impl_name] = (time.perf_counter() - start) / repeats
        speedup = times["numpy"] / times["numba"]
        print(
            f"{label:36s} {times['numba'] * 1e6:10.2f}us {times['numpy'] * 1e6:10.2f}us "
            f"{speedup:8.1f}x"
        )


def bench_full(rounds: int) -> None:
    args = [
        sys.executable, "-m", "wqsc.cli", "run",
        "--scheme", "present", "--attack", "ir-z",
        "--rounds", str(rounds), "--seed", "42",
    ]
    print(f"\nend-to-end `run` at {rounds} rounds (includes startup/JIT):")
    for backend in ("numba", "numpy"):
        env = dict(os.environ, WQSC_BACKEND=backend)
        start = time.perf_counter()
        out = subprocess.run(args, capture_output=True, text=True, env=env)
        elapsed = time.perf_counter() - start
        status = "ok" if out.returncode == 0 else f"exit {out.returncode}"
        print(f"  {backend:6s} {elapsed:7.2f}s  ({status})")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200_000)
    parser.add_argument("--full", action="store_true",
                        help="also time the Monte Carlo CLI per backend")
    parser.add_argument("--rounds", type=int, default=100_000,
                        help="rounds for the --full comparison")
    args = parser.parse_args()
    print(f"active backend: {_kernels.BACKEND}")
    bench_kernels(args.repeats)
    if args.full:
        bench_full(args.rounds)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
