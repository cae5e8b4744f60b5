#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the NumPy fallback.

Times the finite-volume right-hand-side sweep on a few grid sizes and, as
an end-to-end anchor, a short solver run with each backend.

Usage: python benchmarks/bench_kernels.py [--sizes 64,128,256] [--reps 50]
"""

import argparse
import time

import numpy as np

from dmvflow.fields import ConservedState, Grid2D, apply_noslip_ghosts
from dmvflow.kernels import available_backends
from dmvflow.thermo import FluidParams


def make_state(n):
    g = Grid2D(n, n)
    X, Y = g.centers()
    rho = 1.0 + 0.1 * np.cos(np.pi * X) * np.cos(2 * np.pi * Y)
    theta = 1.0 + 0.1 * np.cos(2 * np.pi * X) * np.cos(np.pi * Y)
    u = 0.05 * np.stack(
        [np.sin(np.pi * X) * np.sin(2 * np.pi * Y), -np.sin(2 * np.pi * X) * np.sin(np.pi * Y)]
    )
    return g, ConservedState(g, rho, np.stack([rho * u[0], rho * u[1]]), rho * theta)


def bench_rhs(sizes, reps):
    params = FluidParams(gamma=1.4, a=1.0, mu=1e-2, lam=0.0, c_star=0.5)
    backends = available_backends()
    print(f"{'n':>6} " + " ".join(f"{name + ' ms':>12}" for name in backends) + f" {'speedup':>9}")
    for n in sizes:
        g, st = make_state(n)
        pad = apply_noslip_ghosts(st, layers=2)
        args = (pad.rho, pad.mx, pad.my, pad.z, g.dx, g.dy, params.gamma, params.a, params.mu, params.lam)
        times = {}
        for name, fn in backends.items():
            fn(*args)  # warm up
            t0 = time.perf_counter()
            for _ in range(reps):
                fn(*args)
            times[name] = (time.perf_counter() - t0) / reps * 1e3
        speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
        print(f"{n:>6} " + " ".join(f"{times[name]:>12.3f}" for name in backends) + f" {speed:>8.1f}x")


def bench_run(n, t_end):
    import os
    import subprocess
    import sys

    print(f"\nfull solver run, {n}^2 grid to t = {t_end}:")
    code = (
        "import time, numpy as np\n"
        "from benchmarks.bench_kernels import make_state\n"
        "from dmvflow.solver import SolverConfig, run\n"
        "from dmvflow.thermo import FluidParams\n"
        "from dmvflow.kernels import backend_name\n"
        f"g, st = make_state({n})\n"
        "p = FluidParams(gamma=1.4, a=1.0, mu=1e-2, lam=0.0, c_star=0.5)\n"
        f"cfg = SolverConfig(grid=g, params=p, t_end={t_end}, output_every=10**9)\n"
        "t0 = time.perf_counter()\n"
        "traj = run(cfg, st)\n"
        "dt = time.perf_counter() - t0\n"
        "print(f'  {backend_name:>7}: {dt:8.3f} s ({traj.n_steps} steps)')\n"
    )
    for backend in ("cython", "numpy"):
        env = dict(os.environ, DMVFLOW_KERNELS=backend, PYTHONPATH=".")
        proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
        if proc.returncode:
            print(f"  {backend:>7}: unavailable ({proc.stderr.strip().splitlines()[-1]})")
        else:
            print(proc.stdout, end="")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--run-size", type=int, default=128)
    ap.add_argument("--run-t-end", type=float, default=0.05)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    bench_rhs(sizes, args.reps)
    bench_run(args.run_size, args.run_t_end)


if __name__ == "__main__":
    main()
