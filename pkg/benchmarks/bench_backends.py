#!/usr/bin/env python3
"""Compare the compiled solver kernels against the pure-Python fallback.

Times the spectral evolution loop and the finite-difference update kernels
in-process, plus one end-to-end benchmark pipeline per backend in a
subprocess (backend choice is fixed at import, so a fresh interpreter is
the only honest way to switch).  Wall times are the best of --repeats runs.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from ecol2.workloads._backend import available_backends


def best_of(fn, repeats):
    """Smallest wall time over `repeats` calls of fn()."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def spectral_case(kernels, n, steps):
    # KdV-flavoured setup: integrating factor handles ik^3 exactly,
    # RK4 advances the dealiased nonlinear term.
    length = 128.0
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=length / n)
    symbol = 1j * k**3
    dt = 1e-3
    half = np.exp(0.5 * dt * symbol)
    full = half * half
    modes = np.rint(np.fft.fftfreq(n) * n).astype(int)
    gain = -0.5j * dt * k * (np.abs(modes) < n / 3)
    x = np.arange(n) * length / n
    v0 = kernels.from_physical(np.cos(2.0 * np.pi * x / length))
    return lambda: kernels.spectral_evolve(v0, half, full, gain, steps)


def fd_case(kernels, name, n, steps):
    u0 = np.sin(2.0 * np.pi * np.arange(n) / n)
    w0 = np.sin(np.pi * np.linspace(0.0, 1.0, n))
    h0 = np.abs(u0) * 0.3 + 0.1
    return {
        "advection upwind": lambda: kernels.advection_upwind(u0, 0.7, steps),
        "advection lax-wendroff": lambda: kernels.advection_lax_wendroff(u0, 0.7, steps),
        "wave leapfrog": lambda: kernels.wave_leapfrog(w0, w0, 0.5, steps),
        "reaction rk4": lambda: kernels.reaction_rk4(h0, 5.0, 1e-3, steps),
    }[name]


def pipeline_case(backend, workload):
    env = dict(os.environ, ECOL2_BACKEND=backend)
    code = (
        "from ecol2.tracking import PowerModel\n"
        "from ecol2.workloads import run_pipeline\n"
        f"run_pipeline({workload!r}, power=PowerModel.fixed(50.0), region='CH', seed=0)\n"
    )

    def run():
        subprocess.run([sys.executable, "-c", code], env=env, check=True)

    return run


KERNEL_CASES = (
    "spectral evolve",
    "advection upwind",
    "advection lax-wendroff",
    "wave leapfrog",
    "reaction rk4",
)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=256,
                        help="kernel state size (power of two); 256 matches the solvers' "
                             "default internal resolution")
    parser.add_argument("--steps", type=int, default=2000, help="time steps per kernel call")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats, best kept")
    parser.add_argument("--pipeline", default="ks", help="workload for the end-to-end row")
    parser.add_argument("--skip-pipeline", action="store_true",
                        help="kernel rows only (no subprocess runs)")
    parser.add_argument("--json", action="store_true", help="emit results as JSON")
    args = parser.parse_args(argv)

    backends = available_backends()
    if set(backends) != {"compiled", "python"}:
        print(f"only {sorted(backends)} available; build the extension first", file=sys.stderr)
        return 1

    rows = []
    for case_name in KERNEL_CASES:
        timed = {}
        for backend, kernels in backends.items():
            if case_name == "spectral evolve":
                fn = spectral_case(kernels, args.size, args.steps)
            else:
                fn = fd_case(kernels, case_name, args.size, args.steps)
            timed[backend] = best_of(fn, args.repeats)
        rows.append({"case": case_name, "python_s": timed["python"],
                     "compiled_s": timed["compiled"],
                     "speedup": timed["python"] / timed["compiled"]})

    if not args.skip_pipeline:
        name = f"pipeline ({args.pipeline})"
        t_py = best_of(pipeline_case("python", args.pipeline), args.repeats)
        t_c = best_of(pipeline_case("compiled", args.pipeline), args.repeats)
        rows.append({"case": name, "python_s": t_py, "compiled_s": t_c,
                     "speedup": t_py / t_c})

    if args.json:
        print(json.dumps(rows, indent=1, sort_keys=True))
        return 0

    width = max(len(r["case"]) for r in rows)
    print(f"{'case':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for r in rows:
        print(f"{r['case']:<{width}}  {r['python_s']:>9.4f}s  {r['compiled_s']:>9.4f}s  "
              f"{r['speedup']:>7.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
