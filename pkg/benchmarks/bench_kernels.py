"""Compare the compiled and pure-Python kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 20]

Times each kernel on representative grid sizes and a full ex1/ex5 run
with each backend, and checks that both backends give the same numbers.
"""
import argparse
import importlib
import os
import subprocess
import sys
import timeit

import numpy as np

from congestfv import kernels


def _data(shape, seed=0):
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.05, 0.95, shape)
    return dict(rho=rho, rho_n=rng.uniform(0.05, 0.95, shape), u=rng.normal(size=shape),
                v=rng.normal(size=shape), eta=rng.uniform(2, 40, shape),
                p=1e-4 * (rho / (1 - rho)) ** 2)


def kernel_calls(mod, shape):
    d = _data(shape)
    if len(shape) == 1:
        args = (1e-3, 1.0 / shape[0], 1e-4, 2.0)
        F = np.asarray(mod.mass_residual_1d(d["rho"], d["rho_n"], d["u"], d["eta"], *args)[1])
        return {
            "mass_residual_1d": lambda: mod.mass_residual_1d(d["rho"], d["rho_n"], d["u"], d["eta"], *args),
            "mass_jacobian_1d": lambda: mod.mass_jacobian_1d(d["rho"], d["u"], d["eta"], *args),
            "momentum_update_1d": lambda: mod.momentum_update_1d(d["u"], d["rho"], F, d["p"], 1e-3,
                                                                 1.0 / shape[0], 1e-12),
        }
    args = (1e-3, 1.0 / shape[0], 1.0 / shape[1], 1e-4, 2.0)
    out = mod.mass_residual_2d(d["rho"], d["rho_n"], d["u"], d["v"], d["eta"], d["eta"], *args)
    F, G = np.asarray(out[1]), np.asarray(out[2])
    return {
        "mass_residual_2d": lambda: mod.mass_residual_2d(d["rho"], d["rho_n"], d["u"], d["v"], d["eta"],
                                                         d["eta"], *args),
        "mass_jacobian_2d": lambda: mod.mass_jacobian_2d(d["rho"], d["u"], d["v"], d["eta"], d["eta"], *args),
        "momentum_update_2d": lambda: mod.momentum_update_2d(d["u"], d["v"], d["rho"], F, G, d["p"], 1e-3,
                                                             1.0 / shape[0], 1.0 / shape[1], 1e-12),
    }


def max_difference(shape):
    py, cy = kernels.backend_module("python"), kernels.backend_module("cython")
    worst = 0.0
    for (name, f), (_, g) in zip(kernel_calls(py, shape).items(), kernel_calls(cy, shape).items()):
        a, b = f(), g()
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        for x, y in zip(a, b):
            x, y = np.asarray(x), np.asarray(y)
            worst = max(worst, float(np.max(np.abs(x - y)) / max(1.0, np.max(np.abs(x)))))
    return worst


def time_run(case, cells, pure):
    code = ("import time; from congestfv import simulate; t=time.perf_counter(); "
            f"simulate({case!r}, 1e-4, cells={cells}); print(time.perf_counter()-t)")
    env = dict(os.environ, CONGESTFV_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--no-runs", action="store_true", help="skip the end-to-end simulations")
    args = ap.parse_args(argv)
    try:
        importlib.import_module("congestfv._kernels")
    except ImportError:
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    py, cy = kernels.backend_module("python"), kernels.backend_module("cython")

    print(f"{'kernel':<22}{'shape':>12}{'python [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for shape in [(200,), (3200,), (100, 100), (200, 200)]:
        for (name, f), (_, g) in zip(kernel_calls(py, shape).items(), kernel_calls(cy, shape).items()):
            tp = min(timeit.repeat(f, number=1, repeat=args.repeat)) * 1e6
            tc = min(timeit.repeat(g, number=1, repeat=args.repeat)) * 1e6
            print(f"{name:<22}{'x'.join(map(str, shape)):>12}{tp:>14.1f}{tc:>14.1f}{tp / tc:>10.2f}")
        print(f"{'max rel difference':<22}{'x'.join(map(str, shape)):>12}{max_difference(shape):>14.2e}")

    if not args.no_runs:
        print()
        print(f"{'run':<22}{'python [s]':>14}{'cython [s]':>14}{'speedup':>10}")
        for case, cells in (("ex1", 200), ("ex3", 800), ("ex5", 60)):
            tp, tc = time_run(case, cells, True), time_run(case, cells, False)
            print(f"{case + ' M=' + str(cells):<22}{tp:>14.2f}{tc:>14.2f}{tp / tc:>10.2f}")


if __name__ == "__main__":
    main()
