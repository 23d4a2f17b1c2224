#!/usr/bin/env python3
"""Compare the compiled kernels against their pure-Python twins.

Checks that both backends produce identical results, then times them on
the hot paths: bulk compressed stepping, the turnover search, and the
on-demand operator products.

Usage: python benchmarks/compare_kernels.py [--quick]
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from groversim import _kernels_py
from groversim.core import half_power

try:
    from groversim import _kernels
except ImportError:
    print("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    sys.exit(1)


def timed(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return result, best


def row(name, py_s, c_s):
    print(f"{name:<38} {py_s:>10.4f}s {c_s:>10.4f}s {py_s / c_s:>8.1f}x")


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    steps = 200_000 if args.quick else 2_000_000
    n_big = 64
    hc = half_power(n_big + 1)

    print(f"{'workload':<38} {'python':>11} {'compiled':>11} {'speedup':>8}")

    r_py, t_py = timed(_kernels_py.ud_steps, n_big, 1, hc, hc, steps)
    r_c, t_c = timed(_kernels.ud_steps, n_big, 1, hc, hc, steps)
    assert r_py == r_c, "ud_steps backends disagree"
    row(f"ud_steps n={n_big} steps={steps}", t_py, t_c)

    n_m2 = 28 if args.quick else 36
    hc2 = half_power(n_m2 + 1)
    r_py, t_py = timed(_kernels_py.run_until_turnover, n_m2, 1, hc2, hc2, 0, 0.0, 0.0, 0, 0)
    r_c, t_c = timed(_kernels.run_until_turnover, n_m2, 1, hc2, hc2, 0, 0.0, 0.0, 0, 0)
    assert r_py == r_c, "run_until_turnover backends disagree"
    row(f"run_until_turnover n={n_m2}", t_py, t_c)

    n_od = 8
    dim = 1 << (n_od + 1)
    rng = np.random.default_rng(7)
    x = rng.standard_normal(dim)
    x /= np.sqrt(x @ x)
    mask = np.zeros(1 << n_od, dtype=np.uint8)
    mask[[3, 17, 101]] = 1

    for name, py_fn, c_fn, fargs in [
        ("apply_sp_on_demand", _kernels_py.apply_sp_on_demand, _kernels.apply_sp_on_demand, (x, n_od)),
        ("apply_ent_on_demand", _kernels_py.apply_ent_on_demand, _kernels.apply_ent_on_demand, (x, mask, n_od)),
        ("apply_int_on_demand", _kernels_py.apply_int_on_demand, _kernels.apply_int_on_demand, (x, n_od)),
    ]:
        r_py, t_py = timed(py_fn, *fargs, repeat=2)
        r_c, t_c = timed(c_fn, *fargs, repeat=2)
        err = float(np.max(np.abs(r_py - r_c)))
        assert err <= 1e-12, f"{name} backends disagree by {err}"
        row(f"{name} n={n_od}", t_py, t_c)

    print("all backend results agree")
    return 0


if __name__ == "__main__":
    sys.exit(main())
