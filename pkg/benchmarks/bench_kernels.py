"""Compare the compiled and numpy kernels.

Times the PF-utility kernel on one operator's user set and a full
game_history run, once per backend.

    python benchmarks/bench_kernels.py [--deployments 200]
"""

import argparse
import time
import timeit

import numpy as np

from specgames import kernels
from specgames.config import ScenarioConfig, Scheme
from specgames.kernels import _pure
from specgames.montecarlo import ExperimentPlan, run_scheme

try:
    from specgames.kernels import _fast
except ImportError:
    _fast = None


def kernel_args(n_users: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    sig = 10 ** rng.uniform(-9, -5, n_users)
    intf = 10 ** rng.uniform(-11, -7, n_users)
    w = np.full(n_users, 1.0 / n_users)
    return sig, intf, w, 5, 2, 4, 1000.0, 1.57e-9, 7e6


def time_kernel(mod, n_users: int, number: int = 20000) -> float:
    args = kernel_args(n_users)
    return min(timeit.repeat(lambda: mod.pf_utility(*args), number=number, repeat=3)) / number


def time_run(mod, deployments: int) -> float:
    # swap the module-level kernels; LinkArrays looks them up per call
    saved = kernels.user_rates, kernels.pf_utility
    kernels.user_rates, kernels.pf_utility = mod.user_rates, mod.pf_utility
    try:
        plan = ExperimentPlan(ScenarioConfig(num_deployments=deployments),
                              schemes=(Scheme.GAME_HISTORY,))
        t = time.perf_counter()
        run_scheme(plan, Scheme.GAME_HISTORY, 2)
        return time.perf_counter() - t
    finally:
        kernels.user_rates, kernels.pf_utility = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--deployments", type=int, default=200)
    args = ap.parse_args()
    backends = [("pure", _pure)] + ([("cython", _fast)] if _fast else [])
    if _fast is None:
        print("compiled kernel not built; only the numpy backend is timed")
    print(f"{'backend':8s} {'pf N=5':>10s} {'pf N=25':>10s} {'run':>9s}")
    rows = {}
    for name, mod in backends:
        rows[name] = (time_kernel(mod, 5), time_kernel(mod, 25), time_run(mod, args.deployments))
        k5, k25, run = rows[name]
        print(f"{name:8s} {k5 * 1e6:8.2f}us {k25 * 1e6:8.2f}us {run:8.2f}s")
    if len(rows) == 2:
        sp = [p / c for p, c in zip(rows["pure"], rows["cython"])]
        print(f"speedup  {sp[0]:9.1f}x {sp[1]:9.1f}x {sp[2]:8.1f}x")


if __name__ == "__main__":
    main()
