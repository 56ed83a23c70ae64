"""Compare the compiled and pure-Python simulation kernels.

    python benchmarks/bench_kernel.py [--days 30] [--dt 1] [--repeat 3]
"""

import argparse
import time
from dataclasses import replace

import numpy as np

from solarshare import engine
from solarshare.config import load_bundled_config


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--days", type=float, default=7.0, help="simulated span in days")
    parser.add_argument("--dt", type=float, default=10.0, help="step in seconds")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    config = replace(load_bundled_config(), duration=args.days * 86400.0, dt=args.dt)
    print(f"{config.n_steps} steps (dt={args.dt} s, {args.days} days)")

    t_py, table_py = best_of(lambda: engine.run_table(config, "python"), args.repeat)
    print(f"python   : {t_py:8.3f} s  {config.n_steps / t_py / 1e6:8.3f} Msteps/s")
    if engine._compiled is None:
        print("compiled : not built")
        return
    t_c, table_c = best_of(lambda: engine.run_table(config, "compiled"), args.repeat)
    print(f"compiled : {t_c:8.3f} s  {config.n_steps / t_c / 1e6:8.3f} Msteps/s")
    print(f"speedup  : {t_py / t_c:8.1f}x   identical output: {np.array_equal(table_py, table_c)}")


if __name__ == "__main__":
    main()
