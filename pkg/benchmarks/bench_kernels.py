"""Compare the compiled kernel extension against the pure-Python reference.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --number 200000 --repeat 7

The per-kernel rows time both backends inside one process through
load_backend(). The world-step row is different: the simulation binds its
backend once at import, so that row launches a subprocess per backend with
WARELAB_KERNELS forced and times a fixed scripted workload there.
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

from warelab._kernels import load_backend

# name -> call args; magnitudes picked to look like mid-session values
CASES = [
    ("wrap_pi", (12.34,)),
    ("unicycle_step", (0.3, -1.2, 0.7, 1.0, 0.5, 0.02)),
    ("drone_translate", (0.0, 0.0, 1.0, 0.8, -0.4, 0.2, 0.02)),
    ("slew_substep", (0.3, 2.0, math.pi / 2, 0.02)),
    ("agv_route_substep",
     (0.0, 0.0, 0.3, 5.0, 2.0, 1.0, math.pi / 2, 0.05, 1e-6, 0.02)),
    ("drone_flight_substep", (0.0, 0.0, 1.0, 4.0, 3.0, 2.0, 2.0, 1e-6, 0.02)),
    ("relative_pose", (1.0, 2.0, 0.5, 0.3, 4.0, -1.0, 1.5, -2.0)),
    ("betainc", (12.0, 0.5, 0.73)),
]

WORLD_WORKLOAD = """\
import time
from warelab.sim.scene import default_scene
import warelab.sim.world as W

world = default_scene().fresh_world()
W.command_drone(world, "drone1", (0.6, 0.2, 0.1), 0.4)
t0 = time.perf_counter()
for _ in range({steps}):
    W.step(world, world.config.dt)
print(time.perf_counter() - t0)
"""


def best_of(fn, args, number, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    return min(timer.repeat(repeat, number)) / number


def time_world(backend, steps):
    env = dict(os.environ, WARELAB_KERNELS=backend)
    proc = subprocess.run(
        [sys.executable, "-c", WORLD_WORKLOAD.format(steps=steps)],
        env=env, capture_output=True, text=True,
    )
    if proc.returncode != 0:
        return None
    return float(proc.stdout.strip())


def fmt_us(seconds):
    return f"{seconds * 1e6:9.3f} us"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--number", type=int, default=100_000,
                    help="calls per timing sample (default 100000)")
    ap.add_argument("--repeat", type=int, default=5,
                    help="samples per kernel, best is kept (default 5)")
    ap.add_argument("--steps", type=int, default=30_000,
                    help="world substeps for the macro row (default 30000)")
    args = ap.parse_args(argv)

    pure = load_backend("pure")
    try:
        compiled = load_backend("compiled")
    except ImportError:
        compiled = None
        print("compiled backend not built; timing the reference only\n")

    width = max(len(name) for name, _ in CASES) + 2
    header = f"{'kernel':<{width}}{'pure':>14}{'compiled':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call_args in CASES:
        t_pure = best_of(getattr(pure, name), call_args, args.number, args.repeat)
        if compiled is None:
            print(f"{name:<{width}}{fmt_us(t_pure):>14}{'-':>14}{'-':>10}")
            continue
        t_comp = best_of(getattr(compiled, name), call_args, args.number, args.repeat)
        print(f"{name:<{width}}{fmt_us(t_pure):>14}{fmt_us(t_comp):>14}"
              f"{t_pure / t_comp:>9.2f}x")

    label = f"world step x{args.steps}"
    t_pure = time_world("pure", args.steps)
    t_comp = time_world("compiled", args.steps) if compiled is not None else None
    pure_cell = f"{t_pure:10.3f} s " if t_pure is not None else "-"
    if t_comp is None:
        print(f"{label:<{width}}{pure_cell:>14}{'-':>14}{'-':>10}")
    else:
        print(f"{label:<{width}}{pure_cell:>14}{t_comp:10.3f} s "
              f"{t_pure / t_comp:>9.2f}x")


if __name__ == "__main__":
    main()
