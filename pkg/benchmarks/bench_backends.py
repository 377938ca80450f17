"""Time the compiled and pure-Python closed-loop kernels side by side.

    python benchmarks/bench_backends.py [--steps 1000 5000 20000] [--repeat 3]
"""

import argparse
import timeit

import numpy as np

from pidloop import _backend
from pidloop.control import Gains
from pidloop.simloop import IntegralMode, SimConfig, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, nargs="+", default=[1000, 5000, 20000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = _backend.available()
    print(f"backends: {', '.join(backends)} (import default: {_backend.BACKEND})")
    header = f"{'steps':>7} {'mode':<22}" + "".join(f"{b + ' [ms]':>16}" for b in backends)
    print(header + f"{'speedup':>10}")
    for steps in args.steps:
        for mode in IntegralMode:
            cfg = SimConfig(gains=Gains(10.8, 17.7, 0.2), h=0.01, t_end=steps * 0.01,
                            integral_mode=mode)
            times, trajs = [], []
            for b in backends:
                trajs.append(simulate(cfg, backend=b))
                times.append(min(timeit.repeat(lambda: simulate(cfg, backend=b),
                                               number=1, repeat=args.repeat)))
            if len(trajs) == 2:
                assert np.allclose(trajs[0].x, trajs[1].x, rtol=1e-12, atol=1e-12)
            speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) == 2 else ""
            print(f"{steps:>7} {mode.value:<22}" + "".join(f"{t * 1e3:>16.2f}" for t in times)
                  + speed)


if __name__ == "__main__":
    main()
