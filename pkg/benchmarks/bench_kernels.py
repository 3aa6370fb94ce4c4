"""Compiled vs numpy kernels: disc interference accumulation and full trials.

    python3 benchmarks/bench_kernels.py [--points 16384] [--repeat 200]
"""

import argparse
import math
import time

import numpy as np

from densecell import kernels
from densecell.config import NetworkConfig
from densecell.channel import AntennaScalingLaw
from densecell.montecarlo import engine
from densecell.pathloss import BoundedMultiSlope, StretchedExponential


def _best(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_chunk(model, points, repeat):
    rng = np.random.default_rng(0)
    gaps = rng.standard_exponential(points)
    gains = rng.standard_exponential(points)
    lam = 1000.0
    args = (gaps, gains, 0.0, float(points), 1 / (math.pi * lam), 0, 1, model)
    out = {}
    for backend in ("cython", "python"):
        if backend == "cython" and kernels.BACKEND != "cython":
            continue
        out[backend] = _best(lambda: kernels.disc_chunk(*args, backend=backend), repeat)
    return out


def bench_sweep(trials, backend):
    saved = kernels.BACKEND
    kernels.BACKEND = backend
    try:
        cfg = NetworkConfig(densities=(1000.0,), model=StretchedExponential(0.9, 0.52),
                            t_laws=(AntennaScalingLaw.power(1, 1),), trials=trials)
        engine.plan_densities.cache_clear()
        t0 = time.perf_counter()
        engine.estimate(cfg)
        return time.perf_counter() - t0
    finally:
        kernels.BACKEND = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=16384)
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--trials", type=int, default=500)
    a = ap.parse_args()
    print(f"compiled backend available: {kernels.BACKEND == 'cython'}")
    models = {
        "stretched_exp": StretchedExponential(0.9, 0.52),
        "multi_slope": BoundedMultiSlope(1.0, (0.01, 0.1), (2.5, 4.0)),
    }
    for name, model in models.items():
        res = bench_chunk(model, a.points, a.repeat)
        line = ", ".join(f"{k} {v * 1e3:.3f} ms" for k, v in res.items())
        if len(res) == 2:
            line += f", speedup {res['python'] / res['cython']:.2f}x"
        print(f"disc_chunk {name} ({a.points} points): {line}")
    backends = ["cython", "python"] if kernels.BACKEND == "cython" else ["python"]
    for b in backends:
        t = bench_sweep(a.trials, b)
        print(f"sweep lambda=1000, {a.trials} trials, {b}: {t:.2f} s ({t / a.trials * 1e3:.2f} ms/trial)")


if __name__ == "__main__":
    main()
