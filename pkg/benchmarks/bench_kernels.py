"""Benchmark the compiled iteration kernels against the pure numpy fallback.

Usage: python benchmarks/bench_kernels.py [--steps 5000] [--repeat 5]
"""

import argparse
import time
import warnings

import numpy as np

from imcergo import IntervalNormalizationWarning, IntervalRow, StateSpace, TransitionModel, VertexRow
from imcergo import _kernels_py as pure
from imcergo.kernels import compile_model

try:
    from imcergo import _speedups as compiled
except ImportError:
    compiled = None


def build_model(rng, n, interval_share=0.4):
    rows = []
    for _ in range(n):
        if rng.random() < interval_share:
            center = rng.dirichlet(np.ones(n))
            slack = rng.uniform(0, 0.2, n)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntervalNormalizationWarning)
                rows.append(
                    IntervalRow(np.maximum(center - slack, 0), np.minimum(center + slack, 1))
                )
        else:
            rows.append(VertexRow(rng.dirichlet(np.ones(n), size=int(rng.integers(2, 5)))))
    labels = [f"s{i}" for i in range(n)]
    return TransitionModel(StateSpace(labels), rows)


def timeit(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=5000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    backends = [("pure", pure)] + ([("compiled", compiled)] if compiled else [])
    if compiled is None:
        print("note: compiled kernels not built; benchmarking the fallback only")

    header = f"{'n':>3} {'kernel':<12}" + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for n in (3, 5, 8, 12):
        model = build_model(rng, n)
        cm = compile_model(model)
        f = rng.uniform(-1, 1, n)
        rows = {
            "average": lambda impl: impl.run_average(cm, f, args.steps),
            "eigen": lambda impl: impl.run_eigen(cm, f, np.zeros(n), 1e-9, 20_000),
        }
        for label, call in rows.items():
            times = [timeit(lambda impl=impl: call(impl), args.repeat) for _, impl in backends]
            line = f"{n:>3} {label:<12}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
            if len(times) == 2 and times[1] > 0:
                line += f"{times[0] / times[1]:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
