"""Throughput of the compiled trial kernel against the NumPy fallback.

    python3 benchmarks/bench_kernels.py --trials 200000 --samples 100 1000
"""
import argparse
import time

import numpy as np

from pilotsense import Hypothesis, SensingParams
from pilotsense._backend import KERNELS
from pilotsense.model import db_to_linear
from pilotsense.montecarlo import simulate_components


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--samples", type=int, nargs="+", default=[100, 1000])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    backends = [name for name, kernel in KERNELS.items() if kernel is not None]
    if "compiled" not in backends:
        print("compiled kernel not built; timing the NumPy fallback only")
    print(f"{'N':>6} {'hypothesis':>10} {'backend':>9} {'seconds':>9} {'Mtrial-samples/s':>17}")
    for n in args.samples:
        params = SensingParams(0.1, db_to_linear(-5.0), 1.0, n)
        for hyp in Hypothesis:
            reference = None
            for name in backends:
                def run():
                    return simulate_components(params, hyp, args.trials, master_seed=1,
                                               workers=args.workers, backend=name)
                out = run()
                if reference is None:
                    reference = out
                else:
                    # same draws, only summation order may differ
                    assert all(np.allclose(a, b, rtol=1e-12, atol=1e-12)
                               for a, b in zip(out, reference))
                seconds = best_time(run, args.repeat)
                rate = args.trials * n / seconds / 1e6
                print(f"{n:>6} {hyp.name:>10} {name:>9} {seconds:>9.3f} {rate:>17.1f}")


if __name__ == "__main__":
    main()
