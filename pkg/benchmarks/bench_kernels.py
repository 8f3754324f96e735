"""Compare the compiled and numpy phase kernels.

Times F_{s,n}(x, t) for a quadratic surd x over a range of n, for each
available backend and thread count.  Thread counts must give bit-identical
sums within a backend; across backends the sums agree to a few ULPs.

    python3 benchmarks/bench_kernels.py --sizes 10000 100000 1000000 --threads 1 4
"""

import argparse
import statistics
import time
from fractions import Fraction

from thetasum import kernels
from thetasum.numbers import QuadSurd


def timed(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 100_000, 1_000_000])
    ap.add_argument("--threads", type=int, nargs="+", default=[1, 4])
    ap.add_argument("--s", type=float, default=0.7)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    x = QuadSurd(-1, 1, 2)
    Y, T = kernels.fixed_phase(x, Fraction(1, 3))
    backends = sorted(kernels.available_backends(), key=lambda b: b != "python")
    print(f"backends: {', '.join(backends)}")
    print(f"{'n':>10} {'backend':>9} {'threads':>7} {'seconds':>10} {'Mterm/s':>8} {'speedup':>8}")
    for n in args.sizes:
        base = None
        for be in backends:
            ref_val = None
            for nt in args.threads:
                sec, (val, _) = timed(lambda: kernels.phase_sum(Y, T, 1, n, args.s, 0.0, nt, be), args.repeat)
                if ref_val is None:
                    ref_val = val
                if base is None and be == "python" and nt == 1:
                    base = sec
                same = "" if val == ref_val else "  MISMATCH"
                speed = f"{base / sec:8.1f}" if base else f"{'-':>8}"
                print(f"{n:>10} {be:>9} {nt:>7} {sec:>10.4f} {n / sec / 1e6:>8.1f} {speed}{same}")


if __name__ == "__main__":
    main()
