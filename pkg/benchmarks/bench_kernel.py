"""Compare the compiled and pure-Python polynomial kernels.

The two hot loops are sparse multiplication and exact division; everything
above them (pullbacks, vanishing orders, completion) funnels into these.

Run from the repository root:

    python3 benchmarks/bench_kernel.py
"""

import argparse
import itertools
import math
import random
import time
from fractions import Fraction

from coxmap import _kernel_py

try:
    from coxmap import _speedups
except ImportError:  # pragma: no cover - build-dependent
    _speedups = None


def dense_poly(rng, nvars, degree):
    """All monomials of total degree at most ``degree``, small random
    Fraction coefficients."""
    out = {}
    for exps in itertools.product(range(degree + 1), repeat=nvars):
        if sum(exps) <= degree:
            out[exps] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))
    return out


def best_time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="timing repetitions")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    scenarios = [(2, 10), (3, 6), (4, 4)]

    print(f"{'case':<28}{'python':>12}{'compiled':>12}{'speedup':>10}")
    for nvars, degree in scenarios:
        a = dense_poly(rng, nvars, degree)
        b = dense_poly(rng, nvars, degree)
        product = _kernel_py.poly_mul(a, b)

        rows = [
            ("mul %dv deg%d (%d terms)" % (nvars, degree, len(a)),
             lambda k: k.poly_mul(a, b)),
            ("div %dv deg%d (%d terms)" % (nvars, degree, len(product)),
             lambda k: k.poly_exact_div(product, b)),
        ]
        for label, run in rows:
            t_py = best_time(lambda: run(_kernel_py), args.repeats)
            if _speedups is None:
                print(f"{label:<28}{t_py * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
                continue
            t_c = best_time(lambda: run(_speedups), args.repeats)
            assert run(_speedups) == run(_kernel_py)
            print(
                f"{label:<28}{t_py * 1e3:>10.2f}ms{t_c * 1e3:>10.2f}ms"
                f"{t_py / t_c:>9.1f}x"
            )


if __name__ == "__main__":
    main()
