"""Compiled loops versus numpy fallbacks, kernel by kernel.

    python benchmarks/bench_kernels.py [--repeat 5]

Both versions are called directly, so the result does not depend on
BRANCHLAB_NO_NUMBA. Each pair is checked for identical output before it
is timed (float kernels to 1e-13 relative); the first compiled call is excluded as warm-up.
"""
import argparse
import timeit

import numpy as np

from branchlab import kernels
from branchlab._jit import HAVE_NUMBA
from branchlab.collapse import thresholds
from branchlab.core import validate_distribution


def cases():
    counts = kernels.compositions_numpy(4, 60)
    q = np.log(np.array([0.1, 0.2, 0.3, 0.4]))
    lfact = kernels._lgamma_table(60)
    cuts, offset = thresholds(validate_distribution(["1/6", "1/3", "1/2"]))
    words = kernels.splitmix64_numpy(7, 1_000_000)
    seeds = np.arange(200, dtype=np.uint64)
    total = counts.shape[0]
    return [
        ("compositions n=4 N=60", (kernels.compositions_loop, (4, 60, total)), (kernels.compositions_numpy, (4, 60))),
        (
            "log weights n=4 N=60",
            (kernels.log_class_weights_loop, (counts, q, lfact)),
            (kernels.log_class_weights_numpy, (counts, q, lfact)),
        ),
        ("splitmix64 1e6 words", (kernels.splitmix64_loop, (np.uint64(7), 1_000_000)), (kernels.splitmix64_numpy, (7, 1_000_000))),
        (
            "classify 1e6 words",
            (kernels.classify_loop, (words, cuts, np.int64(offset))),
            (kernels.classify_numpy, (words, cuts, offset)),
        ),
        (
            "sample counts 200 x 1000",
            (kernels.sample_counts_loop, (seeds, 1000, cuts, np.int64(offset), 3)),
            (kernels.sample_counts_numpy, (seeds, 1000, cuts, offset, 3)),
        ),
    ]


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; the loop versions run as plain Python")
    print(f"{'kernel':28s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, (loop, loop_args), (vec, vec_args) in cases():
        a, b = loop(*loop_args), vec(*vec_args)
        # float kernels may differ in summation order
        same = np.allclose(a, b, rtol=1e-13, atol=0) if a.dtype.kind == "f" else np.array_equal(a, b)
        if not same:
            raise SystemExit(f"{name}: outputs differ")
        t_loop = best(loop, loop_args, args.repeat)
        t_vec = best(vec, vec_args, args.repeat)
        print(f"{name:28s} {t_loop * 1e3:10.2f} {t_vec * 1e3:10.2f} {t_vec / t_loop:7.1f}x")


if __name__ == "__main__":
    main()
