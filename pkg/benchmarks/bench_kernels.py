"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from orbigpd._kernels import HAVE_NUMBA, numba_impl, numpy_impl


def cyclic(n):
    i = np.arange(n)
    return ((i[:, None] + i[None, :]) % n).astype(np.int64)


def workloads():
    t = cyclic(96)
    mask = np.zeros(96, np.bool_)
    mask[[12, 32]] = True
    action = np.stack([np.roll(np.arange(384), g) for g in range(96)]).astype(np.int64)
    nx = 48
    src = np.stack([(np.arange(nx) + g) % nx for g in range(24)]).astype(np.int64)
    tgt = np.stack([(np.arange(12) + h) % 12 for h in range(12)]).astype(np.int64)
    hom = (np.arange(24) % 12).astype(np.int64)
    fmap = (np.arange(nx) % 12).astype(np.int64)
    return {
        "assoc_violation": (t,),
        "closure": (t, mask),
        "orbit_labels": (action,),
        "action_violation": (t, t),
        "faithful_violation": (src, tgt, hom, fmap),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba not available; only numpy timings are meaningful")
    print(f"{'kernel':20s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, inputs in workloads().items():
        a = numpy_impl[name](*inputs)
        b = numba_impl[name](*inputs)  # compile outside the timer
        assert np.array_equal(a, b), name
        tp = min(timeit.repeat(lambda: numpy_impl[name](*inputs), number=1, repeat=args.repeat)) * 1e3
        tn = min(timeit.repeat(lambda: numba_impl[name](*inputs), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:20s} {tp:10.3f} {tn:10.3f} {tp / tn:8.1f}x")


if __name__ == "__main__":
    main()
