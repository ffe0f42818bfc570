"""Compare the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is timed on both backends with identical inputs and the outputs
are checked to agree before the timing is reported.
"""
import argparse
import time

import numpy as np

from clarklab import _pykernels

try:
    from clarklab import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases(rng):
    turns = rng.random(4)
    target = np.zeros(4)
    zeros = np.r_[0.0, 0.8 * rng.random(11) * np.exp(2j * np.pi * rng.random(11))]
    z = 0.95 * np.sqrt(rng.random(20000)) * np.exp(2j * np.pi * rng.random(20000))
    pz = np.exp(2j * np.pi * rng.random(400))
    pw = np.exp(2j * np.pi * rng.random(400))
    return [
        ("return_time_scan n=2e6", "return_time_scan", (turns, target, 5e-2, 2_000_000)),
        ("return_time_records n=2e6", "return_time_records", (turns, target, 2_000_000)),
        ("blaschke_eval 12 zeros x 2e4 pts", "blaschke_eval", (zeros, 1.0, z)),
        ("difference_quotient 400x400, 12 zeros", "difference_quotient", (zeros, 1.0, pz, pw)),
    ]


def _agree(a, b):
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    if np.isscalar(a):
        return abs(a - b) <= 1e-9 * max(1.0, abs(a))
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and np.allclose(a, b, rtol=1e-9, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':42s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}  agree")
    for label, name, inputs in _cases(rng):
        tp, op = _best(lambda: getattr(_pykernels, name)(*inputs), args.repeat)
        tc, oc = _best(lambda: getattr(_ckernels, name)(*inputs), args.repeat)
        print(f"{label:42s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}x  {_agree(op, oc)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
