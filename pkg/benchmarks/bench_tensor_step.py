"""Time one tensor-walk step with the compiled kernel and the numpy fallback.

Example::

    python3 benchmarks/bench_tensor_step.py --n 100 --d 4 --repeats 5
"""
import argparse
import time

import numpy as np

from hyperlp import _fallback
from hyperlp.model import HsbmParams, sample_hsbm
from hyperlp.walks import SeedSpec, completion_index, make_seed_state

try:
    from hyperlp import _kernels
except ImportError:
    _kernels = None


def time_step(module, index, y, repeats):
    stride = index.n ** (index.order - 1)
    best = np.inf
    out = np.zeros_like(y)
    for _ in range(repeats):
        out[:] = 0
        t = time.perf_counter()
        module.tensor_step(y, index.state_key, index.indptr, index.vertex, index.weight,
                           index.n, stride, out)
        best = min(best, time.perf_counter() - t)
    return best, out.copy()


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--d", type=int, default=4)
    parser.add_argument("--p", type=float, default=0.3)
    parser.add_argument("--q", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    h = sample_hsbm(HsbmParams(args.n, args.d, args.p, args.q), args.seed)
    index = completion_index(h)
    # a dense state exercises every completion list
    y = make_seed_state(SeedSpec("uniform"), args.n, h.labels, order=args.d - 1)
    y = y + 1.0 / y.size
    print(f"n={args.n} d={args.d} edges={h.num_edges} states={y.size} "
          f"completions={index.vertex.size}")

    slow, ref = time_step(_fallback, index, y, args.repeats)
    print(f"numpy    {slow * 1e3:9.2f} ms")
    if _kernels is None:
        print("cython   not built")
        return
    fast, out = time_step(_kernels, index, y, args.repeats)
    err = np.max(np.abs(out - ref)) / np.max(np.abs(ref))
    print(f"cython   {fast * 1e3:9.2f} ms   speedup {slow / fast:5.1f}x   max rel diff {err:.1e}")


if __name__ == "__main__":
    main()
