"""Compare the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from famkit.kernels import _pure

try:
    from famkit.kernels import _native
except ImportError:
    _native = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = parser.parse_args()

    if _native is None:
        print("compiled backend not built; run pip install -e . first")
        return

    rng = np.random.default_rng(0)
    conv_x = rng.normal(size=(16, 56, 56))
    conv_w = rng.normal(size=(32, 16, 3, 3))
    conv_b = rng.normal(size=32)
    pool_x = rng.normal(size=(32, 56, 56))
    small_map = rng.normal(size=(7, 7))
    mask = rng.random((224, 224)) < 0.4

    cases = [
        ("conv2d 16x56x56 -> 32 (k3 s1 p1)",
         lambda m: m.conv2d(conv_x, conv_w, conv_b, 1, 1)),
        ("maxpool2d 32x56x56 (k2 s2)",
         lambda m: m.maxpool2d(pool_x, 2, 2)),
        ("bilinear 7x7 -> 224x224",
         lambda m: m.bilinear_resize(small_map, 224, 224)),
        ("label_components 224x224",
         lambda m: m.label_components(mask)),
    ]

    print(f"{'kernel':38} {'pure':>10} {'native':>10} {'speedup':>8}")
    for name, fn in cases:
        a, b = fn(_pure), fn(_native)
        if isinstance(a, tuple):
            assert a[1] == b[1] and np.array_equal(a[0], b[0]), name
        else:
            assert np.max(np.abs(a - b)) < 1e-9, name
        t_pure = timeit(lambda: fn(_pure), args.repeat)
        t_native = timeit(lambda: fn(_native), args.repeat)
        print(f"{name:38} {t_pure * 1e3:9.2f}ms {t_native * 1e3:9.2f}ms {t_pure / t_native:7.1f}x")


if __name__ == "__main__":
    main()
