#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Swaps the kernel functions in place between runs, times the public
operations that sit on top of them, and verifies both backends return
identical results while at it.
"""

import argparse
import time

import numpy as np

from sketch3d import kernels
from sketch3d.kernels import _core_py
from sketch3d.evalharness import make_synthetic_sketch
from sketch3d.features import detect_and_describe, match_features
from sketch3d.geometry import Homography, warp_image
from sketch3d.image import Image

KERNEL_NAMES = ["fast_scores", "nms_peaks", "disc_moments", "harris_moments",
                "brief_bits", "hamming_table", "warp_bilinear_u8",
                "resize_bilinear_u8"]


def use_backend(module):
    for name in KERNEL_NAMES:
        setattr(kernels, name, getattr(module, name))


def timeit(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    try:
        from sketch3d.kernels import _core
    except ImportError:
        print("compiled backend not built; run pip install -e . first")
        return 1

    sketch = make_synthetic_sketch(512, 384, seed=42)
    shifted = Image(np.roll(sketch.array, (7, -13), axis=(0, 1)))
    hom = Homography(np.array([[0.96, 0.05, 9.0], [-0.04, 1.02, -6.0],
                               [6e-5, -4e-5, 1.0]]))

    workloads = {
        "detect_and_describe (512x384, 1500 feats)":
            lambda: detect_and_describe(sketch, 1500),
        "match_features (both drawings)":
            lambda: match_features(
                [d for _, d in detect_and_describe(sketch, 1500)],
                [d for _, d in detect_and_describe(shifted, 1500)]),
        "warp_image (512x384 perspective)":
            lambda: warp_image(sketch, hom),
    }

    rows = []
    for label, fn in workloads.items():
        use_backend(_core)
        t_c, res_c = timeit(fn, args.repeats)
        use_backend(_core_py)
        t_p, res_p = timeit(fn, args.repeats)
        rows.append((label, t_c, t_p))
        if label.startswith("detect"):
            assert len(res_c) == len(res_p)
            assert all(a[1].bits == b[1].bits for a, b in zip(res_c, res_p))
        elif label.startswith("match"):
            assert res_c == res_p
        else:
            assert np.array_equal(res_c.image.array, res_p.image.array)
    use_backend(_core)

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  compiled   python     speedup")
    for label, t_c, t_p in rows:
        print(f"{label:<{width}}  {t_c*1e3:7.1f}ms  {t_p*1e3:7.1f}ms  {t_p/t_c:6.1f}x")
    print("\nresults verified identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
