#!/usr/bin/env python3
"""Benchmark the compiled GF(2) kernels against the pure-numpy fallback.

Micro-benchmarks call both backend modules directly; the end-to-end rows
time a full minimal-resolution build in a subprocess with ESSCOH_KERNEL
pinned, since the backend is chosen at import time.

Usage: python benchmarks/bench_gf2.py [--sizes 512,1024,2048] [--repeat 3]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from esscoh._kernels import _gf2_py

try:
    from esscoh._kernels import _gf2 as _gf2_cy
except ImportError:
    _gf2_cy = None

from esscoh.linalg import pack_rows


def _random_packed(rng, rows, cols):
    dense = rng.integers(0, 2, (rows, cols), dtype=np.uint8)
    return pack_rows(dense, cols)


def bench_rref(backend, rng, size, repeat):
    best = float("inf")
    for _ in range(repeat):
        a = _random_packed(rng, size, size)
        t0 = time.perf_counter()
        backend.rref_inplace(a, size)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_matmul(backend, rng, size, repeat):
    masks = _random_packed(rng, size, size)
    source = _random_packed(rng, size, size)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        backend.mask_matmul(masks, size, source)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_resolution(kernel: str, group: str, maxdeg: int) -> float:
    code = (
        "import time; t0=time.perf_counter(); "
        "from esscoh import grouptheory as gt; "
        "from esscoh.resolution import minimal_resolution; "
        "from esscoh.ringops import ring_slice; "
        f"res = minimal_resolution(gt.catalog_group({group!r}), {maxdeg}); "
        "ring_slice(res); "
        "print(time.perf_counter() - t0)"
    )
    env = dict(os.environ, ESSCOH_KERNEL=kernel)
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="512,1024,2048")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--skip-e2e", action="store_true")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    backends = [("python", _gf2_py)]
    if _gf2_cy is not None:
        backends.append(("compiled", _gf2_cy))
    else:
        print("compiled kernel not built; showing the fallback only")

    print(f"{'op':18s} {'size':>6s} " +
          " ".join(f"{name:>10s}" for name, _ in backends) + "   speedup")
    for size in sizes:
        times = [bench_rref(mod, rng, size, args.repeat) for _, mod in backends]
        ratio = times[0] / times[-1] if len(times) > 1 else 1.0
        print(f"{'rref':18s} {size:6d} " +
              " ".join(f"{t * 1e3:9.1f}ms" for t in times) + f"  {ratio:6.1f}x")
        times = [bench_matmul(mod, rng, size, args.repeat) for _, mod in backends]
        ratio = times[0] / times[-1] if len(times) > 1 else 1.0
        print(f"{'mask_matmul':18s} {size:6d} " +
              " ".join(f"{t * 1e3:9.1f}ms" for t in times) + f"  {ratio:6.1f}x")

    if not args.skip_e2e:
        print()
        for group, maxdeg in [("D8", 10), ("D8xC2", 8)]:
            row = [bench_resolution(name, group, maxdeg)
                   for name, _ in backends]
            ratio = row[0] / row[-1] if len(row) > 1 else 1.0
            print(f"{'resolution+ring':18s} {group:>6s} " +
                  " ".join(f"{t:9.2f}s " for t in row) + f"  {ratio:6.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
