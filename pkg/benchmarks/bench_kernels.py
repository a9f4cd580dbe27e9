#!/usr/bin/env python3
"""Benchmark the compiled segmentation kernels against the pure fallback.

Times the raw kernels (closing, labeling) and the full extraction on a
generated frame at several resolutions, and verifies the backends agree
bit-for-bit on every input it times.
"""

import time

import numpy as np

from segmatch.datagen import desk_scene, generate_sequence
from segmatch.segmentation import SegParams, extract_segments
from segmatch.segmentation.backend import get_backends


def timeit(fn, repeats=20):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times)) * 1e3  # ms


def bench_raw_kernels(backends, ink, radius):
    rows = {}
    outputs = {}
    for name, impl in backends.items():
        rows[f"close r={radius}"] = rows.get(f"close r={radius}", {})
        rows[f"close r={radius}"][name] = timeit(lambda: impl.close_ink(ink, radius))
        outputs.setdefault(f"close r={radius}", {})[name] = impl.close_ink(ink, radius)
        free = ~outputs[f"close r={radius}"][name]
        rows["label"] = rows.get("label", {})
        rows["label"][name] = timeit(lambda: impl.label_regions(free))
        outputs.setdefault("label", {})[name] = impl.label_regions(free)[0]
    for op, outs in outputs.items():
        names = sorted(outs)
        for a, b in zip(names, names[1:]):
            assert np.array_equal(outs[a], outs[b]), f"{op}: {a} != {b}"
    return rows


def bench_extraction(resolutions=(256, 512, 1024)):
    import segmatch.segmentation.backend as backend_mod

    backends = get_backends()
    print(f"available backends: {', '.join(sorted(backends))}")
    print(f"(import-time selection picked: {backend_mod.BACKEND})\n")

    for res in resolutions:
        seq = generate_sequence(desk_scene(100, resolution=res, frames=2))
        frame = seq.frames[0]
        ink = frame.image.pixels < 0.5
        print(f"--- {res}x{res} ({frame.segment_count} segments) ---")
        rows = bench_raw_kernels(backends, ink, radius=max(1, round(4 * res / 512)))
        for op, per_backend in sorted(rows.items()):
            line = "  ".join(f"{n}: {ms:7.2f} ms" for n, ms in sorted(per_backend.items()))
            speed = ""
            if "c" in per_backend and "python" in per_backend:
                speed = f"  ({per_backend['python'] / per_backend['c']:.1f}x)"
            print(f"  {op:12s} {line}{speed}")

        full = {}
        frames = {}
        for name in backends:
            backend_mod._impl = backends[name]
            backend_mod.close_ink = backends[name].close_ink
            backend_mod.label_regions = backends[name].label_regions
            full[name] = timeit(lambda: extract_segments(frame.image), repeats=8)
            frames[name] = extract_segments(frame.image)
        names = sorted(frames)
        for a, b in zip(names, names[1:]):
            assert np.array_equal(frames[a].label_map, frames[b].label_map), "backends disagree"
        line = "  ".join(f"{n}: {ms:7.2f} ms" for n, ms in sorted(full.items()))
        speed = ""
        if "c" in full and "python" in full:
            speed = f"  ({full['python'] / full['c']:.1f}x)"
        print(f"  {'extract':12s} {line}{speed}")
        print()


if __name__ == "__main__":
    bench_extraction()
