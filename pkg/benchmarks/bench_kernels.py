"""Benchmark the compiled kernels against the pure-Python fallback.

Run with:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from morseflow import fieldsynth, kernels, model, moves
from morseflow.fieldsynth import FieldParams
from morseflow.moves import MoveKind, MoveRequest


def build_crossing_case():
    rng = np.random.default_rng(42)
    polys = []
    for _ in range(60):
        a = rng.uniform(-0.8, 0.8, 2)
        b = a + rng.uniform(-0.5, 0.5, 2)
        t = np.linspace(0, 1, 32)[:, None]
        polys.append(a + t * (b - a) + 0.02 * rng.standard_normal((32, 2)))
    flat = np.vstack(polys)
    offsets = np.arange(0, 61 * 32, 32, dtype=np.int64)
    pairs = np.array([(i, j) for i in range(60) for j in range(i + 1, 60)],
                     dtype=np.int64)
    return flat, offsets, pairs


def build_trace_case():
    skel = model.new_default()
    out = moves.apply_move(skel, MoveRequest(MoveKind.FACE_MIN, {"cell": "c1"}))
    mesh = fieldsynth.synthesize(out.skeleton, FieldParams(mesh_resolution=96))
    rng = np.random.default_rng(7)
    seeds = []
    while len(seeds) < 12:
        p = rng.uniform(-0.7, 0.7, 2)
        if np.hypot(*p) < 0.85:
            seeds.append(p)
    return mesh, seeds


def timeit(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    impls = kernels.implementations()
    print(f"implementations: {', '.join(impls)} (active: "
          f"{'compiled' if kernels.HAVE_FAST else 'python'})\n")

    flat, offsets, pairs = build_crossing_case()
    print(f"polyline_crossings: 60 curves x 32 samples, {len(pairs)} pairs")
    base = None
    for name, mod in impls.items():
        t = timeit(lambda: mod.polyline_crossings(flat, offsets, pairs, 1e-6))
        speed = "" if base is None else f"  ({base / t:.1f}x)"
        base = base or t
        print(f"  {name:9s} {t * 1000:8.2f} ms{speed}")

    mesh, seeds = build_trace_case()
    print(f"\ntrace_rk4: {len(seeds)} streamlines, mesh of {len(mesh.vertices)} vertices")
    base = None
    for name, mod in impls.items():
        def run(mod=mod):
            for s in seeds:
                mod.trace_rk4(mesh.vertices, mesh.triangles, mesh.vectors,
                              np.asarray(s, float), 1.0, 0.01, 3000, 1e-6, 2e-2)
        t = timeit(run, repeat=3)
        speed = "" if base is None else f"  ({base / t:.1f}x)"
        base = base or t
        print(f"  {name:9s} {t * 1000:8.2f} ms{speed}")


if __name__ == "__main__":
    main()
