"""Parity between the compiled kernels and the pure-Python fallback."""

import numpy as np
import pytest

from morseflow import fieldsynth, kernels, model
from morseflow.fieldsynth import FieldParams


def _curves():
    rng = np.random.default_rng(3)
    polys = []
    for _ in range(20):
        a = rng.uniform(-0.8, 0.8, 2)
        b = a + rng.uniform(-0.5, 0.5, 2)
        t = np.linspace(0, 1, 32)[:, None]
        polys.append(a + t * (b - a) + 0.03 * rng.standard_normal((32, 2)))
    flat = np.vstack(polys)
    offsets = np.arange(0, 21 * 32, 32, dtype=np.int64)
    pairs = np.array([(i, j) for i in range(20) for j in range(i + 1, 20)],
                     dtype=np.int64)
    return flat, offsets, pairs


def test_crossing_parity_across_implementations():
    flat, offsets, pairs = _curves()
    results = {}
    for name, mod in kernels.implementations().items():
        hits = mod.polyline_crossings(flat, offsets, pairs, 1e-6)
        results[name] = set(np.asarray(hits).tolist())
    vals = list(results.values())
    assert all(v == vals[0] for v in vals)
    assert vals[0]  # the synthetic tangle definitely crosses somewhere


def test_crossing_shared_endpoint_excluded():
    # two segments sharing an exact endpoint must not count as crossing
    flat = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    offsets = np.array([0, 2, 4], dtype=np.int64)
    pairs = np.array([[0, 1]], dtype=np.int64)
    for mod in kernels.implementations().values():
        assert len(mod.polyline_crossings(flat, offsets, pairs, 1e-6)) == 0


def test_trace_parity_between_implementations():
    impls = kernels.implementations()
    if len(impls) < 2:
        pytest.skip("compiled kernels unavailable")
    skel = model.new_default()
    mesh = fieldsynth.synthesize(skel, FieldParams(mesh_resolution=32))
    for seed in ((0.3, 0.4), (-0.2, -0.3), (0.1, 0.6)):
        ends = {}
        for name, mod in impls.items():
            line, reason = mod.trace_rk4(mesh.vertices, mesh.triangles,
                                         mesh.vectors, np.asarray(seed, float),
                                         1.0, 0.01, 3000, 1e-3)
            ends[name] = (np.asarray(line)[-1], reason)
        (end_a, r_a), (end_b, r_b) = ends.values()
        assert r_a == r_b
        assert np.hypot(*(end_a - end_b)) < 0.05


def test_trace_deterministic_per_implementation():
    skel = model.new_default()
    mesh = fieldsynth.synthesize(skel, FieldParams(mesh_resolution=32))
    for mod in kernels.implementations().values():
        a, _ = mod.trace_rk4(mesh.vertices, mesh.triangles, mesh.vectors,
                             np.array([0.25, 0.33]), 1.0, 0.01, 2000, 1e-3)
        b, _ = mod.trace_rk4(mesh.vertices, mesh.triangles, mesh.vectors,
                             np.array([0.25, 0.33]), 1.0, 0.01, 2000, 1e-3)
        assert np.array_equal(np.asarray(a), np.asarray(b))
