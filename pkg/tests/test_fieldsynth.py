import math

import numpy as np
import pytest

import fixture_lib
from morseflow import fieldsynth, model, moves
from morseflow.errors import InvalidSkeleton, NoNearbySeparatrix, SeedOutsideDomain
from morseflow.fieldsynth import FieldParams
from morseflow.model import SingKind, Singularity

TEST_RES = 48  # cheap resolution for unit tests; acceptance runs at 128


def test_generate_mesh_containment_euler_and_refinement():
    mesh = fieldsynth.generate_mesh(8)
    r = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1])
    assert r.max() <= 1 + 1e-12

    v = len(mesh.vertices)
    t = len(mesh.triangles)
    edges = {tuple(sorted(e)) for tri in mesh.triangles
             for e in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0]))}
    assert v - len(edges) + t == 1  # disk

    h32 = fieldsynth.mesh_edge_lengths(fieldsynth.generate_mesh(32)).max()
    h64 = fieldsynth.mesh_edge_lengths(fieldsynth.generate_mesh(64)).max()
    assert abs(h32 / h64 - 2.0) < 0.5  # halves within 25%

    with pytest.raises(ValueError):
        fieldsynth.generate_mesh(4)


def test_basis_field_formula():
    params = FieldParams(d=1.0, k=1.0, truncation_radius=10.0)
    src = Singularity("s", SingKind.SOURCE, (0.0, 0.0), 1.0)
    assert np.allclose(fieldsynth.basis_field(src, params, (0.0, 0.0)), (0, 0))
    for r in (0.25, 0.5, 1.0):
        got = fieldsynth.basis_field(src, params, (r, 0.0))
        assert np.allclose(got, (r * math.exp(-r * r), 0.0))

    sad = Singularity("x", SingKind.SADDLE, (0.0, 0.0), 1.0)
    p = FieldParams(d=2.0, k=3.0, truncation_radius=10.0)
    got = fieldsynth.basis_field(sad, p, (0.4, -0.3))
    env = math.exp(-2.0 * (0.16 + 0.09))
    assert np.allclose(got, (3 * 0.4 * env, -3 * -0.3 * env))

    sink = Singularity("k", SingKind.SINK, (0.2, 0.0), 1.0)
    got = fieldsynth.basis_field(sink, FieldParams(d=1, k=2, truncation_radius=10), (0.5, 0.0))
    assert np.allclose(got, (-2 * 0.3 * math.exp(-0.09), 0.0))


def test_basis_field_truncation():
    params = FieldParams(d=1.0, k=1.0, truncation_radius=0.3)
    src = Singularity("s", SingKind.SOURCE, (0.0, 0.0), 1.0)
    assert np.allclose(fieldsynth.basis_field(src, params, (0.4, 0.0)), (0, 0))


def test_saddle_rotation_follows_solid_attachments():
    skel = model.new_default()
    # default saddle: solid ends at 90 and 270 degrees -> outflow axis vertical
    axis = fieldsynth.saddle_axis_angle(skel, "n3")
    assert axis in (pytest.approx(math.pi / 2), pytest.approx(3 * math.pi / 2))


def test_synthesize_zero_at_designed_singularities():
    skel = model.new_default()
    params = FieldParams(mesh_resolution=TEST_RES)
    mesh = fieldsynth.synthesize(skel, params)
    for s in skel.singularities.values():
        if s.position is None:
            continue
        i = int(np.argmin(np.hypot(mesh.vertices[:, 0] - s.position[0],
                                   mesh.vertices[:, 1] - s.position[1])))
        assert np.allclose(mesh.vertices[i], s.position)
        assert np.hypot(*mesh.vectors[i]) < 1e-3 * params.k


def test_synthesize_requires_animatable():
    s = model.new_default()
    s.disconnect("e0")
    with pytest.raises(InvalidSkeleton):
        fieldsynth.synthesize(s, FieldParams(mesh_resolution=TEST_RES))


def test_scaling_k_scales_vectors_linearly():
    skel = model.new_default()
    a = fieldsynth.synthesize(skel, FieldParams(mesh_resolution=24, smoothing_iterations=0))
    b = fieldsynth.synthesize(skel, FieldParams(k=2.0, mesh_resolution=24, smoothing_iterations=0))
    assert np.allclose(2.0 * a.vectors, b.vectors)


def test_synthesize_deterministic():
    skel = fixture_lib.build_scenario("flow_reconstruction").skeleton
    p = FieldParams(mesh_resolution=TEST_RES)
    a = fieldsynth.synthesize(skel, p)
    b = fieldsynth.synthesize(skel, p)
    assert np.array_equal(a.vectors, b.vectors)
    assert np.array_equal(a.vertices, b.vertices)


def test_extract_singularities_radial_and_constant():
    mesh = fieldsynth.generate_mesh(16)
    mesh.vectors = mesh.vertices.copy()  # V(p) = p: one source at the origin
    det = fieldsynth.extract_singularities(mesh)
    assert len(det) == 1
    assert det[0].index == 1
    assert np.hypot(*det[0].position) < 1e-9

    mesh.vectors = np.ones_like(mesh.vertices)
    assert fieldsynth.extract_singularities(mesh) == []


def test_extract_matches_design():
    skel = model.new_default()
    mesh = fieldsynth.synthesize(skel, FieldParams(mesh_resolution=TEST_RES))
    det = fieldsynth.extract_singularities(mesh)
    assert len(det) == 3
    by_index = sorted(d.index for d in det)
    assert by_index == [-1, 1, 1]
    positions = {tuple(np.round(d.position, 3)) for d in det}
    assert positions == {(-0.5, 0.0), (0.5, 0.0), (0.0, 0.0)}


def test_poincare_index_sum():
    skel = fixture_lib.build_scenario("flow_reconstruction").skeleton
    mesh = fieldsynth.synthesize(skel, FieldParams(mesh_resolution=TEST_RES))
    det = fieldsynth.extract_singularities(mesh)
    c = skel.counts()
    want = (c["source"] + (c["sink"] - 1)) - c["saddle"]  # interior only
    assert sum(d.index for d in det) == want


def test_auxiliary_field_orientation_and_errors():
    skel = model.new_default()
    params = FieldParams()
    # on the top solid separatrix the flow runs from the saddle to the rim
    v = fieldsynth.auxiliary_field(skel, (0.0, 0.5), params)
    assert v[1] > 0.9 * params.k
    # on a dashed separatrix the flow runs from the source into the saddle
    v = fieldsynth.auxiliary_field(skel, (-0.25, 0.0), params)
    assert v[0] > 0.9 * params.k
    with pytest.raises(NoNearbySeparatrix):
        fieldsynth.auxiliary_field(skel, (0.5, 0.5), params)


def test_auxiliary_tie_break_deterministic():
    skel = model.new_default()
    params = FieldParams(blend_radius=0.5)
    # equidistant between the top solid (e2) and left dashed (e0): ties
    # resolve to the smaller separatrix id (e0, flow in +x direction)
    p = (-0.2, 0.2)
    v = fieldsynth.auxiliary_field(skel, p, params)
    v2 = fieldsynth.auxiliary_field(skel, p, params)
    assert np.array_equal(v, v2)
    assert abs(v[0]) > abs(v[1])


def test_streamlines_terminate_sensibly():
    skel = model.new_default()
    mesh = fieldsynth.synthesize(skel, FieldParams(mesh_resolution=TEST_RES))
    # seed at a sink-side: forward exits through the boundary
    fwd = fieldsynth.trace_streamline(mesh, (0.3, 0.42), "forward", 0.01, 4000)
    assert np.hypot(*fwd[-1]) > 0.95
    # backward ends near a source
    bwd = fieldsynth.trace_streamline(mesh, (0.3, 0.42), "backward", 0.01, 4000)
    d = min(np.hypot(bwd[-1][0] - sx, bwd[-1][1] - sy)
            for sx, sy in ((-0.5, 0.0), (0.5, 0.0)))
    assert d < 0.05
    assert len(bwd) < 4000

    # seeding at a designed sink stops immediately
    out = moves.apply_move(skel, moves.MoveRequest(moves.MoveKind.FACE_MIN, {"cell": "c1"}))
    m_id, _ = out.new_singularities
    mesh2 = fieldsynth.synthesize(out.skeleton, FieldParams(mesh_resolution=TEST_RES))
    line = fieldsynth.trace_streamline(mesh2, out.skeleton.sing(m_id).position,
                                       "forward", 0.01, 400)
    assert len(line) < 5

    with pytest.raises(SeedOutsideDomain):
        fieldsynth.trace_streamline(mesh, (1.5, 0.0), "forward", 0.01, 10)


def test_basin_fidelity_spot_check():
    # a seed inside the right cell of the default configuration flows forward
    # into the boundary without crossing the vertical solid separatrices
    skel = model.new_default()
    mesh = fieldsynth.synthesize(skel, FieldParams(mesh_resolution=TEST_RES))
    line = fieldsynth.trace_streamline(mesh, (0.2, 0.1), "forward", 0.01, 4000)
    assert np.hypot(*line[-1]) > 0.95
    assert np.all(line[:, 0] > -0.05)  # stays on the right side
