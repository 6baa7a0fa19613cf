"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Budgets and tolerances are pinned here: P1 runs 1,000 random valid move
sequences in under 60 s (parallelized across CPUs; the sequences are
independent), P7 runs the full numerical realization at mesh resolution 128
in under 120 s.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import fixture_lib
import helpers
import persistence_oracle
from morseflow import (
    embedding,
    fieldsynth,
    history,
    isomorphism,
    model,
    moves,
    persistence,
    validator,
)
from morseflow.fieldsynth import FieldParams
from morseflow.moves import MoveKind, MoveRequest

P1_SEQUENCES = 1000
P1_LENGTH = 12
P2_TRIALS = 500


def _announce(name, ok, detail):
    print(f"{name} {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{name}: {detail}"


# ------------------------------------------------------------------- P1

def _p1_chunk(args):
    lo, hi = args
    checked = 0
    for seed in range(lo, hi):
        skel, applied = helpers.random_valid_sequence(seed, P1_LENGTH)
        c = skel.counts()
        if c["source"] + c["sink"] - c["saddle"] != 2:
            return ("count identity", seed)
        cells = embedding.compute_cells(skel)
        if len(skel.singularities) - len(skel.separatrices) + len(cells) != 2:
            return ("euler", seed)
        if not all(len(cell.distinct_edges()) <= 4 for cell in cells):
            return ("quadrangle", seed)
        if not validator.validate(skel).animatable:
            return ("validator", seed)
        checked += 1
    return ("ok", checked)


def test_p1_structural_invariants():
    t0 = time.monotonic()
    workers = max(1, os.cpu_count() or 1)
    chunks = []
    step = P1_SEQUENCES // (workers * 4) or P1_SEQUENCES
    for lo in range(0, P1_SEQUENCES, step):
        chunks.append((lo, min(lo + step, P1_SEQUENCES)))
    total = 0
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for status, payload in pool.map(_p1_chunk, chunks):
                assert status == "ok", f"P1 violated: {status} at seed {payload}"
                total += payload
    else:
        for chunk in chunks:
            status, payload = _p1_chunk(chunk)
            assert status == "ok", f"P1 violated: {status} at seed {payload}"
            total += payload
    elapsed = time.monotonic() - t0
    _announce("P1", total == P1_SEQUENCES and elapsed < 60.0,
              f"{total} random valid move sequences (length <= {P1_LENGTH}): "
              f"count identity, Euler, quadrangle property, empty validator; "
              f"{elapsed:.1f}s (< 60s)")


# ------------------------------------------------------------------- P2

def test_p2_reversibility():
    t0 = time.monotonic()
    rng = random.Random(20240817)
    kinds = list(MoveKind)
    done = 0
    per_kind = {k: 0 for k in kinds}
    attempts = 0
    while done < P2_TRIALS:
        attempts += 1
        assert attempts < P2_TRIALS * 40, "P2 generator starved"
        kind = kinds[done % len(kinds)]
        depth = rng.randrange(0, 4)
        skel, _ = helpers.random_valid_sequence(rng.randrange(10 ** 6), depth)
        cells = embedding.compute_cells(skel)
        req = None
        for _ in range(20):
            cand = helpers.random_move_request(rng, skel, cells)
            if cand is not None and cand.kind is kind:
                req = cand
                break
        if req is None:
            continue
        try:
            out = moves.apply_move(skel, req, assume_valid=True)
        except Exception:
            continue
        if not out.valid:
            continue
        ext_id, sad_id = out.new_singularities
        back = moves.cancel_pair(out.skeleton, ext_id, sad_id)
        assert isomorphism.skeletons_isomorphic(skel, back.skeleton), (
            f"P2: not isomorphic after {kind.value} + cancel (seed state)")
        done += 1
        per_kind[kind] += 1
    assert all(v > 0 for v in per_kind.values())
    _announce("P2", done == P2_TRIALS,
              f"{done} apply_move+cancel_pair round trips isomorphic "
              f"({', '.join(f'{k.value}:{v}' for k, v in per_kind.items())}); "
              f"{time.monotonic() - t0:.1f}s")


# ------------------------------------------------------------------- P3

def test_p3_barcode_oracle():
    cases = dict(fixture_lib.all_valid_fixtures())
    for seed in range(40):
        skel, _ = helpers.random_valid_sequence(1000 + seed, 4)
        cases[f"random{seed}"] = skel
    checked = 0
    for name, skel in cases.items():
        if len(skel.singularities) > 12:
            continue
        got = persistence_oracle.barcode_as_set(persistence.compute_barcode(skel))
        want = persistence_oracle.oracle_barcode(skel)
        assert got == want, f"P3 mismatch on {name}: {got ^ want}"
        # 0 ulp: endpoints are the stored values themselves
        values = {s.value for s in skel.singularities.values()}
        for _dim, _b, _d, birth, death in got:
            assert birth in values and death in values
        checked += 1
    _announce("P3", checked >= 40,
              f"union-find barcode equals boundary-matrix reduction on "
              f"{checked} fixtures (exact pairings, 0-ulp endpoints)")


# ------------------------------------------------------------------- P4

def test_p4_paper_scenario_counts():
    skel = model.new_default()
    c = skel.counts()
    assert (c["source"], c["sink"], c["saddle"]) == (2, 1, 1)
    assert len(persistence.compute_barcode(skel).bars) == 2

    out = moves.apply_move(skel, MoveRequest(MoveKind.FACE_MIN, {"cell": "c1"}))
    c2 = out.skeleton.counts()
    assert (c2["source"], c2["sink"], c2["saddle"]) == (2, 2, 2)
    assert len(persistence.compute_barcode(out.skeleton).bars) == 3

    for name, count in (("nested_1", 1), ("nested_2", 2), ("nested_3", 3)):
        doc = fixture_lib.build_scenario(name)
        bc = persistence.compute_barcode(doc.skeleton)
        assert len(bc.bars) == count, (name, len(bc.bars))
        spans = sorted(((b.birth, b.death) for b in bc.bars),
                       key=lambda t: t[0] - t[1])
        for inner, outer in zip(spans[1:], spans):
            assert outer[0] < inner[0] and inner[1] < outer[1], (
                f"P4: bars of {name} not nested: {spans}")
    _announce("P4", True,
              "default = (2 src, 1 sink, 1 saddle) with 2 bars; semi-automatic "
              "face-min = (2,2,2) with 3 bars; scripted sequences give 1, 2, 3 "
              "nested bars")


# ------------------------------------------------------------------- P5

def test_p5_simplification_convergence():
    reduced = 0
    for name, skel in fixture_lib.all_valid_fixtures().items():
        steps = 0
        while True:
            bc = persistence.compute_barcode(skel)
            pairs = persistence.eligible_pairs(skel, bc)
            if not pairs:
                break
            before = {(b.dim, b.birth_sing, b.death_sing, b.birth, b.death)
                      for b in bc.bars}
            skel, bc_after = persistence.simplify(skel, pairs[0])
            after = {(b.dim, b.birth_sing, b.death_sing, b.birth, b.death)
                     for b in bc_after.bars}
            assert after < before and len(before) - len(after) == 1, (
                f"P5: step on {name} did not remove exactly one bar")
            steps += 1
        assert skel.is_minimal(), f"P5: {name} stuck at {skel.counts()}"
        reduced += 1
    _announce("P5", reduced == len(fixture_lib.all_valid_fixtures()),
              f"{reduced} fixtures reduced to the minimal configuration; every "
              f"step removed exactly one bar and kept the rest")


# ------------------------------------------------------------------- P6

def test_p6_debugger_coverage():
    for code, builder in fixture_lib.DIAGNOSTIC_FIXTURES.items():
        rep = validator.validate(builder())
        assert rep.codes() == {code}, f"P6: {code} fixture raised {rep.codes()}"
        assert not rep.animatable
    _announce("P6", len(fixture_lib.DIAGNOSTIC_FIXTURES) == 7,
              "seven fixtures trigger exactly their intended diagnostic; "
              "animatable false in all seven")


# ------------------------------------------------------------------- P7

def test_p7_numerical_realization():
    t0 = time.monotonic()
    params = FieldParams()  # defaults, mesh resolution 128
    rng = np.random.default_rng(7)
    fixtures = fixture_lib.all_valid_fixtures()
    for name, skel in fixtures.items():
        mesh = fieldsynth.synthesize(skel, params)
        interior = [s for s in skel.singularities.values() if s.position is not None]

        # field magnitude at designed singularities
        for s in interior:
            i = int(np.argmin(np.hypot(mesh.vertices[:, 0] - s.position[0],
                                       mesh.vertices[:, 1] - s.position[1])))
            assert np.allclose(mesh.vertices[i], s.position)
            speed = float(np.hypot(*mesh.vectors[i]))
            assert speed < 1e-3 * params.k, f"P7: |V|={speed} at {name}.{s.id}"

        # detections exactly match the design
        det = fieldsynth.extract_singularities(mesh)
        used = set()
        for d in det:
            cand = [(float(np.hypot(d.position[0] - s.position[0],
                                    d.position[1] - s.position[1])), s)
                    for s in interior]
            dist, s = min(cand, key=lambda t: t[0])
            want = -1 if s.kind is model.SingKind.SADDLE else 1
            assert dist < 0.02 and d.index == want and s.id not in used, (
                f"P7: spurious or mismatched detection {d} on {name}")
            used.add(s.id)
        assert len(used) == len(interior), f"P7: missed singularities on {name}"

        # random streamlines terminate at the right limit sets
        curves = [skel.sample_separatrix(e, 64) for e in skel.separatrices]
        sinks = [s.position for s in interior if s.kind is model.SingKind.SINK]
        sources = [s.position for s in interior if s.kind is model.SingKind.SOURCE]
        traced = 0
        while traced < 20:
            seed = rng.uniform(-0.9, 0.9, 2)
            if np.hypot(*seed) > 0.9:
                continue
            if any(np.hypot(*(seed - np.asarray(s.position))) < 0.12 for s in interior):
                continue
            if curves and min(
                np.min(np.hypot(poly[:, 0] - seed[0], poly[:, 1] - seed[1]))
                for poly in curves
            ) < 0.06:
                continue
            fwd = fieldsynth.trace_streamline(mesh, seed, "forward", 0.01, 4000)
            assert len(fwd) <= 4000
            end = fwd[-1]
            at_rim = np.hypot(*end) > 0.95
            at_sink = sinks and min(np.hypot(*(end - np.asarray(p))) for p in sinks) < 0.08
            assert at_rim or at_sink, f"P7: forward trace from {seed} on {name} ends at {end}"
            bwd = fieldsynth.trace_streamline(mesh, seed, "backward", 0.01, 4000)
            assert len(bwd) < 4000, f"P7: backward trace exhausted steps on {name}"
            end = bwd[-1]
            at_source = min(np.hypot(*(end - np.asarray(p))) for p in sources) < 0.08
            assert at_source, f"P7: backward trace from {seed} on {name} ends at {end}"
            traced += 1
    elapsed = time.monotonic() - t0
    _announce("P7", elapsed < 120.0,
              f"{len(fixtures)} fixtures at resolution 128: designed zeros "
              f"below 1e-3*k, exact detections, 20 terminating streamline "
              f"pairs each; {elapsed:.1f}s (< 120s)")


# ------------------------------------------------------------------- P8

def test_p8_determinism_and_round_trips():
    # save/load identity
    for name, skel in fixture_lib.all_valid_fixtures().items():
        data = history.save(history.Document(skel))
        assert history.save(history.load(data)) == data, f"P8: save/load on {name}"

    # byte-identical history replay for every scenario script
    for name in fixture_lib.SCENARIO_SCRIPTS:
        doc = history.Document(model.new_default())
        for cmd in fixture_lib.SCENARIO_SCRIPTS[name]():
            doc.execute(cmd)
        payload = json.loads(history.save(doc, include_history=True))
        rebuilt = history.replay(payload["history"])
        assert history.save(rebuilt) == history.save(doc), f"P8: replay of {name}"

    # bitwise identical synthesis
    skel = fixture_lib.build_scenario("flow_reconstruction").skeleton
    params = FieldParams(mesh_resolution=64)
    a = fieldsynth.synthesize(skel, params)
    b = fieldsynth.synthesize(skel, params)
    assert np.array_equal(a.vectors, b.vectors)
    assert np.array_equal(a.vertices, b.vertices)
    assert np.array_equal(a.triangles, b.triangles)
    _announce("P8", True,
              "save/load identity on all fixtures; history replay "
              "byte-identical; repeated synthesize bitwise identical")
