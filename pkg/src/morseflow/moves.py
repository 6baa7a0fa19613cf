"""Elementary moves (face/edge/vertex x max/min) and pair cancellation.

Every move inserts one saddle-extremum pair and, in semi-automatic mode,
wires four new separatrix ends so that the result stays a valid
configuration: two new singularities, four new separatrix ends, two new
cells. Cancellation is the exact reverse: it removes an adjacent
extremum-saddle pair together with the saddle's four separatrices and
re-targets the extremum's surviving ends to the saddle's opposite neighbor.

Incidence templates (semi-automatic):

* face-min in a cell with source corner S and sink corner K: new saddle s
  and sink m with solid s-m, solid s-K, and a dashed lens s-S (twice)
  enclosing m.
* face-max: mirror image (solid lens s-K around the new source M, dashed
  s-M inside the lens, dashed s-S outside).
* edge-min on a solid edge (d, K): the edge is subdivided along its curve
  into d-m, m-s, s-K, and the new saddle sends one dashed end into each
  cell flanking the edge (to that cell's source corner; both ends reach the
  same source when the edge has the same cell on both sides).
* edge-max on a dashed edge (d, S): mirror subdivision d-M, M-s, s-S with
  one solid end into each flanking cell's sink corner.
* vertex-min at a sink K over an angular sector: the ends of K strictly
  inside the sector are transferred to the new sink m; the new saddle sits
  between K and m (solid s-K, solid s-m) and sends dashed ends to the
  source corners of the faces flanking the sector (a doubled end to one
  source when the sector crosses no end).
* vertex-max: mirror at a source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import embedding, validator
from .embedding import Cell, angle_in_ccw_span, corner_sector, sector_angles
from .errors import (
    BoundaryCancellation,
    DegenerateCancellation,
    InfeasibleInterval,
    InvalidSourceState,
    InvalidTarget,
    NotAdjacent,
    ValueConflict,
    WrongEdgeClass,
)
from .model import (
    DEFAULT_GLYPH_RADIUS,
    TAU,
    Attachment,
    SepClass,
    SingKind,
    Skeleton,
    norm_angle,
    _id_key,
)


class MoveKind(str, Enum):
    FACE_MIN = "face-min"
    FACE_MAX = "face-max"
    EDGE_MIN = "edge-min"
    EDGE_MAX = "edge-max"
    VERTEX_MIN = "vertex-min"
    VERTEX_MAX = "vertex-max"

    @property
    def adds_sink(self) -> bool:
        return self.value.endswith("min")


@dataclass
class MoveRequest:
    kind: MoveKind
    target: dict
    mode: str = "semi-automatic"  # or "manual"
    placement: dict | None = None  # optional {"extremum":[x,y], "saddle":[x,y]}
    values: dict | None = None  # optional {"extremum": v, "saddle": v}

    def to_json(self):
        out = {"kind": MoveKind(self.kind).value, "target": self.target, "mode": self.mode}
        if self.placement:
            out["placement"] = self.placement
        if self.values:
            out["values"] = self.values
        return out

    @classmethod
    def from_json(cls, data: dict) -> "MoveRequest":
        from .errors import ParseError

        try:
            return cls(
                kind=MoveKind(data["kind"]),
                target=dict(data["target"]),
                mode=data.get("mode", "semi-automatic"),
                placement=data.get("placement"),
                values=data.get("values"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed move request: {exc}") from exc


@dataclass
class MoveOutcome:
    skeleton: Skeleton
    new_singularities: list[str]
    new_separatrices: list[str]
    diagnostics: list

    @property
    def valid(self) -> bool:
        return not self.diagnostics

    def to_json(self):
        return {
            "skeleton": self.skeleton.to_document(),
            "created": {
                "singularities": list(self.new_singularities),
                "separatrices": list(self.new_separatrices),
            },
            "diagnostics": [d.to_json() for d in self.diagnostics],
        }


# ------------------------------------------------------------------ values

def unique_value(candidate: float, existing) -> float:
    """Nudge ``candidate`` until it differs from every value in ``existing``."""
    taken = set(float(v) for v in existing)
    v = float(candidate)
    step = max(1e-9, abs(v) * 1e-9)
    while v in taken:
        v += step
        step *= 2
    return v


def _saddle_neighbor_values(skel: Skeleton, saddle_id: str, exclude=()):
    lo, hi = [], []
    for eid, end in skel.ends_at(saddle_id):
        if end != "saddle":
            continue
        ext = skel.singularities.get(skel.separatrices[eid].extremum_end.singularity)
        if ext is None or ext.id in exclude:
            continue
        if ext.kind.is_sinklike:
            lo.append(ext.value)
        elif ext.kind is SingKind.SOURCE:
            hi.append(ext.value)
    return lo, hi


def _extremum_neighbor_saddles(skel: Skeleton, extremum_id: str):
    vals = []
    for eid, end in skel.ends_at(extremum_id):
        if end != "extremum":
            continue
        sad = skel.singularities.get(skel.separatrices[eid].saddle_end.singularity)
        if sad is not None:
            vals.append(sad.value)
    return vals


def assign_default_values(skel: Skeleton, extremum_id: str, saddle_id: str) -> tuple[float, float]:
    """Choose values for a freshly wired pair: the saddle strictly inside the
    interval forced by its neighbors, the extremum beyond its adjacent
    saddles, everything distinct from existing values. Writes both values
    into the skeleton and returns (extremum value, saddle value)."""
    existing = [s.value for s in skel.singularities.values()
                if s.id not in (extremum_id, saddle_id)]
    lo_vals, hi_vals = _saddle_neighbor_values(skel, saddle_id, exclude=(extremum_id,))
    lo = max(lo_vals) if lo_vals else None
    hi = min(hi_vals) if hi_vals else None
    if lo is None and hi is None:
        saddle_v = unique_value(1.0, existing)
    elif lo is None:
        saddle_v = unique_value(hi - 1.0, existing)
    elif hi is None:
        saddle_v = unique_value(lo + 1.0, existing)
    else:
        if not lo < hi:
            raise InfeasibleInterval(f"no feasible saddle value in ({lo}, {hi})")
        saddle_v = unique_value(lo + 0.5 * (hi - lo), existing)
    skel.sing(saddle_id).value = saddle_v
    existing.append(saddle_v)

    ext = skel.sing(extremum_id)
    adjacent = _extremum_neighbor_saddles(skel, extremum_id) or [saddle_v]
    if ext.kind is SingKind.SOURCE:
        ext_v = unique_value(max(adjacent) + 1.0, existing)
    else:
        # keep interior sinks above the boundary value so the boundary stays
        # the global minimum and persistence simplification can always finish
        bound = min(adjacent)
        floor = skel.boundary.value
        if not floor < bound:
            raise InfeasibleInterval(f"no feasible sink value in ({floor}, {bound})")
        ext_v = unique_value(floor + 0.5 * (bound - floor), existing)
    ext.value = ext_v
    return ext_v, saddle_v


def _check_value_order(skel: Skeleton, saddle_ids) -> None:
    for sid in saddle_ids:
        sing = skel.sing(sid)
        if sing.kind is not SingKind.SADDLE:
            continue
        lo, hi = _saddle_neighbor_values(skel, sid)
        if (lo and max(lo) >= sing.value) or (hi and min(hi) <= sing.value):
            raise ValueConflict(f"requested values violate ordering at saddle {sid}")


def _apply_pair_values(work: Skeleton, req: MoveRequest, ext_id: str, sad_id: str):
    if req.values:
        ev = float(req.values["extremum"])
        sv = float(req.values["saddle"])
        taken = [s.value for s in work.singularities.values() if s.id not in (ext_id, sad_id)]
        if ev in taken or sv in taken or ev == sv:
            raise ValueConflict("requested values collide with existing ones")
        work.sing(ext_id).value = ev
        work.sing(sad_id).value = sv
        _check_value_order(work, [sad_id])
        for eid, end in work.ends_at(ext_id):
            if end == "extremum":
                _check_value_order(work, [work.separatrices[eid].saddle_end.singularity])
    else:
        assign_default_values(work, ext_id, sad_id)


# ---------------------------------------------------------------- geometry

def _dir(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def _angle_of(v) -> float:
    return norm_angle(math.atan2(v[1], v[0]))


def _glyph_for(scale: float) -> float:
    return float(min(DEFAULT_GLYPH_RADIUS, max(0.2 * scale, 1e-4)))


def _arclength_point(poly: np.ndarray, frac: float) -> np.ndarray:
    seg = np.diff(poly, axis=0)
    lens = np.hypot(seg[:, 0], seg[:, 1])
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    want = frac * cum[-1]
    i = int(np.searchsorted(cum, want, side="right") - 1)
    i = min(max(i, 0), len(seg) - 1)
    t = 0.0 if lens[i] == 0 else (want - cum[i]) / lens[i]
    return poly[i] + t * seg[i]


def _subpath_controls(poly: np.ndarray, f0: float, f1: float, n_ctrl: int = 3):
    fracs = np.linspace(f0, f1, n_ctrl + 2)[1:-1]
    return [tuple(_arclength_point(poly, f)) for f in fracs]


def _polylines_cross(pa: np.ndarray, pb: np.ndarray) -> bool:
    from ._kernels_py import segments_intersect_batch

    na, nb = len(pa) - 1, len(pb) - 1
    ii, jj = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    return bool(segments_intersect_batch(pa[ii], pa[ii + 1], pb[jj], pb[jj + 1], 0.0).any())


def _embedding_consistent(work: Skeleton) -> bool:
    cells = embedding.compute_cells(work)
    euler = len(work.singularities) - len(work.separatrices) + len(cells)
    return euler == 2 and all(len(c.distinct_edges()) <= 4 for c in cells)


def _swap_pair_ends(work: Skeleton, eid_a: str, eid_b: str):
    a = work.sep(eid_a)
    b = work.sep(eid_b)
    a.extremum_end, b.extremum_end = (
        Attachment(a.extremum_end.singularity, b.extremum_end.angle),
        Attachment(b.extremum_end.singularity, a.extremum_end.angle),
    )
    # the trailing control point is the arrival stub tied to the slot
    if a.control_points and b.control_points:
        a.control_points[-1], b.control_points[-1] = (
            b.control_points[-1], a.control_points[-1])


def _fix_doubled_pair(work: Skeleton, eid_a: str, eid_b: str):
    """Resolve the slot assignment of two sibling ends at one corner: the
    orientation that keeps the embedding planar (Euler + quadrangles) wins;
    among planar orientations, prefer non-crossing curves."""
    a_ok = _embedding_consistent(work)
    a_cross = _polylines_cross(
        work.sample_separatrix(eid_a, 16), work.sample_separatrix(eid_b, 16))
    if a_ok and not a_cross:
        return
    _swap_pair_ends(work, eid_a, eid_b)
    b_ok = _embedding_consistent(work)
    b_cross = _polylines_cross(
        work.sample_separatrix(eid_a, 16), work.sample_separatrix(eid_b, 16))
    if (b_ok, not b_cross) >= (a_ok, not a_cross):
        return
    _swap_pair_ends(work, eid_a, eid_b)


def _stub(work: Skeleton, sing_id: str, angle: float) -> tuple[float, float]:
    """Control point just beyond an attachment, forcing the curve to depart
    along its rotation slot."""
    sing = work.sing(sing_id)
    if sing.position is None:
        r = 1.0 - 0.06
        return (r * math.cos(angle), r * math.sin(angle))
    depth = 2.4 * sing.glyph_radius
    return (sing.position[0] + depth * math.cos(angle),
            sing.position[1] + depth * math.sin(angle))


# ------------------------------------------------------------------- slots

def _sector_of_corner(work: Skeleton, cell: Cell, corner_id: str, prefer_angle=None):
    """Sector (from, to, direction) of the face at this corner; when the
    corner occurs several times in the walk, prefer the occurrence whose
    sector contains ``prefer_angle``."""
    idx = embedding.corner_indices(cell, corner_id)
    if not idx:
        raise InvalidTarget(f"{corner_id} is not a corner of cell {cell.id}")
    sectors = [corner_sector(work, cell, i) for i in idx]
    if prefer_angle is not None and len(sectors) > 1:
        for fr, to, d in sectors:
            span = ((to - fr) * d) % TAU or TAU
            off = ((prefer_angle - fr) * d) % TAU
            if 0.0 < off < span:
                return fr, to, d
    return sectors[0]


def _slot_in_sector(sector, desired: float | None, frac: float = 0.5) -> float:
    """One attachment angle strictly inside a sector, near ``desired`` when
    that direction lies inside it."""
    fr, to, d = sector
    span = ((to - fr) * d) % TAU or TAU
    off = span * frac
    if desired is not None:
        want = ((desired - fr) * d) % TAU
        if 0.0 < want < span:
            off = min(max(want, 0.12 * span), 0.88 * span)
    return norm_angle(fr + d * off)


def _pair_slots_in_sector(sector, desired: float | None = None) -> tuple[float, float]:
    """Two attachment angles strictly inside a sector, bracketing ``desired``
    when that direction lies inside it."""
    fr, to, d = sector
    span = ((to - fr) * d) % TAU or TAU
    base = span / 2
    if desired is not None:
        want = ((desired - fr) * d) % TAU
        if 0.0 < want < span:
            base = min(max(want, 0.15 * span), 0.85 * span)
    half = min(0.14 * span, math.radians(25.0), base - 0.04 * span, 0.96 * span - base)
    half = max(half, 0.02 * span)
    return norm_angle(fr + d * (base - half)), norm_angle(fr + d * (base + half))


def _free_gap_slots(work: Skeleton, sid: str, count: int,
                    desired: float | None = None) -> list[float]:
    """Slots inside a free angular gap of a singularity (used for corners
    that no face walk reaches, e.g. the minimal configuration). A completely
    free vertex clusters the slots around ``desired``."""
    taken = sorted(
        norm_angle(work.end_attachment(eid, end).angle) for eid, end in work.ends_at(sid)
    )
    if not taken:
        if desired is None:
            return [norm_angle(TAU * (i + 1) / (count + 1)) for i in range(count)]
        half = math.radians(25.0)
        if count == 1:
            return [norm_angle(desired)]
        return [norm_angle(desired + half * (2 * i / (count - 1) - 1)) for i in range(count)]
    gaps = [((taken[(i + 1) % len(taken)] - a) % TAU, a) for i, a in enumerate(taken)]
    span, start = max(gaps)
    return [norm_angle(start + span * (i + 1) / (count + 1)) for i in range(count)]


# ------------------------------------------------------------------- moves

def apply_move(skel: Skeleton, req: MoveRequest, assume_valid: bool = False) -> MoveOutcome:
    if not assume_valid and not (skel.is_minimal() or validator.validate(skel).animatable):
        raise InvalidSourceState("moves require a valid (or minimal) skeleton")
    work = skel.copy()
    kind = MoveKind(req.kind)
    cells = embedding.compute_cells(work)

    touched: set[str] = set()
    if req.mode == "manual":
        new_sings = _insert_manual(work, kind, req, cells)
        new_seps: list[str] = []
    elif kind in (MoveKind.FACE_MIN, MoveKind.FACE_MAX):
        new_sings, new_seps = _face_move(work, kind, req, cells)
    elif kind in (MoveKind.EDGE_MIN, MoveKind.EDGE_MAX):
        new_sings, new_seps = _edge_move(work, kind, req, cells)
        touched.add(req.target["separatrix"])
    else:
        new_sings, new_seps = _vertex_move(work, kind, req, cells)
        touched.update(
            eid for eid, _end in work.ends_at(new_sings[0])
        )

    changed = set(new_seps) | touched if assume_valid else None
    report = validator.validate(work, changed_separatrices=changed)
    if req.mode != "manual" and not report.diagnostics and not _embedding_consistent(work):
        raise InvalidTarget(
            "semi-automatic placement could not keep the embedding planar; "
            "adjust the placement or wire manually")
    return MoveOutcome(work, new_sings, new_seps, report.diagnostics)


def _target_cell(skel: Skeleton, cells: list[Cell], target: dict) -> Cell:
    if "cell" in target:
        for c in cells:
            if c.id == target["cell"]:
                return c
        raise InvalidTarget(f"unknown cell {target['cell']!r}")
    if "point" in target:
        return embedding.locate_cell(skel, cells, target["point"])
    raise InvalidTarget("face move target needs 'cell' or 'point'")


def _insert_manual(work: Skeleton, kind: MoveKind, req: MoveRequest, cells):
    """Manual mode: place the two singularities only; the user wires them."""
    ext_kind = SingKind.SINK if kind.adds_sink else SingKind.SOURCE
    if req.placement:
        p_ext = tuple(map(float, req.placement["extremum"]))
        p_sad = tuple(map(float, req.placement["saddle"]))
        glyph = DEFAULT_GLYPH_RADIUS
    else:
        p_ext, p_sad, glyph = _default_positions(work, kind, req, cells)
    existing = [s.value for s in work.singularities.values()]
    if req.values:
        ev, sv = float(req.values["extremum"]), float(req.values["saddle"])
    else:
        sv = unique_value(1.0, existing)
        ev = unique_value(0.5 if kind.adds_sink else 2.0, existing + [sv])
    ext_id = work.add_singularity(ext_kind, p_ext, ev, glyph)
    sad_id = work.add_singularity(SingKind.SADDLE, p_sad, sv, glyph)
    return [ext_id, sad_id]


def _default_positions(work: Skeleton, kind: MoveKind, req: MoveRequest, cells):
    if kind in (MoveKind.FACE_MIN, MoveKind.FACE_MAX):
        cell = _target_cell(work, cells, req.target)
        anchor, clear = embedding.cell_anchor(work, cell)
        glyph = _glyph_for(clear)
        off = np.array([0.3 * clear, 0.0])
        return tuple(anchor + off), tuple(anchor), glyph
    if kind in (MoveKind.EDGE_MIN, MoveKind.EDGE_MAX):
        eid = req.target.get("separatrix")
        poly = work.sample_separatrix(work.sep(eid), 64)
        scale = float(np.hypot(*(poly[-1] - poly[0]))) or 0.1
        return (
            tuple(_arclength_point(poly, 0.5)),
            tuple(_arclength_point(poly, 0.75)),
            _glyph_for(0.12 * scale),
        )
    host = work.sing(req.target.get("singularity", ""))
    mid = 0.5 * (float(req.target.get("sectorFrom", 0.0)) + float(req.target.get("sectorTo", 0.0)))
    if host.position is None:
        rho = 3.0 * DEFAULT_GLYPH_RADIUS
        return (
            tuple((1.0 - 2.2 * rho) * _dir(mid)),
            tuple((1.0 - rho) * _dir(mid)),
            DEFAULT_GLYPH_RADIUS,
        )
    g = host.glyph_radius
    base = np.asarray(host.position)
    return tuple(base + 4.0 * g * _dir(mid)), tuple(base + 2.0 * g * _dir(mid)), g


# -------------------------------------------------------------- face moves

def _face_move(work: Skeleton, kind: MoveKind, req: MoveRequest, cells):
    cell = _target_cell(work, cells, req.target)
    src = cell.source_corner(work)
    snk = cell.sink_corner(work)

    lens_target = src if kind is MoveKind.FACE_MIN else snk
    far_target = snk if kind is MoveKind.FACE_MIN else src
    lens_cls = SepClass.DASHED if kind is MoveKind.FACE_MIN else SepClass.SOLID
    axis_cls = SepClass.SOLID if kind is MoveKind.FACE_MIN else SepClass.DASHED
    ext_kind = SingKind.SINK if kind.adds_sink else SingKind.SOURCE

    lens_pos = _corner_position(work, cell, lens_target)
    far_pos = _corner_position(work, cell, far_target)

    if req.placement:
        p_sad = np.asarray(req.placement["saddle"], float)
        p_ext = np.asarray(req.placement["extremum"], float)
        _, clear = embedding.cell_anchor(work, cell)
        glyph = _glyph_for(max(clear, 1e-3))
    else:
        p_sad, p_ext, clear = _face_positions(work, cell, lens_pos, far_pos)
        glyph = _glyph_for(min(clear, float(np.hypot(*(p_ext - p_sad)))))

    ext_id = work.add_singularity(ext_kind, tuple(p_ext), 0.0, glyph)
    sad_id = work.add_singularity(SingKind.SADDLE, tuple(p_sad), 0.0, glyph)

    a_ext = _angle_of(p_ext - p_sad)
    a_far = _angle_of(far_pos - p_sad)
    gap = min((a_far - a_ext) % TAU, (a_ext - a_far) % TAU)
    if gap < math.radians(10.0):
        a_far = norm_angle(a_ext + math.pi)
        gap = math.pi
    spread = min(math.radians(50.0), 0.55 * gap)

    lens_desired = _angle_at_corner(work, lens_target, p_sad)
    if embedding.corner_indices(cell, lens_target):
        lens_sector = _sector_of_corner(work, cell, lens_target, prefer_angle=lens_desired)
        s1, s2 = _pair_slots_in_sector(lens_sector, lens_desired)
    else:
        s1, s2 = _free_gap_slots(work, lens_target, 2, lens_desired)
    if embedding.corner_indices(cell, far_target):
        far_sector = _sector_of_corner(work, cell, far_target,
                                       prefer_angle=_angle_at_corner(work, far_target, p_sad))
        far_slot = _slot_in_sector(far_sector, _angle_at_corner(work, far_target, p_sad))
    else:
        far_slot = _free_gap_slots(work, far_target, 1,
                                   _angle_at_corner(work, far_target, p_sad))[0]

    bow_a, bow_b = _lens_bows(p_sad, p_ext, glyph)
    e_lens1 = work.add_separatrix(lens_cls, Attachment(sad_id, norm_angle(a_ext - spread)),
                                  Attachment(lens_target, s1),
                                  control_points=[tuple(bow_a), _stub(work, lens_target, s1)])
    e_lens2 = work.add_separatrix(lens_cls, Attachment(sad_id, norm_angle(a_ext + spread)),
                                  Attachment(lens_target, s2),
                                  control_points=[tuple(bow_b), _stub(work, lens_target, s2)])
    e_axis = work.add_separatrix(axis_cls, Attachment(sad_id, a_ext),
                                 Attachment(ext_id, norm_angle(a_ext + math.pi)))
    e_far = work.add_separatrix(axis_cls, Attachment(sad_id, a_far),
                                Attachment(far_target, far_slot),
                                control_points=[_stub(work, sad_id, a_far),
                                                _stub(work, far_target, far_slot)])
    _fix_doubled_pair(work, e_lens1, e_lens2)

    _apply_pair_values(work, req, ext_id, sad_id)
    return [ext_id, sad_id], [e_lens1, e_lens2, e_axis, e_far]


def _corner_position(work: Skeleton, cell: Cell, sid: str) -> np.ndarray:
    sing = work.sing(sid)
    if sing.position is not None:
        return np.asarray(sing.position, float)
    for i in embedding.corner_indices(cell, sid):
        fr, to, d = corner_sector(work, cell, i)
        return _dir(_slot_in_sector((fr, to, d), None))
    return np.array([1.0, 0.0])


def _angle_at_corner(work: Skeleton, corner_id: str, towards) -> float:
    sing = work.sing(corner_id)
    if sing.position is None:
        # rim attachment: the slot itself is the rim angle nearest the point
        return _angle_of(np.asarray(towards, float))
    return _angle_of(np.asarray(towards, float) - np.asarray(sing.position))


def _face_positions(work: Skeleton, cell: Cell, lens_pos, far_pos):
    """Saddle/extremum placement: prefer points on the source-sink axis,
    scored by clearance from the cell boundary times the angular separation
    of the lens and far directions (a cramped angle forces crossings)."""
    poly = embedding.cell_polygon(work, cell)
    candidates = []
    axis = far_pos - lens_pos
    for t in (0.5, 0.42, 0.58, 0.34, 0.66, 0.26, 0.74):
        candidates.append(lens_pos + t * axis)
    anchor, clear0 = embedding.cell_anchor(work, cell)
    candidates.append(anchor)
    best, best_score, best_clear = None, -1.0, 0.0
    for cand in candidates:
        cand = np.asarray(cand, float)
        if not embedding.point_in_polygon(poly, cand):
            continue
        clear = embedding._min_dist_to_polygon(poly, cand)
        d_lens = float(np.hypot(*(lens_pos - cand)))
        d_far = float(np.hypot(*(far_pos - cand)))
        if d_lens == 0.0 or d_far == 0.0:
            continue
        gap = (_angle_of(far_pos - cand) - _angle_of(lens_pos - cand)) % TAU
        gap = min(gap, TAU - gap)
        score = clear * min(1.0, 2.0 * d_lens) * math.sin(gap / 2.0)
        if score > best_score:
            best, best_score, best_clear = cand, score, clear
    if best is None:
        best, best_clear = anchor, clear0
    u = lens_pos - best
    n = float(np.hypot(*u))
    u = u / n if n > 0 else np.array([1.0, 0.0])
    p_sad = best
    p_ext = best + min(0.5 * best_clear, 0.4 * n) * u
    return p_sad, p_ext, best_clear


def _lens_bows(p_sad, p_ext, glyph):
    u = p_ext - p_sad
    n = float(np.hypot(*u))
    u = u / n if n > 0 else np.array([1.0, 0.0])
    perp = np.array([-u[1], u[0]])
    mid = p_ext
    off = max(2.6 * glyph, 0.35 * n)
    return mid - off * perp, mid + off * perp


# -------------------------------------------------------------- edge moves

def _edge_move(work: Skeleton, kind: MoveKind, req: MoveRequest, cells):
    eid = req.target.get("separatrix")
    if eid is None:
        raise InvalidTarget("edge move target needs 'separatrix'")
    sep = work.sep(eid)
    want = SepClass.SOLID if kind is MoveKind.EDGE_MIN else SepClass.DASHED
    if sep.cls is not want:
        raise WrongEdgeClass(f"{kind.value} requires a {want.value} edge")

    far_id = sep.extremum_end.singularity
    far_angle = sep.extremum_end.angle
    left = embedding.face_of_dart(cells, (eid, "saddle"))
    right = embedding.face_of_dart(cells, (eid, "extremum"))
    if kind is MoveKind.EDGE_MIN:
        corner_left = left.source_corner(work)
        corner_right = right.source_corner(work)
        flank_cls = SepClass.DASHED
        ext_kind = SingKind.SINK
    else:
        corner_left = left.sink_corner(work)
        corner_right = right.sink_corner(work)
        flank_cls = SepClass.SOLID
        ext_kind = SingKind.SOURCE

    poly = work.sample_separatrix(sep, 64)
    chord = float(np.hypot(*(poly[-1] - poly[0]))) or 0.1
    glyph = _glyph_for(0.12 * chord)
    p_ext = _arclength_point(poly, 0.5)
    p_sad = _arclength_point(poly, 0.75)
    if req.placement:
        p_ext = np.asarray(req.placement["extremum"], float)
        p_sad = np.asarray(req.placement["saddle"], float)

    a_fwd_ext = _angle_of(_arclength_point(poly, 0.53) - _arclength_point(poly, 0.47))
    a_fwd_sad = _angle_of(_arclength_point(poly, 0.78) - _arclength_point(poly, 0.72))

    # Flank attachment slots, computed from the pre-surgery faces (the edge is
    # never incident to these corners, so their sectors are unaffected).
    same_flank = left.id == right.id and corner_left == corner_right
    if same_flank:
        desired = _angle_at_corner(work, corner_left, p_sad)
        sector = _sector_of_corner(work, left, corner_left, prefer_angle=desired)
        slot_left, slot_right = _pair_slots_in_sector(sector, desired)
    else:
        slot_left = _slot_in_sector(
            _sector_of_corner(work, left, corner_left,
                              prefer_angle=_angle_at_corner(work, corner_left, p_sad)),
            _angle_at_corner(work, corner_left, p_sad))
        slot_right = _slot_in_sector(
            _sector_of_corner(work, right, corner_right,
                              prefer_angle=_angle_at_corner(work, corner_right, p_sad)),
            _angle_at_corner(work, corner_right, p_sad))

    ext_id = work.add_singularity(ext_kind, tuple(p_ext), 0.0, glyph)
    sad_id = work.add_singularity(SingKind.SADDLE, tuple(p_sad), 0.0, glyph)

    # Subdivide: the original edge keeps its first half and ends at the new
    # extremum; the saddle takes over the second half.
    sep.control_points = _subpath_controls(poly, 0.0, 0.5, 3)
    work.retarget_end(eid, "extremum", Attachment(ext_id, norm_angle(a_fwd_ext + math.pi)))

    e_back = work.add_separatrix(want, Attachment(sad_id, norm_angle(a_fwd_sad + math.pi)),
                                 Attachment(ext_id, a_fwd_ext),
                                 control_points=_subpath_controls(poly, 0.75, 0.5, 2))
    e_fwd = work.add_separatrix(want, Attachment(sad_id, a_fwd_sad),
                                Attachment(far_id, far_angle),
                                control_points=_subpath_controls(poly, 0.75, 1.0, 2))
    e_left = work.add_separatrix(flank_cls, Attachment(sad_id, norm_angle(a_fwd_sad + math.pi / 2)),
                                 Attachment(corner_left, slot_left),
                                 control_points=[_stub(work, corner_left, slot_left)])
    e_right = work.add_separatrix(flank_cls, Attachment(sad_id, norm_angle(a_fwd_sad - math.pi / 2)),
                                  Attachment(corner_right, slot_right),
                                  control_points=[_stub(work, corner_right, slot_right)])
    if same_flank:
        _fix_doubled_pair(work, e_left, e_right)

    _apply_pair_values(work, req, ext_id, sad_id)
    return [ext_id, sad_id], [e_back, e_fwd, e_left, e_right]


# ------------------------------------------------------------ vertex moves

def _vertex_move(work: Skeleton, kind: MoveKind, req: MoveRequest, cells):
    host_id = req.target.get("singularity")
    if host_id is None:
        raise InvalidTarget("vertex move target needs 'singularity'")
    host = work.sing(host_id)
    if kind is MoveKind.VERTEX_MIN:
        if not host.kind.is_sinklike:
            raise InvalidTarget("vertex-min requires a sink host")
    elif host.kind is not SingKind.SOURCE:
        raise InvalidTarget("vertex-max requires a source host")

    sec_from = norm_angle(float(req.target.get("sectorFrom", 0.0)))
    sec_to = norm_angle(float(req.target.get("sectorTo", 0.0)))
    boundary_host = host.kind is SingKind.BOUNDARY
    follow = -1 if boundary_host else 1

    ring = embedding.rotation(work, host_id)
    ring_angles = [norm_angle(work.end_attachment(*d).angle) for d in ring]
    if any(a in (sec_from, sec_to) for a in ring_angles):
        raise InvalidTarget("sector boundary coincides with an attachment")

    def inside(a):
        lo, hi = (sec_from, sec_to) if follow == 1 else (sec_to, sec_from)
        return angle_in_ccw_span(a, lo, hi)

    transferred = [(d, a) for d, a in zip(ring, ring_angles) if inside(a)]
    transferred.sort(key=lambda t: ((t[1] - sec_from) * follow) % TAU)

    mid = _sector_mid(sec_from, sec_to, follow)
    if boundary_host:
        rho = 3.0 * DEFAULT_GLYPH_RADIUS
        p_sad = (1.0 - rho) * _dir(mid)
        p_ext = (1.0 - 2.2 * rho) * _dir(mid)
        glyph = DEFAULT_GLYPH_RADIUS
        out_dir = -_dir(mid)
    else:
        glyph = host.glyph_radius
        rho = 4.0 * glyph
        p_sad = np.asarray(host.position) + 0.5 * rho * _dir(mid)
        p_ext = np.asarray(host.position) + rho * _dir(mid)
        out_dir = _dir(mid)
    if req.placement:
        p_ext = np.asarray(req.placement["extremum"], float)
        p_sad = np.asarray(req.placement["saddle"], float)
    a_axis = _angle_of(out_dir)

    flank1 = _flank_target(work, cells, host_id, sec_from, kind)
    flank2 = _flank_target(work, cells, host_id, sec_to, kind)

    ext_kind = SingKind.SINK if kind.adds_sink else SingKind.SOURCE
    near_cls = SepClass.SOLID if kind is MoveKind.VERTEX_MIN else SepClass.DASHED
    far_cls = SepClass.DASHED if kind is MoveKind.VERTEX_MIN else SepClass.SOLID

    ext_id = work.add_singularity(ext_kind, tuple(p_ext), 0.0, glyph)
    sad_id = work.add_singularity(SingKind.SADDLE, tuple(p_sad), 0.0, glyph)

    # Transfer the sector's interior ends to the new extremum, preserving
    # their cyclic order on the outward-facing arc.
    if transferred:
        spread = sector_angles(a_axis - math.pi / 2, a_axis + math.pi / 2, 1, len(transferred))
        for ((eid, end), _a), slot in zip(transferred, spread):
            work.retarget_end(eid, end, Attachment(ext_id, slot))
            work.sep(eid).control_points = []

    if flank1[:2] == flank2[:2] and flank1[2] is not None and flank1[2] == flank2[2]:
        sl1, sl2 = _pair_slots_in_sector(flank1[2], _angle_at_corner(work, flank1[0], p_sad))
    elif flank1[:2] == flank2[:2] and flank1[2] is None:
        sl1, sl2 = _free_gap_slots(work, flank1[0], 2,
                                   _angle_at_corner(work, flank1[0], p_sad))
    else:
        sl1 = _flank_slot(work, flank1, p_sad)
        sl2 = _flank_slot(work, flank2, p_sad)

    e_host = work.add_separatrix(near_cls, Attachment(sad_id, norm_angle(a_axis + math.pi)),
                                 Attachment(host_id, mid))
    e_ext = work.add_separatrix(near_cls, Attachment(sad_id, a_axis),
                                Attachment(ext_id, norm_angle(a_axis + math.pi)))
    # the face flanking sectorFrom sits on the clockwise side of the axis
    e_f1 = work.add_separatrix(far_cls, Attachment(sad_id, norm_angle(a_axis - math.pi / 2)),
                               Attachment(flank1[0], sl1),
                               control_points=[_stub(work, flank1[0], sl1)])
    e_f2 = work.add_separatrix(far_cls, Attachment(sad_id, norm_angle(a_axis + math.pi / 2)),
                               Attachment(flank2[0], sl2),
                               control_points=[_stub(work, flank2[0], sl2)])
    if flank1[0] == flank2[0] and flank1[1] == flank2[1]:
        _fix_doubled_pair(work, e_f1, e_f2)

    _apply_pair_values(work, req, ext_id, sad_id)
    return [ext_id, sad_id], [e_host, e_ext, e_f1, e_f2]


def _sector_mid(a: float, b: float, follow: int) -> float:
    span = ((b - a) * follow) % TAU or TAU
    return norm_angle(a + follow * span / 2)


def _flank_target(work: Skeleton, cells, host_id: str, boundary_angle: float, kind: MoveKind):
    """(corner id, cell id or None, sector or None) of the face flanking the
    sector edge at ``boundary_angle``."""
    want_source = kind is MoveKind.VERTEX_MIN
    hit = _corner_containing(work, cells, host_id, boundary_angle)
    if hit is None:
        # degree-0 host inside the single degenerate face
        cell = cells[0]
        for c in cell.corners:
            k = work.sing(c).kind
            if (want_source and k is SingKind.SOURCE) or (not want_source and k.is_sinklike):
                return (c, None, None)
        raise InvalidTarget("no opposite-kind corner available for the vertex move")
    cell, _i = hit
    corner = cell.source_corner(work) if want_source else cell.sink_corner(work)
    sector = _sector_of_corner(work, cell, corner)
    return (corner, cell.id, sector)


def _flank_slot(work: Skeleton, flank, p_sad) -> float:
    corner, cell_id, sector = flank
    if sector is None:
        return _free_gap_slots(work, corner, 1, _angle_at_corner(work, corner, p_sad))[0]
    return _slot_in_sector(sector, _angle_at_corner(work, corner, p_sad))


def _corner_containing(work: Skeleton, cells, host_id: str, angle: float):
    for cell in cells:
        if not cell.walk:
            continue
        for i in embedding.corner_indices(cell, host_id):
            fr, to, d = corner_sector(work, cell, i)
            span = ((to - fr) * d) % TAU or TAU
            off = ((angle - fr) * d) % TAU
            if 0.0 < off < span or span == TAU:
                return cell, i
    return None


# ------------------------------------------------------------ cancellation

def cancel_pair(skel: Skeleton, extremum_id: str, saddle_id: str) -> MoveOutcome:
    """Remove an adjacent extremum-saddle pair (reverse elementary move).

    The saddle's four separatrices and both singularities disappear; every
    other separatrix that ended at the extremum is re-targeted, as a straight
    chord, to the saddle's opposite same-class neighbor, keeping the original
    cyclic order inside the angular slot freed there.
    """
    if not validator.structurally_sound(skel):
        raise InvalidSourceState("cancellation requires a structurally sound skeleton")
    ext = skel.sing(extremum_id)
    sad = skel.sing(saddle_id)
    if ext.kind is SingKind.BOUNDARY:
        raise BoundaryCancellation("the boundary sink cannot be cancelled")
    if ext.kind is SingKind.SADDLE or sad.kind is not SingKind.SADDLE:
        raise NotAdjacent("cancellation needs one extremum and one saddle")

    cls = SepClass.SOLID if ext.kind is SingKind.SINK else SepClass.DASHED
    same_class = [
        e for e in skel.separatrices.values()
        if e.saddle_end.singularity == saddle_id and e.cls is cls
    ]
    targets = [e.extremum_end.singularity for e in same_class]
    if extremum_id not in targets:
        raise NotAdjacent(f"{extremum_id} and {saddle_id} share no {cls.value} separatrix")
    if all(t == extremum_id for t in targets):
        raise DegenerateCancellation(
            f"both {cls.value} ends of {saddle_id} attach to {extremum_id}"
        )
    other_id = next(t for t in targets if t != extremum_id)

    work = skel.copy()
    removed = sorted(
        (e.id for e in work.separatrices.values() if e.saddle_end.singularity == saddle_id),
        key=_id_key,
    )

    # Survivors at the extremum, in rotation order after the saddle's edge.
    ring = embedding.rotation(work, extremum_id)
    pivot = next(i for i, d in enumerate(ring) if d[0] in removed)
    survivors = [d for d in ring[pivot + 1:] + ring[:pivot] if d[0] not in removed]

    into_other = next(e for e in same_class if e.extremum_end.singularity == other_id)
    gap_angle = norm_angle(into_other.extremum_end.angle)
    other = work.sing(other_id)
    o_direction = -1 if other.kind is SingKind.BOUNDARY else 1
    o_kept_angles = [
        norm_angle(work.end_attachment(eid, end).angle)
        for eid, end in work.ends_at(other_id)
        if eid not in removed
    ]

    for eid in removed:
        work.remove_separatrix(eid)
    work.remove_singularity(saddle_id)

    if survivors:
        slots = _gap_slots(o_kept_angles, gap_angle, o_direction, len(survivors))
        for (eid, end), slot in zip(survivors, slots):
            work.retarget_end(eid, end, Attachment(other_id, slot))
            work.sep(eid).control_points = []
    work.remove_singularity(extremum_id)

    report = validator.validate(work)
    return MoveOutcome(work, [], [], report.diagnostics)


def _gap_slots(kept_angles, gap_angle, direction, count):
    """Fresh angles, in rotation order, inside the angular gap around
    ``gap_angle`` left free by the kept attachments."""
    if not kept_angles:
        return sector_angles(gap_angle, gap_angle, direction, count)
    offs = sorted(((a - gap_angle) * direction) % TAU for a in kept_angles)
    start = norm_angle(gap_angle + direction * (offs[-1] - TAU))
    end = norm_angle(gap_angle + direction * offs[0])
    return sector_angles(start, end, direction, count)
