"""Rotation system, face tracing and cell decomposition.

The skeleton is an embedded multigraph on the sphere. Around interior
singularities the cyclic order of separatrix ends is their attachment angle,
counterclockwise. The boundary circle is a single vertex of the sphere seen
"from the other side", so its rotation runs clockwise in boundary angle; with
that flip every traced face orbit corresponds to one cell and Euler's formula
V - E + F = 2 holds for connected skeletons.

A dart is one side of a separatrix, written (sep id, end) where ``end`` names
the endpoint the dart leaves from. The face of a dart is the cell on its left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSkeleton, InvalidTarget
from .model import TAU, SingKind, Skeleton, norm_angle, _id_key

Dart = tuple[str, str]  # (separatrix id, "saddle" | "extremum")


def twin(dart: Dart) -> Dart:
    eid, end = dart
    return (eid, "extremum" if end == "saddle" else "saddle")


def rotation(skel: Skeleton, sid: str) -> list[Dart]:
    """Incident ends of ``sid`` in canonical (sphere-CCW) cyclic order."""
    sing = skel.sing(sid)
    ends = []
    for eid, end in skel.ends_at(sid):
        ang = norm_angle(skel.end_attachment(eid, end).angle)
        ends.append((ang, _id_key(eid), end, (eid, end)))
    reverse = sing.kind is SingKind.BOUNDARY
    ends.sort(key=lambda t: (t[0], t[1], t[2]), reverse=reverse)
    return [t[3] for t in ends]


def rotation_system(skel: Skeleton) -> dict[str, list[Dart]]:
    raw: dict[str, list] = {sid: [] for sid in skel.singularities}
    for sep in skel.separatrices.values():
        for end, att in (("saddle", sep.saddle_end), ("extremum", sep.extremum_end)):
            raw[att.singularity].append(
                (norm_angle(att.angle), _id_key(sep.id), end, (sep.id, end)))
    out: dict[str, list[Dart]] = {}
    for sid, ends in raw.items():
        reverse = skel.singularities[sid].kind is SingKind.BOUNDARY
        ends.sort(key=lambda t: (t[0], t[1], t[2]), reverse=reverse)
        out[sid] = [t[3] for t in ends]
    return out


def dart_origin(skel: Skeleton, dart: Dart) -> str:
    return skel.end_attachment(*dart).singularity


def dart_target(skel: Skeleton, dart: Dart) -> str:
    return skel.end_attachment(*twin(dart)).singularity


@dataclass
class Cell:
    """One face of the embedding. ``walk`` lists the darts whose left side is
    this cell; ``corners`` the singularities they leave from."""

    id: str
    walk: list[Dart]
    corners: list[str]
    degenerate: bool = False

    @property
    def edge_ids(self) -> list[str]:
        return [eid for eid, _ in self.walk]

    def distinct_edges(self) -> set[str]:
        return set(self.edge_ids)

    def corner_of_kind(self, skel: Skeleton, kinds) -> str:
        hits = {c for c in self.corners if skel.sing(c).kind in kinds}
        if len(hits) != 1:
            raise InvalidTarget(
                f"cell {self.id} has {len(hits)} corners of kind {kinds}"
            )
        return hits.pop()

    def source_corner(self, skel: Skeleton) -> str:
        return self.corner_of_kind(skel, (SingKind.SOURCE,))

    def sink_corner(self, skel: Skeleton) -> str:
        return self.corner_of_kind(skel, (SingKind.SINK, SingKind.BOUNDARY))


def _check_structure(skel: Skeleton):
    for e in skel.separatrices.values():
        for att in (e.saddle_end, e.extremum_end):
            if att.singularity not in skel.singularities:
                raise InvalidSkeleton(
                    f"separatrix {e.id!r} references missing {att.singularity!r}"
                )


def next_dart(rot: dict[str, list[Dart]], skel: Skeleton, dart: Dart) -> Dart:
    """Successor of ``dart`` along its left face: the rotation predecessor of
    its twin at the target vertex."""
    arr = twin(dart)
    v = dart_origin(skel, arr)
    ring = rot[v]
    i = ring.index(arr)
    return ring[i - 1]


def compute_cells(skel: Skeleton) -> list[Cell]:
    """Faces of the embedding by boundary tracing on the rotation system.

    The minimal configuration (and any skeleton without separatrices) has a
    single degenerate whole-disk cell.
    """
    _check_structure(skel)
    if not skel.separatrices:
        corners = sorted(skel.singularities, key=_id_key)
        return [Cell("c0", [], corners, degenerate=True)]

    rot = rotation_system(skel)
    pred: dict[Dart, Dart] = {}
    for ring in rot.values():
        for i, d in enumerate(ring):
            pred[d] = ring[i - 1]
    seen: set[Dart] = set()
    cells: list[Cell] = []
    darts = [
        (eid, end)
        for eid in sorted(skel.separatrices, key=_id_key)
        for end in ("saddle", "extremum")
    ]
    for start in darts:
        if start in seen:
            continue
        walk = []
        d = start
        while True:
            walk.append(d)
            seen.add(d)
            d = pred[twin(d)]
            if d == start:
                break
        corners = [dart_origin(skel, w) for w in walk]
        cells.append(Cell(f"c{len(cells)}", walk, corners))

    # Isolated singularities are not part of any face walk; they sit inside
    # some cell and the whole configuration is degenerate for tracing.
    used = {c for cell in cells for c in cell.corners}
    for sid in skel.singularities:
        if sid not in used:
            for cell in cells:
                cell.degenerate = True
    return cells


def euler_characteristic(skel: Skeleton) -> int:
    v = len(skel.singularities)
    e = len(skel.separatrices)
    f = len(compute_cells(skel))
    return v - e + f


# ----------------------------------------------------------------- geometry

def cell_polygon(skel: Skeleton, cell: Cell, samples: int = 24) -> np.ndarray:
    """Closed polygon tracing the cell boundary (boundary-vertex corners are
    expanded into arcs of the unit circle)."""
    if not cell.walk:
        t = np.linspace(0.0, TAU, 64, endpoint=False)
        return np.column_stack([np.cos(t), np.sin(t)])

    pts: list[np.ndarray] = []
    n = len(cell.walk)
    for i, dart in enumerate(cell.walk):
        eid, end = dart
        poly = skel.sample_separatrix(eid, samples)
        if end == "extremum":
            poly = poly[::-1]
        pts.append(poly)
        # Arc insertion when the walk passes through the boundary vertex.
        tgt = dart_target(skel, dart)
        if skel.sing(tgt).kind is SingKind.BOUNDARY:
            a_in = norm_angle(skel.end_attachment(*twin(dart)).angle)
            nxt = cell.walk[(i + 1) % n]
            a_out = norm_angle(skel.end_attachment(*nxt).angle)
            span = (a_out - a_in) % TAU
            if span == 0.0:
                span = TAU
            t = np.linspace(0.0, span, max(4, int(span / 0.2)))[1:-1]
            ang = a_in + t
            pts.append(np.column_stack([np.cos(ang), np.sin(ang)]))
    return np.vstack(pts)


def point_in_polygon(poly: np.ndarray, p) -> bool:
    x, y = float(p[0]), float(p[1])
    px = poly[:, 0]
    py = poly[:, 1]
    qx = np.roll(px, -1)
    qy = np.roll(py, -1)
    crosses = (py > y) != (qy > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = px + (y - py) * (qx - px) / (qy - py)
    hits = crosses & (xs > x)
    return bool(np.count_nonzero(hits) % 2)


def polygon_centroid(poly: np.ndarray) -> np.ndarray:
    x = poly[:, 0]
    y = poly[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    if abs(area) < 1e-12:
        return poly.mean(axis=0)
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return np.array([cx, cy])


def _min_dist_to_polygon(poly: np.ndarray, p: np.ndarray) -> float:
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    ap = p[None, :] - a
    denom = (ab * ab).sum(axis=1)
    denom[denom == 0] = 1.0
    t = np.clip((ap * ab).sum(axis=1) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    d = np.hypot(*(p[None, :] - proj).T)
    return float(d.min())


def cell_anchor(skel: Skeleton, cell: Cell, samples: int = 24) -> tuple[np.ndarray, float]:
    """Representative interior point of a cell and its clearance (distance to
    the cell boundary)."""
    poly = cell_polygon(skel, cell, samples)
    candidates = [polygon_centroid(poly)]
    m = len(poly)
    for frac in (0.25, 0.4):
        for k in range(0, m, max(1, m // 6)):
            a = poly[k]
            b = poly[(k + m // 2) % m]
            candidates.append(a + frac * (b - a))
    best, best_clear = None, -1.0
    for cand in candidates:
        if not point_in_polygon(poly, cand):
            continue
        clear = _min_dist_to_polygon(poly, cand)
        if clear > best_clear:
            best, best_clear = cand, clear
    if best is None:
        best = poly.mean(axis=0)
        best_clear = max(_min_dist_to_polygon(poly, best), 1e-3)
    return best, best_clear


def locate_cell(skel: Skeleton, cells: list[Cell], p) -> Cell:
    """Cell containing the point ``p`` (hit-testing for UI/scripts)."""
    for cell in cells:
        if not cell.walk:
            return cell
        if point_in_polygon(cell_polygon(skel, cell), p):
            return cell
    raise InvalidTarget(f"no cell contains point {tuple(p)!r}")


# ------------------------------------------------------------------ sectors

def angle_in_ccw_span(a: float, start: float, end: float) -> bool:
    """True if angle ``a`` lies strictly inside the CCW arc start -> end."""
    span = (end - start) % TAU
    off = (a - start) % TAU
    return 0.0 < off < span


def corner_sector(skel: Skeleton, cell: Cell, corner_index: int) -> tuple[float, float, int]:
    """Angular sector occupied by the cell at the given corner of its walk.

    Returns (from, to, direction) in attachment-angle space: ``direction`` is
    +1 when the sector runs CCW from ``from`` to ``to`` (interior vertices)
    and -1 when it runs CW (the boundary vertex, whose rotation is flipped).
    Fresh attachment angles for this cell at this corner must be placed inside
    the sector.
    """
    out_dart = cell.walk[corner_index]
    in_dart = cell.walk[corner_index - 1]
    v = cell.corners[corner_index]
    a_out = norm_angle(skel.end_attachment(*out_dart).angle)
    a_in = norm_angle(skel.end_attachment(*twin(in_dart)).angle)
    direction = -1 if skel.sing(v).kind is SingKind.BOUNDARY else 1
    # Face lies between the arriving end and the departing end; with CCW
    # rotation the gap runs CCW from the departing to the arriving end.
    if direction == 1:
        return a_out, a_in, 1
    return a_out, a_in, -1


def sector_angles(start: float, end: float, direction: int, count: int) -> list[float]:
    """``count`` fresh angles strictly inside a sector, evenly spaced, in
    sector order."""
    span = ((end - start) * direction) % TAU
    if span == 0.0:
        span = TAU
    return [norm_angle(start + direction * span * (i + 1) / (count + 1)) for i in range(count)]


def corner_indices(cell: Cell, sid: str) -> list[int]:
    """Positions of ``sid`` in the cell walk (empty for degenerate cells,
    whose corner list is not index-aligned with any walk)."""
    if not cell.walk:
        return []
    return [i for i, c in enumerate(cell.corners) if c == sid]


def face_of_dart(cells: list[Cell], dart: Dart) -> Cell:
    for cell in cells:
        if dart in cell.walk:
            return cell
    raise InvalidSkeleton(f"dart {dart!r} not on any traced face")
