"""Skeleton data model: singularities, separatrices, and the document schema.

The sphere is modeled as the closed unit disk whose boundary circle is the
single global sink ("boundary" singularity). All coordinates live in this
chart. Separatrix endpoints attach to the circular glyph of a singularity at
a stored angle; for the boundary the "glyph" is the unit circle itself.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import spline
from .errors import (
    AngleConflict,
    IndexOutOfRange,
    InvalidTarget,
    KindMismatch,
    ParseError,
    SaddleFull,
    UnknownId,
)

TAU = 2.0 * math.pi
DEFAULT_GLYPH_RADIUS = 0.05
DEFAULT_CURVE_SAMPLES = 32
SCHEMA_VERSION = 1


def norm_angle(a: float) -> float:
    return float(a) % TAU


class SingKind(str, Enum):
    SOURCE = "source"
    SINK = "sink"
    SADDLE = "saddle"
    BOUNDARY = "boundary"

    @property
    def is_extremum(self) -> bool:
        return self is not SingKind.SADDLE

    @property
    def is_sinklike(self) -> bool:
        return self in (SingKind.SINK, SingKind.BOUNDARY)


class SepClass(str, Enum):
    DASHED = "dashed"  # saddle-source
    SOLID = "solid"  # saddle-sink (or saddle-boundary)

    def matches(self, kind: SingKind) -> bool:
        if self is SepClass.DASHED:
            return kind is SingKind.SOURCE
        return kind.is_sinklike


@dataclass
class Singularity:
    id: str
    kind: SingKind
    position: tuple[float, float] | None  # None for the boundary
    value: float
    glyph_radius: float = DEFAULT_GLYPH_RADIUS


@dataclass
class Attachment:
    singularity: str
    angle: float  # radians in [0, 2*pi), position on the glyph circle

    def normalized(self) -> "Attachment":
        return Attachment(self.singularity, norm_angle(self.angle))


@dataclass
class Separatrix:
    id: str
    cls: SepClass
    saddle_end: Attachment
    extremum_end: Attachment
    control_points: list[tuple[float, float]] = field(default_factory=list)


class Skeleton:
    """Embedded planar multigraph of singularities and spline separatrices.

    Mutating methods edit in place; callers that need persistence semantics
    take snapshots via :meth:`copy`.
    """

    def __init__(self):
        self.singularities: dict[str, Singularity] = {}
        self.separatrices: dict[str, Separatrix] = {}
        self._next_sing = 0
        self._next_sep = 0

    # ------------------------------------------------------------------ ids
    def fresh_sing_id(self) -> str:
        sid = f"n{self._next_sing}"
        self._next_sing += 1
        return sid

    def fresh_sep_id(self) -> str:
        sid = f"e{self._next_sep}"
        self._next_sep += 1
        return sid

    def _sync_counters(self):
        def bump(ids, prefix):
            best = -1
            for i in ids:
                if i.startswith(prefix):
                    try:
                        best = max(best, int(i[len(prefix):]))
                    except ValueError:
                        pass
            return best + 1

        self._next_sing = bump(self.singularities, "n")
        self._next_sep = bump(self.separatrices, "e")

    # -------------------------------------------------------------- lookups
    def sing(self, sid: str) -> Singularity:
        try:
            return self.singularities[sid]
        except KeyError:
            raise UnknownId(f"unknown singularity {sid!r}") from None

    def sep(self, eid: str) -> Separatrix:
        try:
            return self.separatrices[eid]
        except KeyError:
            raise UnknownId(f"unknown separatrix {eid!r}") from None

    @property
    def boundary(self) -> Singularity:
        for s in self.singularities.values():
            if s.kind is SingKind.BOUNDARY:
                return s
        raise InvalidTarget("skeleton has no boundary singularity")

    def by_kind(self, kind: SingKind) -> list[Singularity]:
        return [s for s in self.singularities.values() if s.kind is kind]

    def counts(self) -> dict[str, int]:
        c = {"source": 0, "sink": 0, "saddle": 0}
        for s in self.singularities.values():
            if s.kind is SingKind.SOURCE:
                c["source"] += 1
            elif s.kind is SingKind.SADDLE:
                c["saddle"] += 1
            else:
                c["sink"] += 1  # boundary counts as one sink
        return c

    def ends_at(self, sid: str) -> list[tuple[str, str]]:
        """All separatrix ends incident to ``sid`` as (sep id, end name)."""
        out = []
        for e in self.separatrices.values():
            if e.saddle_end.singularity == sid:
                out.append((e.id, "saddle"))
            if e.extremum_end.singularity == sid:
                out.append((e.id, "extremum"))
        return out

    def degree(self, sid: str) -> int:
        return len(self.ends_at(sid))

    def end_attachment(self, eid: str, end: str) -> Attachment:
        e = self.sep(eid)
        return e.saddle_end if end == "saddle" else e.extremum_end

    def attachment_point(self, att: Attachment) -> tuple[float, float]:
        s = self.sing(att.singularity)
        if s.kind is SingKind.BOUNDARY:
            return (math.cos(att.angle), math.sin(att.angle))
        x, y = s.position
        r = s.glyph_radius
        return (x + r * math.cos(att.angle), y + r * math.sin(att.angle))

    def is_minimal(self) -> bool:
        """The sanctioned exception: one source plus the boundary, no edges."""
        if self.separatrices:
            return False
        kinds = sorted(s.kind for s in self.singularities.values())
        return kinds == sorted([SingKind.BOUNDARY, SingKind.SOURCE])

    # ------------------------------------------------------------ mutations
    def add_singularity(self, kind, position, value, glyph_radius=DEFAULT_GLYPH_RADIUS, sid=None) -> str:
        sid = sid or self.fresh_sing_id()
        if sid in self.singularities:
            raise ParseError(f"duplicate singularity id {sid!r}")
        kind = SingKind(kind)
        if kind is SingKind.BOUNDARY:
            if any(s.kind is SingKind.BOUNDARY for s in self.singularities.values()):
                raise InvalidTarget("skeleton already has a boundary singularity")
            position = None
            glyph_radius = 1.0
        else:
            position = (float(position[0]), float(position[1]))
        self.singularities[sid] = Singularity(sid, kind, position, float(value), float(glyph_radius))
        return sid

    def _check_angle_free(self, sid: str, angle: float, ignore=()):
        for eid, end in self.ends_at(sid):
            if (eid, end) in ignore:
                continue
            if self.end_attachment(eid, end).angle == angle:
                raise AngleConflict(
                    f"two ends share the angle {angle!r} on singularity {sid!r}"
                )

    def add_separatrix(self, cls, saddle_end: Attachment, extremum_end: Attachment,
                       control_points=(), eid=None, enforce=True) -> str:
        cls = SepClass(cls)
        saddle_end = saddle_end.normalized()
        extremum_end = extremum_end.normalized()
        if enforce:
            sad = self.sing(saddle_end.singularity)
            ext = self.sing(extremum_end.singularity)
            if sad.kind is not SingKind.SADDLE:
                raise KindMismatch(f"{sad.id!r} is not a saddle")
            if self.degree(sad.id) >= 4:
                raise SaddleFull(f"saddle {sad.id!r} already has 4 ends")
            if not cls.matches(ext.kind):
                raise KindMismatch(
                    f"{cls.value} separatrix cannot attach to a {ext.kind.value}"
                )
        self._check_angle_free(saddle_end.singularity, saddle_end.angle)
        self._check_angle_free(extremum_end.singularity, extremum_end.angle)
        eid = eid or self.fresh_sep_id()
        if eid in self.separatrices:
            raise ParseError(f"duplicate separatrix id {eid!r}")
        self.separatrices[eid] = Separatrix(
            eid, cls, saddle_end, extremum_end, [tuple(map(float, p)) for p in control_points]
        )
        return eid

    def remove_separatrix(self, eid: str):
        self.sep(eid)
        del self.separatrices[eid]

    def remove_singularity(self, sid: str):
        self.sing(sid)
        if self.ends_at(sid):
            raise InvalidTarget(f"singularity {sid!r} still has incident separatrices")
        del self.singularities[sid]

    def retarget_end(self, eid: str, end: str, att: Attachment):
        """Move one end of a separatrix to a new attachment."""
        e = self.sep(eid)
        att = att.normalized()
        self._check_angle_free(att.singularity, att.angle, ignore=[(eid, end)])
        if end == "saddle":
            e.saddle_end = att
        else:
            e.extremum_end = att

    # ------------------------------------------------------------- geometry
    def sample_separatrix(self, sep: Separatrix | str, n: int = DEFAULT_CURVE_SAMPLES) -> np.ndarray:
        """Polyline of ``n`` points from the saddle end to the extremum end."""
        if isinstance(sep, str):
            sep = self.sep(sep)
        pts = (self.attachment_point(sep.saddle_end),
               *sep.control_points,
               self.attachment_point(sep.extremum_end))
        return _cached_samples(pts, n)

    def all_values(self) -> dict[str, float]:
        return {sid: s.value for sid, s in self.singularities.items()}

    # ---------------------------------------------------------------- edits
    def drag_singularity(self, sid: str, p) -> None:
        s = self.sing(sid)
        if s.kind is SingKind.BOUNDARY:
            raise InvalidTarget("the boundary cannot be dragged")
        s.position = (float(p[0]), float(p[1]))

    def move_control_point(self, eid: str, index: int, p) -> None:
        e = self.sep(eid)
        if not 0 <= index < len(e.control_points):
            raise IndexOutOfRange(f"control point {index} of {eid!r}")
        e.control_points[index] = (float(p[0]), float(p[1]))

    def add_control_point(self, eid: str, index: int, p) -> None:
        e = self.sep(eid)
        if not 0 <= index <= len(e.control_points):
            raise IndexOutOfRange(f"insert position {index} of {eid!r}")
        e.control_points.insert(index, (float(p[0]), float(p[1])))

    def remove_control_point(self, eid: str, index: int) -> None:
        e = self.sep(eid)
        if not 0 <= index < len(e.control_points):
            raise IndexOutOfRange(f"control point {index} of {eid!r}")
        del e.control_points[index]

    def connect(self, saddle_id: str, saddle_angle: float, extremum_id: str,
                extremum_angle: float, cls) -> str:
        """Add a straight-chord separatrix between a saddle and an extremum."""
        cls = SepClass(cls)
        sad = self.sing(saddle_id)
        ext = self.sing(extremum_id)
        if sad.kind is not SingKind.SADDLE:
            raise KindMismatch(f"{saddle_id!r} is not a saddle")
        if self.degree(saddle_id) >= 4:
            raise SaddleFull(f"saddle {saddle_id!r} already has 4 ends")
        if not cls.matches(ext.kind):
            raise KindMismatch(f"{cls.value} separatrix cannot attach to a {ext.kind.value}")
        return self.add_separatrix(
            cls,
            Attachment(saddle_id, saddle_angle),
            Attachment(extremum_id, extremum_angle),
        )

    def disconnect(self, eid: str) -> None:
        self.remove_separatrix(eid)

    # ------------------------------------------------------------ documents
    def copy(self) -> "Skeleton":
        out = Skeleton()
        out._next_sing = self._next_sing
        out._next_sep = self._next_sep
        out.singularities = {
            sid: Singularity(s.id, s.kind, s.position, s.value, s.glyph_radius)
            for sid, s in self.singularities.items()
        }
        out.separatrices = {
            eid: Separatrix(e.id, e.cls,
                            Attachment(e.saddle_end.singularity, e.saddle_end.angle),
                            Attachment(e.extremum_end.singularity, e.extremum_end.angle),
                            list(e.control_points))
            for eid, e in self.separatrices.items()
        }
        return out

    def to_document(self) -> dict:
        sings = []
        for sid in sorted(self.singularities, key=_id_key):
            s = self.singularities[sid]
            x, y = (None, None) if s.position is None else s.position
            sings.append({
                "id": s.id,
                "kind": s.kind.value,
                "x": x,
                "y": y,
                "value": s.value,
                "glyphRadius": s.glyph_radius,
            })
        seps = []
        for eid in sorted(self.separatrices, key=_id_key):
            e = self.separatrices[eid]
            seps.append({
                "id": e.id,
                "class": e.cls.value,
                "saddle": {"id": e.saddle_end.singularity, "angle": e.saddle_end.angle},
                "extremum": {"id": e.extremum_end.singularity, "angle": e.extremum_end.angle},
                "controlPoints": [[p[0], p[1]] for p in e.control_points],
            })
        return {"version": SCHEMA_VERSION, "singularities": sings, "separatrices": seps}

    @classmethod
    def from_document(cls, doc: dict) -> "Skeleton":
        if not isinstance(doc, dict):
            raise ParseError("document must be a JSON object")
        skel = cls()
        try:
            for s in doc["singularities"]:
                kind = SingKind(s["kind"])
                pos = None if kind is SingKind.BOUNDARY else (s["x"], s["y"])
                skel.add_singularity(kind, pos, s["value"],
                                     s.get("glyphRadius", DEFAULT_GLYPH_RADIUS), sid=s["id"])
            for e in doc["separatrices"]:
                saddle = Attachment(e["saddle"]["id"], e["saddle"]["angle"])
                extremum = Attachment(e["extremum"]["id"], e["extremum"]["angle"])
                for att in (saddle, extremum):
                    if att.singularity not in skel.singularities:
                        raise ParseError(f"separatrix {e['id']!r} references unknown {att.singularity!r}")
                skel.add_separatrix(SepClass(e["class"]), saddle, extremum,
                                    e.get("controlPoints", ()), eid=e["id"], enforce=False)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed document: {exc}") from exc
        skel._sync_counters()
        return skel


from functools import lru_cache


@lru_cache(maxsize=8192)
def _cached_samples(pts: tuple, n: int) -> np.ndarray:
    out = spline.sample_cardinal(pts, n)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32768)
def _id_key(i: str):
    head = i.rstrip("0123456789")
    tail = i[len(head):]
    return (head, int(tail) if tail else -1)


sep_sort_key = _id_key


# ------------------------------------------------------------- constructors

def new_minimal() -> Skeleton:
    """Single source plus the boundary sink: the simplest field on a sphere."""
    skel = Skeleton()
    skel.add_singularity(SingKind.BOUNDARY, None, 0.0)
    skel.add_singularity(SingKind.SOURCE, (0.0, 0.0), 1.0)
    return skel


def new_default() -> Skeleton:
    """Two sources, a saddle between them, boundary sink: the simplest
    Morse-Smale field on a sphere. Values boundary=0, saddle=1, sources=2,3."""
    skel = Skeleton()
    bnd = skel.add_singularity(SingKind.BOUNDARY, None, 0.0)
    left = skel.add_singularity(SingKind.SOURCE, (-0.5, 0.0), 2.0)
    right = skel.add_singularity(SingKind.SOURCE, (0.5, 0.0), 3.0)
    sad = skel.add_singularity(SingKind.SADDLE, (0.0, 0.0), 1.0)
    skel.add_separatrix(SepClass.DASHED, Attachment(sad, math.pi), Attachment(left, 0.0))
    skel.add_separatrix(SepClass.DASHED, Attachment(sad, 0.0), Attachment(right, math.pi))
    skel.add_separatrix(SepClass.SOLID, Attachment(sad, math.pi / 2), Attachment(bnd, math.pi / 2))
    skel.add_separatrix(SepClass.SOLID, Attachment(sad, 3 * math.pi / 2), Attachment(bnd, 3 * math.pi / 2))
    return skel
