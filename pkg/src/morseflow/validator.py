"""Configuration debugger: structured diagnostics that gate flow animation.

Seven checks run in a fixed order; a skeleton is animatable exactly when the
report is empty. ``validate`` accepts arbitrarily broken skeletons (loaded
files included) and never raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .model import SingKind, Skeleton, _id_key

DEFAULT_CROSSING_TOL = 1e-6
DEFAULT_CROSSING_SAMPLES = 32

_CHECK_ORDER = {
    "NonAlternatingSaddle": 1,
    "DanglingEndpoint": 2,
    "CrossingSeparatrices": 3,
    "IsolatedSingularity": 4,
    "SaddleSaddleEdge": 5,
    "OutOfBounds": 6,
    "ValueOrderViolation": 7,
}


@dataclass
class Diagnostic:
    code: str
    entities: list[str]
    message: str
    severity: str = "error"

    def to_json(self):
        return {"code": self.code, "entities": list(self.entities), "message": self.message}


@dataclass
class ValidationReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def animatable(self) -> bool:
        return not self.diagnostics

    def codes(self) -> set[str]:
        return {d.code for d in self.diagnostics}

    def to_json(self):
        return {
            "diagnostics": [d.to_json() for d in self.diagnostics],
            "animatable": self.animatable,
        }


def segments_intersect(p1, p2, q1, q2, tol: float = 0.0) -> bool:
    """Orientation-based segment intersection with a near-touch tolerance.

    Segments sharing an exact endpoint do not count as intersecting.
    """
    from ._kernels_py import segments_intersect_batch

    out = segments_intersect_batch(
        np.asarray([p1], float),
        np.asarray([p2], float),
        np.asarray([q1], float),
        np.asarray([q2], float),
        tol,
    )
    return bool(out[0])


def _resolvable(skel: Skeleton, sep) -> bool:
    return (
        sep.saddle_end.singularity in skel.singularities
        and sep.extremum_end.singularity in skel.singularities
    )


def _crossing_pairs(skel: Skeleton, tol: float, samples: int, changed=None):
    eids = [e for e in sorted(skel.separatrices, key=_id_key)
            if _resolvable(skel, skel.separatrices[e])]
    if len(eids) < 2:
        return []
    polys = [skel.sample_separatrix(e, samples) for e in eids]
    flat = np.vstack(polys)
    offsets = np.zeros(len(polys) + 1, dtype=np.int64)
    np.cumsum([len(p) for p in polys], out=offsets[1:])
    lo = np.array([p.min(axis=0) for p in polys]) - tol
    hi = np.array([p.max(axis=0) for p in polys]) + tol
    dirty = None if changed is None else np.array(
        [e in changed for e in eids], dtype=bool)
    pairs = []
    n = len(eids)
    for i in range(n):
        overlap = (
            (lo[i + 1 :, 0] <= hi[i, 0]) & (hi[i + 1 :, 0] >= lo[i, 0])
            & (lo[i + 1 :, 1] <= hi[i, 1]) & (hi[i + 1 :, 1] >= lo[i, 1])
        )
        if dirty is not None and not dirty[i]:
            overlap &= dirty[i + 1 :]
        pairs.extend((i, i + 1 + int(j)) for j in np.nonzero(overlap)[0])
    if not pairs:
        return []
    pair_arr = np.asarray(pairs, dtype=np.int64)
    hits = kernels.polyline_crossings(flat, offsets, pair_arr, tol)
    return [(eids[pair_arr[k, 0]], eids[pair_arr[k, 1]]) for k in hits]


def validate(skel: Skeleton, crossing_tol: float = DEFAULT_CROSSING_TOL,
             samples: int = DEFAULT_CROSSING_SAMPLES,
             changed_separatrices=None) -> ValidationReport:
    """Full validation; when ``changed_separatrices`` is given the crossing
    check is restricted to pairs touching those curves (sound when the rest
    of the skeleton was crossing-free before the change)."""
    diags: list[Diagnostic] = []
    minimal = skel.is_minimal()

    incidence: dict[str, list[tuple[str, str]]] = {sid: [] for sid in skel.singularities}
    for e in skel.separatrices.values():
        if e.saddle_end.singularity in incidence:
            incidence[e.saddle_end.singularity].append((e.id, "saddle"))
        if e.extremum_end.singularity in incidence:
            incidence[e.extremum_end.singularity].append((e.id, "extremum"))

    # 1. saddle degree four with alternating solid/dashed ends
    for sid in sorted(skel.singularities, key=_id_key):
        sing = skel.singularities[sid]
        if sing.kind is not SingKind.SADDLE:
            continue
        ring = []
        for eid, end in incidence[sid]:
            att = skel.end_attachment(eid, end)
            ring.append((att.angle % (2 * math.pi), _id_key(eid), skel.separatrices[eid].cls))
        ring.sort(key=lambda t: (t[0], t[1]))
        classes = [c for _, _, c in ring]
        ok = len(classes) == 4 and all(
            classes[i] is not classes[(i + 1) % 4] for i in range(4)
        )
        if not ok:
            diags.append(Diagnostic(
                "NonAlternatingSaddle", [sid],
                f"saddle {sid} needs 4 separatrix ends alternating solid/dashed "
                f"(has {len(classes)}: {', '.join(c.value for c in classes) or 'none'})",
            ))

    # 2. ends attached to a singularity/boundary of the right kind
    for eid in sorted(skel.separatrices, key=_id_key):
        sep = skel.separatrices[eid]
        problems = []
        sad = skel.singularities.get(sep.saddle_end.singularity)
        ext = skel.singularities.get(sep.extremum_end.singularity)
        if sad is None or sad.kind is not SingKind.SADDLE:
            problems.append("saddle end not attached to a saddle")
        if ext is None:
            problems.append("extremum end not attached")
        elif ext.kind is not SingKind.SADDLE and not sep.cls.matches(ext.kind):
            problems.append(
                f"{sep.cls.value} end attached to a {ext.kind.value}"
            )
        if problems:
            diags.append(Diagnostic("DanglingEndpoint", [eid], f"separatrix {eid}: " + "; ".join(problems)))

    # 3. crossings between sampled separatrices
    for a, b in sorted(_crossing_pairs(skel, crossing_tol, samples,
                                       changed_separatrices)):
        diags.append(Diagnostic(
            "CrossingSeparatrices", [a, b], f"separatrices {a} and {b} cross"
        ))

    # 4. isolated singularities (minimal configuration excepted)
    if not minimal:
        for sid in sorted(skel.singularities, key=_id_key):
            if not incidence[sid]:
                diags.append(Diagnostic(
                    "IsolatedSingularity", [sid],
                    f"singularity {sid} has no separatrix attachment",
                ))

    # 5. saddle-saddle separatrices
    for eid in sorted(skel.separatrices, key=_id_key):
        sep = skel.separatrices[eid]
        ext = skel.singularities.get(sep.extremum_end.singularity)
        if ext is not None and ext.kind is SingKind.SADDLE:
            ents = sorted({sep.saddle_end.singularity, ext.id}, key=_id_key)
            diags.append(Diagnostic(
                "SaddleSaddleEdge", [eid, *ents],
                f"separatrix {eid} connects two saddles",
            ))

    # 6. singularities inside the disk
    for sid in sorted(skel.singularities, key=_id_key):
        sing = skel.singularities[sid]
        if sing.position is None:
            continue
        if math.hypot(*sing.position) >= 1.0 - sing.glyph_radius:
            diags.append(Diagnostic(
                "OutOfBounds", [sid],
                f"singularity {sid} lies outside the boundary",
            ))

    # 7. saddle values strictly between adjacent extrema
    for sid in sorted(skel.singularities, key=_id_key):
        sing = skel.singularities[sid]
        if sing.kind is not SingKind.SADDLE:
            continue
        bad = []
        for eid, end in incidence[sid]:
            sep = skel.separatrices[eid]
            if end != "saddle":
                continue
            ext = skel.singularities.get(sep.extremum_end.singularity)
            if ext is None or ext.kind is SingKind.SADDLE:
                continue
            if ext.kind.is_sinklike and not ext.value < sing.value:
                bad.append(ext.id)
            if ext.kind is SingKind.SOURCE and not sing.value < ext.value:
                bad.append(ext.id)
        if bad:
            diags.append(Diagnostic(
                "ValueOrderViolation", [sid, *sorted(set(bad), key=_id_key)],
                f"saddle {sid} value must lie strictly between its adjacent "
                f"minima and maxima",
            ))

    diags.sort(key=lambda d: (_CHECK_ORDER[d.code], [_id_key(e) for e in d.entities]))
    return ValidationReport(diags)


def structurally_sound(skel: Skeleton) -> bool:
    """Graph-level soundness only (geometry ignored): used as the gate for
    combinatorial computations such as the barcode."""
    rep = validate(skel, crossing_tol=0.0, samples=2)
    ignorable = {"CrossingSeparatrices", "OutOfBounds"}
    return all(d.code in ignorable for d in rep.diagnostics)
