"""Shared fixture builders and the random move generator used by the
acceptance suite."""

from __future__ import annotations

import math
import random

from morseflow import embedding, model, moves
from morseflow.model import TAU, SepClass, SingKind, norm_angle


def random_move_request(rng: random.Random, skel, cells) -> moves.MoveRequest | None:
    kind = rng.choice(list(moves.MoveKind))
    if kind in (moves.MoveKind.FACE_MIN, moves.MoveKind.FACE_MAX):
        cell = rng.choice(cells)
        return moves.MoveRequest(kind=kind, target={"cell": cell.id})
    if kind in (moves.MoveKind.EDGE_MIN, moves.MoveKind.EDGE_MAX):
        want = SepClass.SOLID if kind is moves.MoveKind.EDGE_MIN else SepClass.DASHED
        pool = [e.id for e in skel.separatrices.values() if e.cls is want]
        if not pool:
            return None
        return moves.MoveRequest(kind=kind, target={"separatrix": rng.choice(sorted(pool))})
    # vertex move: host of matching kind, sector that spans zero or one end
    if kind is moves.MoveKind.VERTEX_MIN:
        hosts = [s.id for s in skel.singularities.values() if s.kind.is_sinklike]
    else:
        hosts = [s.id for s in skel.singularities.values() if s.kind is SingKind.SOURCE]
    if not hosts:
        return None
    host = rng.choice(sorted(hosts))
    sector = _random_sector(rng, skel, host)
    if sector is None:
        return None
    return moves.MoveRequest(kind=kind, target={
        "singularity": host, "sectorFrom": sector[0], "sectorTo": sector[1]})


def _random_sector(rng, skel, host_id):
    """Sector in the host's rotation direction spanning zero ends (common)
    or exactly one (transfer move)."""
    host = skel.sing(host_id)
    follow = -1 if host.kind is SingKind.BOUNDARY else 1
    angles = sorted(
        norm_angle(skel.end_attachment(eid, end).angle)
        for eid, end in skel.ends_at(host_id)
    )
    if follow == -1:
        angles = angles[::-1]
    n = len(angles)
    if n == 0:
        a = rng.uniform(0, TAU)
        return (a, norm_angle(a + follow * rng.uniform(2.0, 5.0)))
    spans = []
    for i, a in enumerate(angles):
        b = angles[(i + 1) % n]
        gap = ((b - a) * follow) % TAU or TAU
        spans.append((a, gap))
    if n == 1 or rng.random() < 0.7:
        # inside one gap
        a, gap = rng.choice(spans)
        if gap < math.radians(8):
            return None
        lo = 0.15 * gap
        hi = 0.85 * gap
        f1 = rng.uniform(lo, hi * 0.6)
        f2 = rng.uniform(f1 + 0.2 * (hi - lo), hi)
        return (norm_angle(a + follow * f1), norm_angle(a + follow * f2))
    # span exactly one end
    i = rng.randrange(n)
    a_prev, gap_prev = spans[i - 1]
    a_next, gap_next = spans[i]
    if gap_prev < math.radians(8) or gap_next < math.radians(8):
        return None
    start = norm_angle(a_prev + follow * rng.uniform(0.3, 0.8) * gap_prev)
    end = norm_angle(a_next + follow * rng.uniform(0.2, 0.7) * gap_next)
    return (start, end)


def random_valid_sequence(seed: int, length: int, base=None, max_tries: int = 14):
    """Apply ``length`` random semi-automatic moves, rejecting candidates
    whose outcome carries diagnostics. Returns (skeleton, applied requests)."""
    rng = random.Random(seed)
    skel = base.copy() if base is not None else model.new_default()
    applied = []
    for _ in range(length):
        cells = embedding.compute_cells(skel)
        ok = False
        for _try in range(max_tries):
            req = random_move_request(rng, skel, cells)
            if req is None:
                continue
            try:
                out = moves.apply_move(skel, req, assume_valid=True)
            except model.ParseError:
                continue
            except Exception as exc:
                from morseflow.errors import MorseflowError
                if isinstance(exc, MorseflowError):
                    continue
                raise
            if out.valid:
                skel = out.skeleton
                applied.append((req, out))
                ok = True
                break
        if not ok:
            break
    return skel, applied
