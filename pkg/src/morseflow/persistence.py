"""Extended-persistence barcodes computed natively on the skeleton graph.

Two union-find sweeps replace an external persistence package: the skeleton
already is the Morse-Smale graph, so the merge structure of sublevel sets is
visible directly. Sinks merge through saddles along solid separatrices in
increasing value order (dim-0 pairs); sources merge through the remaining
saddles along dashed separatrices in decreasing order (dim-1 pairs, reported
in sublevel coordinates as [saddle value, source value]); the global-minimum
sink and global-maximum source form the single essential bar.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import moves, validator
from .errors import (
    DuplicateValue,
    DuplicateValues,
    InvalidSkeleton,
    NotEligible,
    UnknownId,
    ValueOrderViolation,
)
from .model import SepClass, SingKind, Skeleton, _id_key

ESSENTIAL = "essential"


@dataclass
class Bar:
    dim: object  # 0, 1 or "essential"
    birth_sing: str
    death_sing: str
    birth: float
    death: float

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    def to_json(self):
        return {
            "dim": self.dim,
            "birth": self.birth,
            "death": self.death,
            "birthSing": self.birth_sing,
            "deathSing": self.death_sing,
        }


@dataclass
class Barcode:
    bars: list[Bar]

    def essential(self) -> Bar:
        return next(b for b in self.bars if b.dim == ESSENTIAL)

    def regular(self) -> list[Bar]:
        return [b for b in self.bars if b.dim != ESSENTIAL]

    def pairings(self) -> set[tuple]:
        return {(b.dim, b.birth_sing, b.death_sing) for b in self.bars}

    def to_json(self):
        return {"bars": [b.to_json() for b in self.bars]}


class _UnionFind:
    """Union-find with path compression; every component tracks the
    singularity realizing its extremal value."""

    def __init__(self, items, better):
        self.parent = {i: i for i in items}
        self.rep = {i: i for i in items}
        self.better = better  # better(a, b): does value a beat value b

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b, values):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return None
        keep_a = self.better(values[self.rep[ra]], values[self.rep[rb]])
        winner, loser = (ra, rb) if keep_a else (rb, ra)
        self.parent[loser] = winner
        dying_rep = self.rep[loser]
        return dying_rep


def _saddle_extrema(skel: Skeleton, saddle_id: str, cls: SepClass):
    out = []
    for e in skel.separatrices.values():
        if e.saddle_end.singularity == saddle_id and e.cls is cls:
            out.append(e.extremum_end.singularity)
    return out


def compute_barcode(skel: Skeleton) -> Barcode:
    """Extended-persistence barcode of a structurally sound skeleton."""
    if not validator.structurally_sound(skel):
        raise InvalidSkeleton("barcode requires a structurally sound skeleton")
    values = skel.all_values()
    if len(set(values.values())) != len(values):
        raise DuplicateValues("singularity values must be pairwise distinct")

    sinks = [s.id for s in skel.singularities.values() if s.kind.is_sinklike]
    sources = [s.id for s in skel.singularities.values() if s.kind is SingKind.SOURCE]
    saddles = sorted(
        (s.id for s in skel.singularities.values() if s.kind is SingKind.SADDLE),
        key=lambda i: values[i],
    )

    bars: list[Bar] = []

    # Sublevel sweep: sinks are components, saddles merge them.
    uf0 = _UnionFind(sinks, better=lambda a, b: a < b)
    unpaired = []
    for sid in saddles:
        ends = _saddle_extrema(skel, sid, SepClass.SOLID)
        if len(ends) != 2:
            raise InvalidSkeleton(f"saddle {sid} lacks two solid ends")
        dying = uf0.union(ends[0], ends[1], values)
        if dying is None:
            unpaired.append(sid)
        else:
            bars.append(Bar(0, dying, sid, values[dying], values[sid]))

    # Superlevel sweep over the remaining saddles, decreasing value.
    uf1 = _UnionFind(sources, better=lambda a, b: a > b)
    stuck = []
    for sid in reversed(unpaired):
        ends = _saddle_extrema(skel, sid, SepClass.DASHED)
        if len(ends) != 2:
            raise InvalidSkeleton(f"saddle {sid} lacks two dashed ends")
        dying = uf1.union(ends[0], ends[1], values)
        if dying is None:
            stuck.append(sid)
        else:
            bars.append(Bar(1, sid, dying, values[sid], values[dying]))

    if stuck:
        raise InvalidSkeleton(f"saddles {stuck} paired in neither sweep")

    min_sink = min(sinks, key=lambda i: values[i])
    max_source = max(sources, key=lambda i: values[i])
    bars.append(Bar(ESSENTIAL, min_sink, max_source, values[min_sink], values[max_source]))

    bars.sort(key=lambda b: (-b.persistence, _id_key(b.birth_sing)))
    return Barcode(bars)


def eligible_pairs(skel: Skeleton, barcode: Barcode) -> list[tuple[str, str]]:
    """Cancellable (extremum, saddle) pairs: non-essential bars whose two
    singularities are joined by a separatrix right now and satisfy the
    cancellation preconditions. Ordered by increasing persistence."""
    out = []
    for bar in sorted(barcode.regular(), key=lambda b: b.persistence):
        if bar.dim == 0:
            extremum, saddle, cls = bar.birth_sing, bar.death_sing, SepClass.SOLID
        else:
            extremum, saddle, cls = bar.death_sing, bar.birth_sing, SepClass.DASHED
        if skel.singularities[extremum].kind is SingKind.BOUNDARY:
            continue
        ends = _saddle_extrema(skel, saddle, cls)
        if extremum not in ends:
            continue
        if all(t == extremum for t in ends):
            continue
        out.append((extremum, saddle))
    return out


def simplify(skel: Skeleton, pair: tuple[str, str]) -> tuple[Skeleton, Barcode]:
    """Cancel one eligible persistence pair and recompute the barcode."""
    barcode = compute_barcode(skel)
    if tuple(pair) not in {tuple(p) for p in eligible_pairs(skel, barcode)}:
        raise NotEligible(f"pair {pair} is not eligible for simplification")
    outcome = moves.cancel_pair(skel, pair[0], pair[1])
    return outcome.skeleton, compute_barcode(outcome.skeleton)


def set_value(skel: Skeleton, sing_id: str, v: float) -> Skeleton:
    """Update one function value when the saddle-ordering constraint keeps
    holding everywhere and no value collides."""
    sing = skel.sing(sing_id)
    v = float(v)
    for other in skel.singularities.values():
        if other.id != sing_id and other.value == v:
            raise DuplicateValue(f"value {v} already used by {other.id}")

    work = skel.copy()
    work.sing(sing_id).value = v

    affected = set()
    if sing.kind is SingKind.SADDLE:
        affected.add(sing_id)
    else:
        for eid, end in work.ends_at(sing_id):
            if end == "extremum":
                affected.add(work.separatrices[eid].saddle_end.singularity)
    for sid in sorted(affected, key=_id_key):
        sad = work.singularities.get(sid)
        if sad is None or sad.kind is not SingKind.SADDLE:
            continue
        lo, hi = moves._saddle_neighbor_values(work, sid)
        if lo and max(lo) >= sad.value:
            raise ValueOrderViolation(
                f"saddle {sid} must stay above its adjacent minima"
            )
        if hi and min(hi) <= sad.value:
            raise ValueOrderViolation(
                f"saddle {sid} must stay below its adjacent maxima"
            )

    # Guard the essential bar: the global-minimum sink must not rise above
    # the global-maximum source (only reachable in saddle-free skeletons).
    sinks = [s.value for s in work.singularities.values() if s.kind.is_sinklike]
    sources = [s.value for s in work.singularities.values() if s.kind is SingKind.SOURCE]
    if sinks and sources and min(sinks) > max(sources):
        raise ValueOrderViolation("the global minimum must stay below the global maximum")
    return work
