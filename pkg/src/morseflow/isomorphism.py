"""Isomorphism of embedded skeletons (kinds and rotation respected).

A canonical certificate is built by traversing the rotation system from every
possible starting dart and keeping the lexicographically smallest encoding;
two skeletons are isomorphic as embedded multigraphs with singularity kinds
and separatrix classes iff their certificates match. Function values and
geometry are ignored.
"""

from __future__ import annotations

from . import embedding
from .model import SingKind, Skeleton, _id_key


def _certificate_from(skel: Skeleton, rot, start) -> tuple:
    order: dict[str, int] = {}
    entry: dict[str, object] = {}

    def visit(v, entry_dart):
        order[v] = len(order)
        entry[v] = entry_dart

    v0 = embedding.dart_origin(skel, start)
    visit(v0, start)
    queue = [v0]
    qi = 0
    code = []
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        ring = rot[v]
        if not ring:
            code.append((skel.sing(v).kind.value,))
            continue
        i0 = ring.index(entry[v])
        local = []
        for k in range(len(ring)):
            dart = ring[(i0 + k) % len(ring)]
            w = embedding.dart_target(skel, dart)
            if w not in order:
                visit(w, embedding.twin(dart))
                queue.append(w)
            local.append((skel.separatrices[dart[0]].cls.value, order[w]))
        code.append((skel.sing(v).kind.value, tuple(local)))
    return tuple(code)


def certificate(skel: Skeleton) -> tuple:
    """Canonical form of the embedded skeleton."""
    kinds = tuple(sorted(s.kind.value for s in skel.singularities.values()))
    if not skel.separatrices:
        return (kinds, ())
    rot = embedding.rotation_system(skel)
    darts = [
        (eid, end)
        for eid in sorted(skel.separatrices, key=_id_key)
        for end in ("saddle", "extremum")
    ]
    best = None
    for start in darts:
        code = _certificate_from(skel, rot, start)
        if best is None or code < best:
            best = code
    # isolated singularities (unreachable by darts) enter via the kind list
    return (kinds, best)


def skeletons_isomorphic(a: Skeleton, b: Skeleton) -> bool:
    return certificate(a) == certificate(b)


def graphs_isomorphic(a: Skeleton, b: Skeleton) -> bool:
    """Abstract multigraph isomorphism (embedding ignored): the
    graph-equivalence notion for comparing Morse-Smale graphs."""
    import networkx as nx
    from networkx.algorithms import isomorphism as nxiso

    def to_nx(skel: Skeleton):
        g = nx.MultiGraph()
        for s in skel.singularities.values():
            kind = "sink" if s.kind is SingKind.BOUNDARY else s.kind.value
            g.add_node(s.id, kind=kind)
        for e in skel.separatrices.values():
            g.add_edge(e.saddle_end.singularity, e.extremum_end.singularity,
                       cls=e.cls.value)
        return g

    matcher = nxiso.MultiGraphMatcher(
        to_nx(a), to_nx(b),
        node_match=nxiso.categorical_node_match("kind", None),
        edge_match=nxiso.categorical_multiedge_match("cls", None),
    )
    return matcher.is_isomorphic()
