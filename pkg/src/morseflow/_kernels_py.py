"""Pure numpy/matplotlib implementations of the hot kernels.

Used when the compiled ``morseflow._fast`` extension is unavailable; both
implementations expose the same signatures and are compared by the kernel
parity tests and the benchmark script.
"""

from __future__ import annotations

import numpy as np


def segments_intersect_batch(p1, p2, q1, q2, tol):
    """Vectorized segment-pair test: proper crossing, or closer than tol.

    Pairs that share an exact endpoint never intersect. All inputs (n, 2).
    Returns a boolean array of length n.
    """
    p1 = np.asarray(p1, float)
    p2 = np.asarray(p2, float)
    q1 = np.asarray(q1, float)
    q2 = np.asarray(q2, float)

    shared = (
        np.all(p1 == q1, axis=1)
        | np.all(p1 == q2, axis=1)
        | np.all(p2 == q1, axis=1)
        | np.all(p2 == q2, axis=1)
    )

    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    proper = ((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0)) & (d1 != d2) & (d3 != d4)

    near = np.zeros(len(p1), dtype=bool)
    if tol > 0:
        dist = np.minimum(
            np.minimum(_pt_seg_dist(p1, q1, q2), _pt_seg_dist(p2, q1, q2)),
            np.minimum(_pt_seg_dist(q1, p1, p2), _pt_seg_dist(q2, p1, p2)),
        )
        near = dist < tol

    return (proper | near) & ~shared


def _cross(a, b):
    return a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]


def _pt_seg_dist(p, a, b):
    ab = b - a
    ap = p - a
    denom = (ab * ab).sum(axis=1)
    safe = np.where(denom == 0, 1.0, denom)
    t = np.clip((ap * ab).sum(axis=1) / safe, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(*(p - proj).T)


def polyline_crossings(samples, offsets, pairs, tol):
    """Check candidate polyline pairs for intersections.

    ``samples``: (N, 2) concatenated polyline vertices; ``offsets``: (C+1,)
    start indices per curve; ``pairs``: (K, 2) curve-index pairs to test.
    Returns the indices into ``pairs`` that intersect.
    """
    samples = np.asarray(samples, float)
    offsets = np.asarray(offsets, np.int64)
    hits = []
    for k, (ci, cj) in enumerate(pairs):
        a0, a1 = offsets[ci], offsets[ci + 1]
        b0, b1 = offsets[cj], offsets[cj + 1]
        pa = samples[a0 : a1 - 1]
        pb = samples[a0 + 1 : a1]
        qa = samples[b0 : b1 - 1]
        qb = samples[b0 + 1 : b1]
        na, nb = len(pa), len(qa)
        ii, jj = np.meshgrid(np.arange(na), np.arange(nb), indexing="ij")
        ii = ii.ravel()
        jj = jj.ravel()
        # segment-bbox prefilter
        plo = np.minimum(pa[ii], pb[ii]) - tol
        phi = np.maximum(pa[ii], pb[ii]) + tol
        qlo = np.minimum(qa[jj], qb[jj])
        qhi = np.maximum(qa[jj], qb[jj])
        near = np.all(qlo <= phi, axis=1) & np.all(qhi >= plo, axis=1)
        if not near.any():
            continue
        ii, jj = ii[near], jj[near]
        if segments_intersect_batch(pa[ii], pb[ii], qa[jj], qb[jj], tol).any():
            hits.append(k)
    return np.asarray(hits, dtype=np.int64)


class _TriField:
    """Linear barycentric interpolator over an arbitrary triangle list."""

    def __init__(self, vertices, triangles, vectors):
        import matplotlib.tri as mtri

        self.tri = mtri.Triangulation(vertices[:, 0], vertices[:, 1], triangles)
        self.finder = self.tri.get_trifinder()
        self.ix = mtri.LinearTriInterpolator(self.tri, vectors[:, 0], trifinder=self.finder)
        self.iy = mtri.LinearTriInterpolator(self.tri, vectors[:, 1], trifinder=self.finder)

    def __call__(self, x, y):
        vx = self.ix(x, y)
        vy = self.iy(x, y)
        if np.ma.is_masked(vx) or np.ma.is_masked(vy):
            return None
        return float(vx), float(vy)


def trace_rk4(vertices, triangles, vectors, seed, sign, step, max_steps, eps_stop,
              slow_speed=-1.0):
    """RK4 streamline on the normalized field. Returns (polyline, reason).

    reason: 0 = stagnated (|V| < eps_stop), 1 = left the mesh/disk,
    2 = step budget exhausted.
    """
    field = _TriField(np.asarray(vertices, float), np.asarray(triangles),
                      np.asarray(vectors, float))

    def direction(p):
        v = field(p[0], p[1])
        if v is None:
            return None
        n = math_hypot(v[0], v[1])
        if n < eps_stop:
            return (0.0, 0.0, n)
        return (v[0] / n, v[1] / n, n)

    pts = [tuple(map(float, seed))]
    p = np.array(seed, float)
    slow = slow_speed if slow_speed > 0 else 20.0 * eps_stop
    window = 50
    history = []
    reason = 2
    for it in range(int(max_steps)):
        k1 = direction(p)
        if k1 is None:
            reason = 1
            break
        if k1[2] < eps_stop:
            reason = 0
            break
        if it >= window:
            prev = history[it % window]
            if float(np.hypot(p[0] - prev[0], p[1] - prev[1])) < 0.5 * step:
                reason = 0
                break
            history[it % window] = (p[0], p[1])
        else:
            history.append((p[0], p[1]))
        # shrink the step near zeros (floored so weak-flow regions still get
        # crossed); trapped detection handles the final approach
        h = step * min(1.0, max(k1[2] / slow, 0.1))
        k1v = np.array(k1[:2]) * sign
        k2 = direction(p + 0.5 * h * k1v)
        if k2 is None:
            reason = 1
            p = p + h * k1v
            pts.append(tuple(p))
            break
        k2v = np.array(k2[:2]) * sign
        k3 = direction(p + 0.5 * h * k2v)
        if k3 is None:
            reason = 1
            p = p + h * k2v
            pts.append(tuple(p))
            break
        k3v = np.array(k3[:2]) * sign
        k4 = direction(p + h * k3v)
        if k4 is None:
            reason = 1
            p = p + h * k3v
            pts.append(tuple(p))
            break
        k4v = np.array(k4[:2]) * sign
        p = p + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        pts.append(tuple(p))
    return np.asarray(pts), reason


def math_hypot(x, y):
    return float(np.hypot(x, y))
