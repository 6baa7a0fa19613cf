"""Cardinal spline (tension 0, i.e. Catmull-Rom) evaluation for separatrices."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=256)
def _weights(m: int, n: int) -> np.ndarray:
    """Sampling is linear in the control polygon: n x m weight matrix."""
    cols = []
    for i in range(m):
        basis = np.zeros((m, 2))
        basis[i, 0] = 1.0
        cols.append(_sample_direct(basis, n)[:, 0])
    w = np.column_stack(cols)
    w.setflags(write=False)
    return w


def sample_cardinal(points, n: int) -> np.ndarray:
    """Sample the tension-0 cardinal spline through ``points`` at ``n`` uniform
    parameter values over [0, 1].

    ``points`` is a sequence of (x, y) pairs; the curve interpolates all of
    them, with knots uniformly spaced in parameter. Endpoints are exact.
    With two input points the curve is the straight segment between them.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two points")
    if n < 2:
        raise ValueError("need n >= 2 samples")
    return _weights(pts.shape[0], n) @ pts


def _sample_direct(pts, n: int) -> np.ndarray:
    m = pts.shape[0]
    # Endpoint tangents use duplicated end points (one-sided differences).
    padded = np.vstack([pts[0], pts, pts[-1]])
    tangents = 0.5 * (padded[2:] - padded[:-2])  # one per knot

    t = np.linspace(0.0, 1.0, n)
    u = t * (m - 1)
    seg = np.minimum(u.astype(int), m - 2)
    s = u - seg  # local parameter in [0, 1]

    p0 = pts[seg]
    p1 = pts[seg + 1]
    m0 = tangents[seg]
    m1 = tangents[seg + 1]

    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = s3 - 2 * s2 + s
    h01 = -2 * s3 + 3 * s2
    h11 = s3 - s2
    out = (
        h00[:, None] * p0
        + h10[:, None] * m0
        + h01[:, None] * p1
        + h11[:, None] * m1
    )
    # Knots are exact by construction; pin the ends to avoid fp fuzz.
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out
