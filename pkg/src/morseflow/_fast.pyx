# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: polyline crossing detection and RK4 streamline
tracing with triangle-walking point location. Mirrors morseflow._kernels_py.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline double _cross(double ax, double ay, double bx, double by) nogil:
    return ax * by - ay * bx


cdef inline double _pt_seg_d2(double px, double py, double ax, double ay,
                              double bx, double by) nogil:
    cdef double abx = bx - ax
    cdef double aby = by - ay
    cdef double denom = abx * abx + aby * aby
    cdef double t
    if denom == 0.0:
        t = 0.0
    else:
        t = ((px - ax) * abx + (py - ay) * aby) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    cdef double dx = px - (ax + t * abx)
    cdef double dy = py - (ay + t * aby)
    return dx * dx + dy * dy


cdef bint _seg_pair(double p1x, double p1y, double p2x, double p2y,
                    double q1x, double q1y, double q2x, double q2y,
                    double tol) nogil:
    cdef double d1, d2, d3, d4, t2
    # shared exact endpoints never intersect
    if (p1x == q1x and p1y == q1y) or (p1x == q2x and p1y == q2y) \
       or (p2x == q1x and p2y == q1y) or (p2x == q2x and p2y == q2y):
        return False
    d1 = _cross(q2x - q1x, q2y - q1y, p1x - q1x, p1y - q1y)
    d2 = _cross(q2x - q1x, q2y - q1y, p2x - q1x, p2y - q1y)
    d3 = _cross(p2x - p1x, p2y - p1y, q1x - p1x, q1y - p1y)
    d4 = _cross(p2x - p1x, p2y - p1y, q2x - p1x, q2y - p1y)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != d2 and d3 != d4:
        return True
    if tol > 0.0:
        t2 = tol * tol
        if _pt_seg_d2(p1x, p1y, q1x, q1y, q2x, q2y) < t2:
            return True
        if _pt_seg_d2(p2x, p2y, q1x, q1y, q2x, q2y) < t2:
            return True
        if _pt_seg_d2(q1x, q1y, p1x, p1y, p2x, p2y) < t2:
            return True
        if _pt_seg_d2(q2x, q2y, p1x, p1y, p2x, p2y) < t2:
            return True
    return False


def polyline_crossings(samples, offsets, pairs, double tol):
    """Indices into ``pairs`` whose two polylines intersect."""
    s_arr = np.ascontiguousarray(samples, dtype=np.float64)
    off_arr = np.ascontiguousarray(offsets, dtype=np.int64)
    pr_arr = np.ascontiguousarray(pairs, dtype=np.int64).reshape(-1, 2)
    cdef double[:, ::1] s = s_arr
    cdef long long[::1] off = off_arr
    cdef long long[:, ::1] pr = pr_arr
    hits = []
    cdef Py_ssize_t k, i, j, a0, a1, b0, b1
    cdef double pxlo, pxhi, pylo, pyhi
    cdef bint found
    for k in range(pr.shape[0]):
        a0 = <Py_ssize_t>off[pr[k, 0]]
        a1 = <Py_ssize_t>off[pr[k, 0] + 1]
        b0 = <Py_ssize_t>off[pr[k, 1]]
        b1 = <Py_ssize_t>off[pr[k, 1] + 1]
        found = False
        with nogil:
            for i in range(a0, a1 - 1):
                pxlo = s[i, 0] if s[i, 0] < s[i + 1, 0] else s[i + 1, 0]
                pxhi = s[i, 0] if s[i, 0] > s[i + 1, 0] else s[i + 1, 0]
                pylo = s[i, 1] if s[i, 1] < s[i + 1, 1] else s[i + 1, 1]
                pyhi = s[i, 1] if s[i, 1] > s[i + 1, 1] else s[i + 1, 1]
                for j in range(b0, b1 - 1):
                    if s[j, 0] > pxhi + tol and s[j + 1, 0] > pxhi + tol:
                        continue
                    if s[j, 0] < pxlo - tol and s[j + 1, 0] < pxlo - tol:
                        continue
                    if s[j, 1] > pyhi + tol and s[j + 1, 1] > pyhi + tol:
                        continue
                    if s[j, 1] < pylo - tol and s[j + 1, 1] < pylo - tol:
                        continue
                    if _seg_pair(s[i, 0], s[i, 1], s[i + 1, 0], s[i + 1, 1],
                                 s[j, 0], s[j, 1], s[j + 1, 0], s[j + 1, 1], tol):
                        found = True
                        break
                if found:
                    break
        if found:
            hits.append(k)
    return np.asarray(hits, dtype=np.int64)


cdef int _locate(double px, double py,
                 cnp.float64_t[:, :] verts, cnp.int64_t[:, :] tris,
                 cnp.int64_t[:, :] nbrs, int start) nogil:
    """Walk from ``start`` toward the triangle containing (px, py);
    -1 when the point is outside the mesh."""
    cdef int t = start
    cdef int steps = 0
    cdef int a, b, c, worst
    cdef double ax, ay, bx, by, cx, cy, det, l0, l1, l2, m
    cdef int max_walk = <int>tris.shape[0] + 4
    while steps < max_walk:
        steps += 1
        a = <int>tris[t, 0]
        b = <int>tris[t, 1]
        c = <int>tris[t, 2]
        ax = verts[a, 0]; ay = verts[a, 1]
        bx = verts[b, 0]; by = verts[b, 1]
        cx = verts[c, 0]; cy = verts[c, 1]
        det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy)
        if det == 0.0:
            return -1
        l0 = ((by - cy) * (px - cx) + (cx - bx) * (py - cy)) / det
        l1 = ((cy - ay) * (px - cx) + (ax - cx) * (py - cy)) / det
        l2 = 1.0 - l0 - l1
        if l0 >= -1e-12 and l1 >= -1e-12 and l2 >= -1e-12:
            return t
        worst = 0
        m = l0
        if l1 < m:
            worst = 1
            m = l1
        if l2 < m:
            worst = 2
        t = <int>nbrs[t, worst]
        if t < 0:
            return -1
    return -1


cdef bint _interp(double px, double py,
                  cnp.float64_t[:, :] verts, cnp.int64_t[:, :] tris,
                  cnp.float64_t[:, :] vecs, cnp.int64_t[:, :] nbrs,
                  int* tri_hint, double* out) nogil:
    cdef int t = _locate(px, py, verts, tris, nbrs, tri_hint[0])
    cdef int a, b, c
    cdef double ax, ay, bx, by, cx, cy, det, l0, l1, l2
    if t < 0:
        return False
    tri_hint[0] = t
    a = <int>tris[t, 0]
    b = <int>tris[t, 1]
    c = <int>tris[t, 2]
    ax = verts[a, 0]; ay = verts[a, 1]
    bx = verts[b, 0]; by = verts[b, 1]
    cx = verts[c, 0]; cy = verts[c, 1]
    det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy)
    l0 = ((by - cy) * (px - cx) + (cx - bx) * (py - cy)) / det
    l1 = ((cy - ay) * (px - cx) + (ax - cx) * (py - cy)) / det
    l2 = 1.0 - l0 - l1
    out[0] = l0 * vecs[a, 0] + l1 * vecs[b, 0] + l2 * vecs[c, 0]
    out[1] = l0 * vecs[a, 1] + l1 * vecs[b, 1] + l2 * vecs[c, 1]
    return True


def _triangle_neighbors(tris_in):
    """neighbors[t, i] = triangle across the edge opposite corner i (-1 rim)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2] tris = np.ascontiguousarray(tris_in, dtype=np.int64)
    cdef Py_ssize_t m = tris.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] nbrs = np.full((m, 3), -1, dtype=np.int64)
    edge_map = {}
    cdef Py_ssize_t t, i
    cdef long u, v
    for t in range(m):
        for i in range(3):
            u = tris[t, (i + 1) % 3]
            v = tris[t, (i + 2) % 3]
            key = (u, v) if u < v else (v, u)
            if key in edge_map:
                ot, oi = edge_map.pop(key)
                nbrs[t, i] = ot
                nbrs[ot, oi] = t
            else:
                edge_map[key] = (t, i)
    return nbrs


def trace_rk4(vertices, triangles, vectors, seed, double sign, double step,
              long max_steps, double eps_stop, double slow_speed=-1.0):
    """RK4 streamline on the normalized field; see _kernels_py.trace_rk4."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] verts = np.ascontiguousarray(vertices, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] tris = np.ascontiguousarray(triangles, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] vecs = np.ascontiguousarray(vectors, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] nbrs = _triangle_neighbors(tris)

    cdef cnp.float64_t[:, :] vview = verts
    cdef cnp.int64_t[:, :] tview = tris
    cdef cnp.float64_t[:, :] fview = vecs
    cdef cnp.int64_t[:, :] nview = nbrs

    cdef double px = seed[0]
    cdef double py = seed[1]
    out = [(px, py)]
    cdef int hint
    cdef double v[2]
    cdef double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y, n, h, scale
    cdef double slow = slow_speed if slow_speed > 0.0 else 20.0 * eps_stop
    cdef int reason = 2
    cdef long it
    # trapped detection: tiny net displacement over a trailing window means
    # the trace converged to (or orbits) an equilibrium
    cdef int window = 50
    cdef double hist_x[50]
    cdef double hist_y[50]
    cdef double dxw, dyw

    hint = _brute_locate(px, py, vview, tview)
    if hint < 0:
        return np.asarray(out), 1
    for it in range(max_steps):
        if not _interp(px, py, vview, tview, fview, nview, &hint, v):
            reason = 1
            break
        n = sqrt(v[0] * v[0] + v[1] * v[1])
        if n < eps_stop:
            reason = 0
            break
        if it >= window:
            dxw = px - hist_x[it % window]
            dyw = py - hist_y[it % window]
            if sqrt(dxw * dxw + dyw * dyw) < 0.5 * step:
                reason = 0
                break
        hist_x[it % window] = px
        hist_y[it % window] = py
        # shrink the step near zeros (floored so weak-flow regions still get
        # crossed); trapped detection handles the final approach
        scale = n / slow
        if scale > 1.0:
            scale = 1.0
        elif scale < 0.1:
            scale = 0.1
        h = step * scale
        k1x = sign * v[0] / n; k1y = sign * v[1] / n
        if not _interp(px + 0.5 * h * k1x, py + 0.5 * h * k1y,
                       vview, tview, fview, nview, &hint, v):
            px += h * k1x; py += h * k1y
            out.append((px, py)); reason = 1; break
        n = sqrt(v[0] * v[0] + v[1] * v[1])
        if n < eps_stop:
            n = eps_stop
        k2x = sign * v[0] / n; k2y = sign * v[1] / n
        if not _interp(px + 0.5 * h * k2x, py + 0.5 * h * k2y,
                       vview, tview, fview, nview, &hint, v):
            px += h * k2x; py += h * k2y
            out.append((px, py)); reason = 1; break
        n = sqrt(v[0] * v[0] + v[1] * v[1])
        if n < eps_stop:
            n = eps_stop
        k3x = sign * v[0] / n; k3y = sign * v[1] / n
        if not _interp(px + h * k3x, py + h * k3y,
                       vview, tview, fview, nview, &hint, v):
            px += h * k3x; py += h * k3y
            out.append((px, py)); reason = 1; break
        n = sqrt(v[0] * v[0] + v[1] * v[1])
        if n < eps_stop:
            n = eps_stop
        k4x = sign * v[0] / n; k4y = sign * v[1] / n
        px += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        py += (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        out.append((px, py))
    return np.asarray(out), reason


cdef int _brute_locate(double px, double py,
                       cnp.float64_t[:, :] verts, cnp.int64_t[:, :] tris) nogil:
    cdef Py_ssize_t t
    cdef int a, b, c
    cdef double ax, ay, bx, by, cx, cy, det, l0, l1, l2
    for t in range(tris.shape[0]):
        a = <int>tris[t, 0]; b = <int>tris[t, 1]; c = <int>tris[t, 2]
        ax = verts[a, 0]; ay = verts[a, 1]
        bx = verts[b, 0]; by = verts[b, 1]
        cx = verts[c, 0]; cy = verts[c, 1]
        det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy)
        if det == 0.0:
            continue
        l0 = ((by - cy) * (px - cx) + (cx - bx) * (py - cy)) / det
        l1 = ((cy - ay) * (px - cx) + (ax - cx) * (py - cy)) / det
        l2 = 1.0 - l0 - l1
        if l0 >= -1e-12 and l1 >= -1e-12 and l2 >= -1e-12:
            return <int>t
    return -1
