"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

``morseflow._fast`` (Cython) implements the two loop-heavy kernels: polyline
crossing detection and RK4 streamline tracing. Import of this module selects
the implementation once; ``HAVE_FAST`` reports which one is active and
``implementations()`` exposes both for parity tests and benchmarks.
"""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _fast  # type: ignore[attr-defined]

    HAVE_FAST = True
except ImportError:
    _fast = None
    HAVE_FAST = False

_active = _fast if HAVE_FAST else _kernels_py


def polyline_crossings(samples, offsets, pairs, tol):
    return _active.polyline_crossings(samples, offsets, pairs, tol)


def trace_rk4(vertices, triangles, vectors, seed, sign, step, max_steps, eps_stop,
              slow_speed=-1.0):
    return _active.trace_rk4(vertices, triangles, vectors, seed, sign, step,
                             max_steps, eps_stop, slow_speed)


def implementations():
    impls = {"python": _kernels_py}
    if HAVE_FAST:
        impls["compiled"] = _fast
    return impls
