"""Per-triangle distance update shared by Fast Marching and PTP.

A vertex ``v0`` with triangle neighbours ``v1``, ``v2`` at tentative distances
``t1``, ``t2`` gets the arrival time of a planar wavefront that passes ``v1``
at ``t1`` and ``v2`` at ``t2``.  With ``X = [x1 x2]`` (edge vectors from
``v0``), ``Q = (X^T X)^-1``, the candidate ``p`` is the larger root of

    (1^T Q 1) p^2 - 2 (1^T Q t) p + t^T Q t - 1 = 0.

It is accepted only if ``p >= max(t)`` and ``Q (t - p 1) < 0`` componentwise
(the front enters the triangle through the edge ``v1 v2``); otherwise the
edge-based value ``min(t1 + |x1|, t2 + |x2|)`` is used.  All quantities are
expressed through the Gram entries, multiplied through by ``det(X^T X)``.
"""

from __future__ import annotations

import math

import numba
import numpy as np

# relative singularity threshold on det(X^T X) / (|x1|^2 |x2|^2)
DEGENERATE_TOL = 1e-12

# which neighbour the winning candidate takes its label from
FROM_V1, FROM_V2 = 1, 2


@numba.njit(nogil=True)
def solve_gram(g11, g12, g22, t1, t2):
    """Return ``(p, side)`` for Gram entries ``g = X^T X`` and distances ``t1``, ``t2``.

    ``side`` is ``FROM_V1``/``FROM_V2``: the neighbour whose label the result
    inherits (the smaller-``t`` one for a planar solution), or 0 when both
    inputs are infinite.
    """
    inf = math.inf
    l1 = math.sqrt(g11)
    l2 = math.sqrt(g22)
    f1 = t1 + l1
    f2 = t2 + l2
    if f2 < f1:
        best = f2
        side = FROM_V2
    else:
        best = f1
        side = FROM_V1
    if best == inf:
        return inf, 0
    if t1 == inf or t2 == inf:
        return best, side
    det = g11 * g22 - g12 * g12
    if det <= DEGENERATE_TOL * g11 * g22:
        return best, side
    a = g11 + g22 - 2.0 * g12
    b = (g22 - g12) * t1 + (g11 - g12) * t2
    c = g22 * t1 * t1 - 2.0 * g12 * t1 * t2 + g11 * t2 * t2 - det
    disc = b * b - a * c
    if disc < 0.0:
        return best, side
    p = (b + math.sqrt(disc)) / a
    if p < t1 or p < t2:
        return best, side
    # det * Q (t - p 1)
    n1 = g22 * (t1 - p) - g12 * (t2 - p)
    n2 = g11 * (t2 - p) - g12 * (t1 - p)
    if n1 < 0.0 and n2 < 0.0 and p < best:
        return p, FROM_V1 if t1 <= t2 else FROM_V2
    return best, side


@numba.njit(nogil=True)
def is_degenerate(g11, g12, g22):
    return g11 * g22 - g12 * g12 <= DEGENERATE_TOL * g11 * g22


@numba.njit(nogil=True)
def relax(v, pos, corner_ptr, corner_other, d, lab):
    """Best candidate for ``v`` over its incident triangles, reading ``d``.

    Returns ``(value, label, n_updates)``; the value is never above ``d[v]``.
    ``n_updates`` counts triangle solves (triangles whose two other vertices
    are both unreached are skipped and not counted).
    """
    best = d[v]
    best_lab = lab[v]
    calls = 0
    x0 = pos[v, 0]
    y0 = pos[v, 1]
    z0 = pos[v, 2]
    for c in range(corner_ptr[v], corner_ptr[v + 1]):
        v1 = corner_other[c, 0]
        v2 = corner_other[c, 1]
        t1 = d[v1]
        t2 = d[v2]
        if t1 == math.inf and t2 == math.inf:
            continue
        calls += 1
        ax = pos[v1, 0] - x0
        ay = pos[v1, 1] - y0
        az = pos[v1, 2] - z0
        bx = pos[v2, 0] - x0
        by = pos[v2, 1] - y0
        bz = pos[v2, 2] - z0
        g11 = ax * ax + ay * ay + az * az
        g12 = ax * bx + ay * by + az * bz
        g22 = bx * bx + by * by + bz * bz
        if lab[v1] == lab[v2]:
            p, side = solve_gram(g11, g12, g22, t1, t2)
        else:
            # fronts from different sources: no planar solve across them
            p, side = solve_gram(g11, g12, g22, t1, math.inf)
            p2, _ = solve_gram(g11, g12, g22, math.inf, t2)
            if p2 < p:
                p, side = p2, FROM_V2
        if p < best:
            best = p
            best_lab = lab[v1] if side == FROM_V1 else lab[v2]
    return best, best_lab, calls


def planar_update(x1, x2, t1: float, t2: float) -> float:
    """Candidate distance at ``v0`` from edge vectors ``x1 = v1 - v0``, ``x2 = v2 - v0``."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    p, _ = solve_gram(float(x1 @ x1), float(x1 @ x2), float(x2 @ x2), float(t1), float(t2))
    return p


def relax_vertex(v: int, conn, positions, d_prev) -> float:
    """``min(d_prev[v], best triangle update)`` for a non-source vertex ``v``."""
    d = np.asarray(d_prev, dtype=np.float64)
    pos = np.asarray(positions, dtype=np.float64)
    lab = np.full(d.size, -1, dtype=np.int64)
    value, _, _ = relax(v, pos, conn.corner_ptr, conn.corner_other, d, lab)
    return value


def count_degenerate(mesh) -> int:
    """Faces whose corners all see a singular Gram matrix, so only edge fallbacks apply."""
    v = mesh.vertices[mesh.faces]
    x1 = v[:, 1] - v[:, 0]
    x2 = v[:, 2] - v[:, 0]
    g11 = np.einsum("ij,ij->i", x1, x1)
    g22 = np.einsum("ij,ij->i", x2, x2)
    g12 = np.einsum("ij,ij->i", x1, x2)
    return int(np.count_nonzero(g11 * g22 - g12 * g12 <= DEGENERATE_TOL * g11 * g22))
