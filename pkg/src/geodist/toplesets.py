"""Topological level sets (breadth-first layers) around a source set."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .mesh import Connectivity, TriangleMesh, build_connectivity, permute_vertices

UNREACHED = -1


@dataclass(frozen=True, eq=False)
class ToplesetOrdering:
    """Vertices grouped by hop distance to the sources.

    Topleset ``r`` is ``sorted[limits[r]:limits[r + 1]]``; within a topleset
    vertices are in ascending index order.  ``inverse[v]`` is the position of
    ``v`` in ``sorted`` or ``UNREACHED``.
    """

    sorted: np.ndarray
    limits: np.ndarray
    inverse: np.ndarray
    level: np.ndarray

    @property
    def rho(self) -> int:
        return self.limits.size - 1

    @property
    def n_reached(self) -> int:
        return self.sorted.size

    @property
    def n_unreached(self) -> int:
        return self.inverse.size - self.sorted.size

    @property
    def sources(self) -> np.ndarray:
        return self.sorted[: self.limits[1]]

    def topleset(self, r: int) -> np.ndarray:
        return self.sorted[self.limits[r]:self.limits[r + 1]]

    def sizes(self) -> np.ndarray:
        return np.diff(self.limits)

    def is_identity(self) -> bool:
        return self.n_unreached == 0 and bool(np.all(self.sorted == np.arange(self.sorted.size)))


def check_sources(sources, n_vertices: int) -> np.ndarray:
    src = np.asarray(sources, dtype=np.int64).reshape(-1)
    if src.size == 0:
        raise ValueError("source set is empty")
    bad = src[(src < 0) | (src >= n_vertices)]
    if bad.size:
        raise IndexError(f"source index {int(bad[0])} out of range for {n_vertices} vertices")
    if np.unique(src).size != src.size:
        raise ValueError("duplicate source indices")
    return src


@numba.njit
def _bfs_levels(adj_ptr, adj_idx, sources, n):
    level = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    tail = 0
    for s in sources:
        level[s] = 0
        queue[tail] = s
        tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        for p in range(adj_ptr[u], adj_ptr[u + 1]):
            w = adj_idx[p]
            if level[w] < 0:
                level[w] = level[u] + 1
                queue[tail] = w
                tail += 1
    return level


def compute_toplesets(conn: Connectivity, sources) -> ToplesetOrdering:
    src = check_sources(sources, conn.n_vertices)
    level = _bfs_levels(conn.adj_ptr, conn.adj_idx, src, conn.n_vertices)
    reached = np.flatnonzero(level >= 0)
    order = reached[np.argsort(level[reached], kind="stable")]
    rho = int(level.max()) + 1
    limits = np.zeros(rho + 1, dtype=np.int64)
    np.cumsum(np.bincount(level[reached], minlength=rho), out=limits[1:])
    inverse = np.full(conn.n_vertices, UNREACHED, dtype=np.int64)
    inverse[order] = np.arange(order.size)
    for a in (order, limits, inverse, level):
        a.flags.writeable = False
    return ToplesetOrdering(order, limits, inverse, level)


def reorder_for_bands(mesh: TriangleMesh, conn: Connectivity, ordering: ToplesetOrdering):
    """Renumber vertices so each topleset occupies a contiguous index range.

    Old vertex ``ordering.sorted[p]`` becomes new vertex ``p``; unreached
    vertices are appended after the reached ones in ascending old index.
    Returns ``(mesh, conn, ordering, new_to_old)``; the returned ordering has
    ``sorted == arange``.
    """
    unreached = np.flatnonzero(ordering.inverse == UNREACHED)
    new_to_old = np.concatenate([ordering.sorted, unreached])
    if np.all(new_to_old == np.arange(new_to_old.size)):
        return mesh, conn, ordering, new_to_old
    pmesh = permute_vertices(mesh, new_to_old)
    pconn = build_connectivity(pmesh)
    k = ordering.sorted.size
    level = np.asarray(ordering.level)[new_to_old]
    inverse = np.full(new_to_old.size, UNREACHED, dtype=np.int64)
    inverse[:k] = np.arange(k)
    pord = ToplesetOrdering(np.arange(k, dtype=np.int64), ordering.limits.copy(), inverse, level)
    return pmesh, pconn, pord, new_to_old


def unpermute(values: np.ndarray, new_to_old: np.ndarray) -> np.ndarray:
    """Map a per-vertex array computed on a reordered mesh back to the original numbering."""
    out = np.empty_like(values)
    out[new_to_old] = values
    return out


def topleset_histogram(ordering: ToplesetOrdering) -> np.ndarray:
    return ordering.sizes()


INCREASING, STATIONARY, DECREASING = "increasing", "stationary", "decreasing"


@dataclass(frozen=True)
class Segment:
    start: int
    end: int
    kind: str


def classify_sequences(ordering_or_sizes) -> list[Segment]:
    """Split toplesets into runs with a constant sign of ``|V_r| - |V_{r-1}|``.

    Topleset ``r >= 1`` belongs to the run of its own difference sign; topleset
    0 joins the first run.  Ends are inclusive.
    """
    sizes = np.asarray(
        ordering_or_sizes.sizes() if isinstance(ordering_or_sizes, ToplesetOrdering) else ordering_or_sizes,
        dtype=np.int64,
    )
    if sizes.size < 2:
        raise ValueError("need at least two toplesets to classify")
    sign = np.sign(np.diff(sizes))
    kinds = {1: INCREASING, 0: STATIONARY, -1: DECREASING}
    segments = []
    start = 0
    for r in range(2, sizes.size):
        if sign[r - 1] != sign[r - 2]:
            segments.append(Segment(start, r - 1, kinds[int(sign[r - 2])]))
            start = r
    segments.append(Segment(start, sizes.size - 1, kinds[int(sign[-1])]))
    return segments
