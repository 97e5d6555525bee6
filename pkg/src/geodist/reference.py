"""Sequential baselines: priority-queue Fast Marching and edge-graph Dijkstra."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .kernel import relax
from .mesh import Connectivity, TriangleMesh, build_connectivity
from .ptp import DistanceMap, PtpConfig, ptp_run
from .toplesets import check_sources, compute_toplesets

FAR, RED, BLACK = 0, 1, 2


@dataclass
class FmStats:
    relax_calls: int = 0
    pops: int = 0
    key_order_violations: int = 0


@numba.njit
def _fast_marching(pos, adj_ptr, adj_idx, corner_ptr, corner_other, sources):
    n = pos.shape[0]
    d = np.full(n, math.inf)
    lab = np.full(n, -1, dtype=np.int64)
    state = np.zeros(n, dtype=np.int8)
    heap = [(0.0, np.int64(0))]
    heap.pop()
    for i in range(sources.size):
        s = sources[i]
        d[s] = 0.0
        lab[s] = i
        state[s] = RED
        heapq.heappush(heap, (0.0, s))
    calls = 0
    pops = 0
    violations = 0
    last_key = -math.inf
    while len(heap) > 0:
        key, v = heapq.heappop(heap)
        if state[v] == BLACK or key > d[v]:
            continue
        if key < last_key:
            violations += 1
        last_key = key
        state[v] = BLACK
        pops += 1
        for p in range(adj_ptr[v], adj_ptr[v + 1]):
            w = adj_idx[p]
            if state[w] == BLACK:
                continue
            value, label, c = relax(w, pos, corner_ptr, corner_other, d, lab)
            calls += c
            if value < d[w]:
                d[w] = value
                lab[w] = label
                state[w] = RED
                heapq.heappush(heap, (value, w))
    return d, lab, calls, pops, violations


def fm_run(mesh: TriangleMesh, conn: Connectivity, sources, labels: bool = False, stats: FmStats | None = None):
    """Fast Marching distances from ``sources`` (double precision).

    Each popped vertex is fixed; every non-fixed neighbour is re-solved over
    all of its incident triangles using current tentative values.  The heap
    uses lazy deletion: stale entries are skipped when popped.
    """
    src = check_sources(sources, mesh.n_vertices)
    d, lab, calls, pops, bad = _fast_marching(
        np.ascontiguousarray(mesh.vertices), conn.adj_ptr, conn.adj_idx, conn.corner_ptr, conn.corner_other, src)
    if stats is not None:
        stats.relax_calls, stats.pops, stats.key_order_violations = int(calls), int(pops), int(bad)
    return DistanceMap(d, src, lab if labels else None, "double")


def edge_graph(mesh: TriangleMesh) -> csr_matrix:
    e = mesh.edges()
    w = np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)
    n = mesh.n_vertices
    return csr_matrix((np.concatenate([w, w]), (np.concatenate([e[:, 0], e[:, 1]]), np.concatenate([e[:, 1], e[:, 0]]))),
                      shape=(n, n))


def dijkstra_run(mesh: TriangleMesh, conn: Connectivity | None, sources, labels: bool = False) -> DistanceMap:
    """Shortest paths along mesh edges with Euclidean edge lengths."""
    src = check_sources(sources, mesh.n_vertices)
    graph = edge_graph(mesh)
    d, _, nearest = dijkstra(graph, directed=False, indices=src, min_only=True, return_predecessors=True)
    lab = None
    if labels:
        index_of = np.full(mesh.n_vertices, -1, dtype=np.int64)
        index_of[src] = np.arange(src.size)
        lab = np.where(nearest >= 0, index_of[np.maximum(nearest, 0)], -1)
    return DistanceMap(d, src, lab, "double")


def relax_count_comparison(mesh: TriangleMesh, sources, conn: Connectivity | None = None,
                           config: PtpConfig | None = None) -> tuple[int, int]:
    """Triangle-update counts ``(ptp, fm)`` for the same input."""
    conn = conn or build_connectivity(mesh)
    ordering = compute_toplesets(conn, sources)
    _, trace = ptp_run(mesh, conn, ordering, sources, config or PtpConfig(record_trace=False))
    stats = FmStats()
    fm_run(mesh, conn, sources, stats=stats)
    return trace.relax_calls, stats.relax_calls
