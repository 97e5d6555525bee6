"""Banded parallel relaxation over toplesets (PTP).

Every iteration relaxes all vertices in a band of consecutive toplesets
``[i, j]`` against the previous distance map, writing into a separate buffer,
then commits the band.  The upper boundary advances one topleset per
iteration until it reaches the last one; the lower boundary advances by one
when every vertex of the front topleset changed by less than ``epsilon``
(relative).  The run ends once the lower boundary passes the last topleset.

Vertex updates inside a band are independent, so the band is split into
contiguous chunks handed to a thread pool; writes are disjoint and the only
reduction is an exact ``max``, which makes the output independent of the
worker count.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .kernel import relax
from .mesh import Connectivity, TriangleMesh
from .toplesets import ToplesetOrdering, check_sources

DEFAULT_EPSILON = 0.001
_TINY = np.finfo(np.float64).tiny

_DTYPES = {"double": np.float64, "single": np.float32}


@dataclass
class PtpConfig:
    epsilon: float = DEFAULT_EPSILON
    precision: str = "double"
    workers: int | str | None = 1
    record_trace: bool = True
    labels: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.precision not in _DTYPES:
            raise ValueError(f"precision must be 'single' or 'double', got {self.precision!r}")
        self.workers = resolve_workers(self.workers)

    @property
    def dtype(self):
        return _DTYPES[self.precision]


def resolve_workers(workers) -> int:
    """``None`` reads ``GEODIST_WORKERS``; ``"auto"`` means the CPU count."""
    if workers is None:
        workers = os.environ.get("GEODIST_WORKERS", "1")
    if isinstance(workers, str):
        workers = os.cpu_count() or 1 if workers == "auto" else int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return int(workers)


@dataclass(eq=False)
class DistanceMap:
    values: np.ndarray
    sources: np.ndarray
    labels: np.ndarray | None = None
    precision: str = "double"

    def __len__(self):
        return self.values.size

    @property
    def n_unreached(self) -> int:
        return int(np.count_nonzero(~np.isfinite(self.values)))

    def check(self) -> None:
        v = self.values
        assert np.all(v[self.sources] == 0)
        finite = v[np.isfinite(v)]
        assert np.all(finite >= 0)
        if self.labels is not None:
            assert np.array_equal(self.labels[self.sources], np.arange(self.sources.size))
            assert np.all(np.isfinite(v[self.labels >= 0]))


@dataclass(eq=False)
class BandTrace:
    """Per-iteration record of the update band.

    Row ``k - 1`` describes iteration ``k``: the band ``[lower, upper]`` that
    was relaxed, the number of vertices relaxed, the largest relative change
    over the front topleset ``lower``, and whether that topleset retired.
    ``last_change[v]`` is the last iteration that changed ``v`` (0 if never).
    """

    lower: list = field(default_factory=list)
    upper: list = field(default_factory=list)
    updated: list = field(default_factory=list)
    max_rel_change: list = field(default_factory=list)
    converged: list = field(default_factory=list)
    rho: int = 0
    n_vertices: int = 0
    relax_calls: int = 0
    iterations: int = 0
    wall_time: float = 0.0
    last_change: np.ndarray | None = None

    @property
    def K(self) -> int:
        return self.iterations

    def rows(self):
        for k in range(self.K):
            yield k + 1, self.lower[k], self.upper[k], self.updated[k], self.max_rel_change[k]


def band_boundaries(k: int, prev_i: int, rho: int, converged_front: bool) -> tuple[int, int]:
    """Band limits after iteration ``k``: lower ``prev_i (+1 if the front retired)``, upper ``min(k, rho - 1)``."""
    if not 1 <= prev_i <= rho:
        raise ValueError("need 1 <= prev_i <= rho")
    j = k if k < rho else rho - 1
    i = prev_i + 1 if converged_front else prev_i
    return i, j


@numba.njit(nogil=True)
def _relax_chunk(order, start, stop, pos, corner_ptr, corner_other, d, lab, out_d, out_lab, base):
    calls = 0
    for p in range(start, stop):
        v = order[p]
        value, label, c = relax(v, pos, corner_ptr, corner_other, d, lab)
        out_d[p - base] = value
        out_lab[p - base] = label
        calls += c
    return calls


@numba.njit(nogil=True)
def _front_change(order, start, stop, d, out_d, base, tiny):
    worst = 0.0
    for p in range(start, stop):
        old = d[order[p]]
        new = out_d[p - base]
        if old == math.inf:
            r = 0.0 if new == math.inf else math.inf
        else:
            den = old if old > 0 else tiny
            r = abs(new - old) / den
        if r > worst:
            worst = r
    return worst


@numba.njit(nogil=True)
def _commit(order, start, stop, d, lab, out_d, out_lab, base, last_change, k):
    for p in range(start, stop):
        v = order[p]
        new = out_d[p - base]
        if new != d[v]:
            last_change[v] = k
        d[v] = new
        lab[v] = out_lab[p - base]


class _Pool:
    """Splits ``[start, stop)`` into ``workers`` contiguous chunks."""

    def __init__(self, workers: int):
        self.workers = workers
        self.executor = ThreadPoolExecutor(workers) if workers > 1 else None

    def close(self):
        if self.executor is not None:
            self.executor.shutdown()

    def run(self, fn, start, stop, *args):
        if self.executor is None or stop - start < 2 * self.workers:
            return [fn(start, stop, *args)]
        bounds = np.linspace(start, stop, self.workers + 1).astype(np.int64)
        futures = [self.executor.submit(fn, int(a), int(b), *args) for a, b in zip(bounds[:-1], bounds[1:])]
        return [f.result() for f in futures]


def ptp_run(mesh: TriangleMesh, conn: Connectivity, ordering: ToplesetOrdering, sources,
            config: PtpConfig | None = None, callback=None):
    """Distances from ``sources``; returns ``(DistanceMap, BandTrace)``.

    ``ordering`` must be the toplesets of the same source set.  ``callback``,
    if given, is called as ``callback(k, values)`` after each iteration with a
    read-only view of the current distance buffer.
    """
    config = config or PtpConfig()
    src = check_sources(sources, mesh.n_vertices)
    if ordering.inverse.size != mesh.n_vertices or set(ordering.sources.tolist()) != set(src.tolist()):
        raise ValueError("topleset ordering was not computed from this source set")
    t0 = time.perf_counter()
    dtype = config.dtype
    n = mesh.n_vertices
    pos = np.ascontiguousarray(mesh.vertices, dtype=dtype)
    d = np.full(n, np.inf, dtype=dtype)
    d[src] = 0
    lab = np.full(n, -1, dtype=np.int64)
    lab[src] = np.arange(src.size)
    last_change = np.zeros(n, dtype=np.int64)
    order = np.ascontiguousarray(ordering.sorted)
    limits = ordering.limits
    rho = ordering.rho
    cptr, cother = conn.corner_ptr, conn.corner_other
    scratch = np.empty(order.size, dtype=dtype)
    scratch_lab = np.empty(order.size, dtype=np.int64)
    trace = BandTrace(rho=rho, n_vertices=n)
    tiny = float(np.finfo(dtype).tiny)

    def relax_part(a, b, base):
        return _relax_chunk(order, a, b, pos, cptr, cother, d, lab, scratch, scratch_lab, base)

    def front_part(a, b, base):
        return _front_change(order, a, b, d, scratch, base, tiny)

    def commit_part(a, b, base, k):
        _commit(order, a, b, d, lab, scratch, scratch_lab, base, last_change, k)

    pool = _Pool(config.workers)
    try:
        i, k = 1, 0
        while i <= rho - 1:
            k += 1
            j = k if k < rho else rho - 1
            start, stop = int(limits[i]), int(limits[j + 1])
            trace.relax_calls += sum(pool.run(relax_part, start, stop, start))
            worst = max(pool.run(front_part, start, int(limits[i + 1]), start))
            pool.run(commit_part, start, stop, start, k)
            converged = worst < config.epsilon
            if config.record_trace:
                trace.lower.append(i)
                trace.upper.append(j)
                trace.updated.append(stop - start)
                trace.max_rel_change.append(worst)
                trace.converged.append(converged)
            if callback is not None:
                view = d.view()
                view.flags.writeable = False
                callback(k, view)
            i, _ = band_boundaries(k, i, rho, converged)
        trace.iterations = k
    finally:
        pool.close()
    trace.wall_time = time.perf_counter() - t0
    trace.last_change = last_change
    dist = DistanceMap(d, src, lab if config.labels else None, config.precision)
    return dist, trace


def ptp_distances(mesh: TriangleMesh, sources, config: PtpConfig | None = None, conn=None):
    """Convenience wrapper: build connectivity and toplesets, then run PTP."""
    from .mesh import build_connectivity
    from .toplesets import compute_toplesets

    conn = conn or build_connectivity(mesh)
    ordering = compute_toplesets(conn, sources)
    return ptp_run(mesh, conn, ordering, sources, config)
