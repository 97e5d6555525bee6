"""Farthest point sampling and geodesic Voronoi labels on top of PTP."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mesh import Connectivity, TriangleMesh
from .ptp import DistanceMap, PtpConfig, ptp_run
from .toplesets import check_sources, compute_toplesets


@dataclass(eq=False)
class SamplingResult:
    samples: np.ndarray
    labels: np.ndarray
    radius: float
    distances: DistanceMap
    insertion_radius: list = field(default_factory=list)
    rho: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    relax_calls: list = field(default_factory=list)


def _run(mesh, conn, sources, config):
    cfg = PtpConfig(epsilon=config.epsilon, precision=config.precision, workers=config.workers,
                    record_trace=False, labels=True)
    ordering = compute_toplesets(conn, sources)
    dist, trace = ptp_run(mesh, conn, ordering, sources, cfg)
    return dist, ordering.rho, trace


def fps(mesh: TriangleMesh, conn: Connectivity, m: int, seed: int = 0,
        config: PtpConfig | None = None) -> SamplingResult:
    """Pick ``m`` samples, each the vertex farthest from those already chosen.

    Distances are recomputed from scratch from the whole sample set at every
    step.  Ties go to the lowest vertex index.  ``insertion_radius[i]`` is the
    distance of sample ``i`` to the earlier samples at the moment it was
    picked (``inf`` for the seed); per-step ``rho``, ``iterations`` and
    ``relax_calls`` describe the PTP run from the first ``i + 1`` samples.
    """
    n = mesh.n_vertices
    if not 1 <= m <= n:
        raise ValueError(f"sample count must be in [1, {n}], got {m}")
    check_sources([seed], n)
    config = config or PtpConfig()
    samples = [int(seed)]
    res = SamplingResult(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), 0.0, None,
                         insertion_radius=[float("inf")])
    while True:
        dist, rho, trace = _run(mesh, conn, samples, config)
        res.rho.append(rho)
        res.iterations.append(trace.K)
        res.relax_calls.append(trace.relax_calls)
        if len(samples) == m:
            break
        nxt = int(np.argmax(dist.values))
        if dist.values[nxt] <= 0:
            raise RuntimeError("no vertex left at positive distance from the samples")
        res.insertion_radius.append(float(dist.values[nxt]))
        samples.append(nxt)
    res.samples = np.array(samples, dtype=np.int64)
    res.labels = dist.labels
    res.radius = float(np.max(dist.values))
    res.distances = dist
    return res


def voronoi(mesh: TriangleMesh, conn: Connectivity, samples, config: PtpConfig | None = None) -> np.ndarray:
    """Index (into ``samples``) of the geodesically nearest sample for every vertex; -1 if unreachable."""
    src = check_sources(samples, mesh.n_vertices)
    dist, _, _ = _run(mesh, conn, src, config or PtpConfig())
    return dist.labels
