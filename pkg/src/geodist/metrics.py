"""Error metrics against closed-form references, convergence curves and complexity diagnostics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .mesh import Connectivity, TriangleMesh, build_connectivity
from .ptp import BandTrace, PtpConfig, ptp_run
from .toplesets import STATIONARY, ToplesetOrdering, check_sources, classify_sequences, compute_toplesets


@dataclass
class ErrorReport:
    mape: float
    max_relative_error: float
    compared: int
    excluded: int

    def to_dict(self):
        return asdict(self)


def mape(approx, exact, sources=None) -> ErrorReport:
    """Mean absolute percent error over non-source, reached vertices with a positive reference."""
    d = np.asarray(getattr(approx, "values", approx), dtype=np.float64)
    e = np.asarray(exact, dtype=np.float64)
    if d.shape != e.shape:
        raise ValueError("approximation and reference differ in size")
    if sources is None:
        sources = getattr(approx, "sources", None)
    mask = np.isfinite(d) & np.isfinite(e) & (e > 0)
    if sources is not None:
        mask[np.asarray(sources, dtype=np.int64)] = False
    k = int(np.count_nonzero(mask))
    if k == 0:
        raise ValueError("no comparable vertices")
    rel = np.abs(d[mask] - e[mask]) / e[mask]
    return ErrorReport(100.0 * float(rel.mean()), 100.0 * float(rel.max()), k, d.size - k)


def analytic_grid_distance(mesh: TriangleMesh, sources) -> np.ndarray:
    """Planar Euclidean distance to the nearest source (exact geodesic on a flat mesh)."""
    src = check_sources(sources, mesh.n_vertices)
    p = mesh.vertices
    out = np.full(mesh.n_vertices, np.inf)
    for s in src:
        np.minimum(out, np.linalg.norm(p - p[s], axis=1), out=out)
    return out


def analytic_sphere_distance(mesh: TriangleMesh, sources) -> np.ndarray:
    """Great-circle distance on the unit sphere to the nearest source."""
    src = check_sources(sources, mesh.n_vertices)
    u = mesh.vertices / np.linalg.norm(mesh.vertices, axis=1, keepdims=True)
    out = np.full(mesh.n_vertices, np.inf)
    for s in src:
        np.minimum(out, np.arccos(np.clip(u @ u[s], -1.0, 1.0)), out=out)
    return out


def convergence_curve(mesh: TriangleMesh, sources, reference, epsilons=(0.001,), conn=None,
                      precision: str = "double") -> dict:
    """MAPE after every iteration, one series per epsilon.

    Returns ``{epsilon: {"rho": rho, "K": K, "k": [...], "mape": [...]}}`` with
    one entry per iteration ``k = 1 .. K``; the tail ``k >= rho`` is the part
    plotted against iterations in convergence studies.
    """
    conn = conn or build_connectivity(mesh)
    ordering = compute_toplesets(conn, sources)
    src = ordering.sources
    reference = np.asarray(reference, dtype=np.float64)
    mask = np.isfinite(reference) & (reference > 0)
    mask[src] = False
    ref = reference[mask]
    out = {}
    for eps in epsilons:
        ks, errs = [], []

        def record(k, d):
            ks.append(k)
            errs.append(100.0 * float(np.mean(np.abs(d[mask].astype(np.float64) - ref) / ref)))

        _, trace = ptp_run(mesh, conn, ordering, src, PtpConfig(epsilon=eps, precision=precision), callback=record)
        out[eps] = {"rho": ordering.rho, "K": trace.K, "k": ks, "mape": errs}
    return out


def iteration_bound_check(trace: BandTrace, ordering: ToplesetOrdering) -> dict:
    ratio = trace.K / ordering.rho
    return {"K": trace.K, "rho": ordering.rho, "ratio": ratio, "flag": ratio > 2.0}


def empirical_kr(trace: BandTrace, ordering: ToplesetOrdering) -> np.ndarray:
    """Iteration after which no vertex of topleset ``r`` changed again (index 0 is the sources: 0)."""
    last = trace.last_change
    out = np.zeros(ordering.rho, dtype=np.int64)
    for r in range(1, ordering.rho):
        out[r] = last[ordering.topleset(r)].max()
    return out


def kr_bounds(conn: Connectivity, ordering: ToplesetOrdering):
    """Per-topleset iteration bounds ``(degree_bound, cardinality_bound)``.

    ``degree_bound[r] = c (r - 1) + 1`` with ``c = ceil((maxdeg(V_r) - 3) / 2)``
    (at least 1); ``cardinality_bound`` uses
    ``c = ceil((|V_r| + |V_{r-1}|) / (2 |V_{r-1}|))`` instead.
    """
    deg = conn.degrees()
    sizes = ordering.sizes()
    rho = ordering.rho
    by_deg = np.zeros(rho, dtype=np.int64)
    by_card = np.zeros(rho, dtype=np.int64)
    for r in range(1, rho):
        dmax = int(deg[ordering.topleset(r)].max())
        c = max(1, math.ceil((dmax - 3) / 2))
        by_deg[r] = c * (r - 1) + 1
        c2 = -(-(int(sizes[r]) + int(sizes[r - 1])) // (2 * int(sizes[r - 1])))
        by_card[r] = c2 * (r - 1) + 1
    return by_deg, by_card


def fixed_band_counts(rho: int) -> list[int]:
    """Toplesets per iteration for the analysis band ``[floor((k + 1) / 2), min(k, rho - 1)]``."""
    counts = []
    k = 0
    while True:
        k += 1
        lo = (k + 1) // 2
        if lo > rho - 1:
            return counts
        counts.append(min(k, rho - 1) - lo + 1)


def dynamic_band_counts(trace: BandTrace) -> list[int]:
    return [j - i + 1 for i, j in zip(trace.lower, trace.upper)]


def bound_suite(mesh: TriangleMesh, conn: Connectivity, ordering: ToplesetOrdering, trace: BandTrace) -> dict:
    """Empirical checks of the topleset/iteration bounds for one completed run.

    * ``rho_vs_sqrt_n``: ``rho / sqrt(n)``, flagged above 2 unless most vertices
      sit in stationary runs (the bound is for growing toplesets).
    * ``K_vs_rho``: flagged above 2.
    * ``min_rho_vs_log_n``: ``rho / log_b(n)`` with ``b = maxdeg - 4``, flagged
      below 1; not evaluated when ``b < 2``.
    * ``Kr_lemma_check``: toplesets whose last-change iteration exceeds the
      degree bound of :func:`kr_bounds`.
    """
    n = ordering.n_reached
    rho = ordering.rho
    sizes = ordering.sizes()
    report = {"n": n, "rho": rho, "K": trace.K}

    stationary = 0
    if rho >= 2:
        for seg in classify_sequences(sizes):
            if seg.kind == STATIONARY:
                stationary += int(sizes[seg.start:seg.end + 1].sum())
    ratio = rho / math.sqrt(n)
    applies = stationary < n / 2
    report["rho_vs_sqrt_n"] = {"value": ratio, "applies": applies, "flag": bool(applies and ratio > 2.0)}

    report["rho_vs_log2_n"] = {"value": rho / math.log2(n) if n > 1 else None}

    kr = trace.K / rho
    report["K_vs_rho"] = {"value": kr, "flag": bool(kr > 2.0)}

    b = int(conn.degrees().max()) - 4
    if b >= 2 and n > 1:
        v = rho / (math.log(n) / math.log(b))
        report["min_rho_vs_log_n"] = {"base": b, "value": v, "flag": bool(v < 1.0)}
    else:
        report["min_rho_vs_log_n"] = {"base": b, "value": None, "flag": False}

    if trace.last_change is not None and rho >= 2:
        emp = empirical_kr(trace, ordering)
        by_deg, by_card = kr_bounds(conn, ordering)
        viol = [int(r) for r in range(1, rho) if emp[r] > by_deg[r]]
        report["Kr_lemma_check"] = {
            "empirical": emp.tolist(), "degree_bound": by_deg.tolist(), "cardinality_bound": by_card.tolist(),
            "violations": viol, "flag": bool(viol),
        }
    else:
        report["Kr_lemma_check"] = {"violations": [], "flag": False}
    report["all_clear"] = not any(report[key]["flag"] for key in
                                  ("rho_vs_sqrt_n", "K_vs_rho", "min_rho_vs_log_n", "Kr_lemma_check"))
    return report


def run_bound_suite(mesh: TriangleMesh, sources, config: PtpConfig | None = None, conn=None) -> dict:
    conn = conn or build_connectivity(mesh)
    ordering = compute_toplesets(conn, sources)
    _, trace = ptp_run(mesh, conn, ordering, sources, config or PtpConfig())
    return bound_suite(mesh, conn, ordering, trace)
