"""``geodist`` command line: geodesic, fps, diag and bench subcommands.

Exit codes: 0 success, 2 bad input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time


from . import io
from .generators import generate_grid, generate_icosphere
from .mesh import MeshError, build_connectivity, degree_histogram
from .kernel import count_degenerate
from .metrics import analytic_grid_distance, analytic_sphere_distance, bound_suite, mape
from .ptp import PtpConfig, ptp_run, resolve_workers
from .reference import FmStats, dijkstra_run, fm_run
from .sampling import fps
from .toplesets import compute_toplesets

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _load(args):
    """Mesh plus a closed-form reference maker (or None) for the chosen input."""
    given = [x is not None for x in (args.mesh, args.grid, args.sphere)]
    if sum(given) != 1:
        raise InputError("give exactly one of --mesh, --grid, --sphere")
    if args.mesh is not None:
        return io.load_mesh(args.mesh), None
    if args.grid is not None:
        parts = args.grid.split(",")
        if len(parts) not in (2, 3):
            raise InputError("--grid takes NX,NY[,SHEAR]")
        try:
            nx, ny = int(parts[0]), int(parts[1])
            shear = float(parts[2]) if len(parts) == 3 else 0.0
        except ValueError:
            raise InputError(f"bad --grid value {args.grid!r}") from None
        return generate_grid(nx, ny, shear), analytic_grid_distance
    if args.sphere < 0:
        raise InputError("--sphere needs a non-negative subdivision level")
    return generate_icosphere(args.sphere), analytic_sphere_distance


def _config(args, labels=False, trace=True) -> PtpConfig:
    try:
        return PtpConfig(epsilon=args.epsilon, precision=args.precision, workers=args.workers,
                         record_trace=trace, labels=labels)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _manifest(args) -> dict:
    keys = ("command", "mesh", "grid", "sphere", "source", "method", "epsilon", "precision",
            "out_csv", "out_ply", "trace", "stats", "count", "seed", "sources_range", "out_dir")
    out = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    out["workers"] = resolve_workers(args.workers)
    return out


def _write_json(path, payload) -> None:
    io.ensure_parent(path)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def _sources(args, n: int) -> list[int]:
    if args.source is None:
        raise InputError("--source is required")
    src = _int_list(args.source)
    if not src:
        raise InputError("--source is empty")
    bad = [s for s in src if not 0 <= s < n]
    if bad:
        raise InputError(f"source index {bad[0]} out of range for {n} vertices")
    if len(set(src)) != len(src):
        raise InputError("duplicate source indices")
    return src


def cmd_geodesic(args) -> int:
    mesh, oracle = _load(args)
    conn = build_connectivity(mesh)
    src = _sources(args, mesh.n_vertices)
    cfg = _config(args, labels=True)
    stats = {"manifest": _manifest(args), "n": mesh.n_vertices, "degenerate_faces": count_degenerate(mesh)}
    t0 = time.perf_counter()
    if args.method == "ptp":
        ordering = compute_toplesets(conn, src)
        dist, trace = ptp_run(mesh, conn, ordering, src, cfg)
        stats.update(rho=ordering.rho, K=trace.K, relax_calls=trace.relax_calls)
        if args.trace:
            io.ensure_parent(args.trace)
            io.write_rows_csv(args.trace, ["k", "i_k", "j_k", "updated", "max_rel_change"], trace.rows())
    elif args.method == "fm":
        fs = FmStats()
        dist = fm_run(mesh, conn, src, labels=True, stats=fs)
        stats.update(relax_calls=fs.relax_calls, key_order_violations=fs.key_order_violations)
    else:
        dist = dijkstra_run(mesh, conn, src, labels=True)
    if args.timings:
        stats["wall_time"] = time.perf_counter() - t0
    stats["unreached"] = dist.n_unreached
    if oracle is not None:
        stats["mape_percent"] = mape(dist, oracle(mesh, src)).mape
    if args.out_csv:
        io.ensure_parent(args.out_csv)
        io.write_distance_csv(dist, args.out_csv)
    if args.out_ply:
        io.ensure_parent(args.out_ply)
        io.write_distance_ply(mesh, dist, args.out_ply)
    if args.stats:
        _write_json(args.stats, stats)
    return EXIT_OK


def cmd_fps(args) -> int:
    mesh, _ = _load(args)
    if not 1 <= args.count <= mesh.n_vertices:
        raise InputError(f"--count must be in [1, {mesh.n_vertices}]")
    if not 0 <= args.seed < mesh.n_vertices:
        raise InputError(f"--seed {args.seed} out of range")
    conn = build_connectivity(mesh)
    res = fps(mesh, conn, args.count, args.seed, _config(args, trace=False))
    if args.out_csv:
        io.ensure_parent(args.out_csv)
        io.write_rows_csv(args.out_csv, ["order", "vertex", "insertion_radius"],
                          ((i, int(v), float(r)) for i, (v, r) in enumerate(zip(res.samples, res.insertion_radius))))
    if args.out_ply:
        io.ensure_parent(args.out_ply)
        io.write_label_ply(mesh, res.labels, args.out_ply)
    if args.stats:
        _write_json(args.stats, {"manifest": _manifest(args), "covering_radius": res.radius,
                                 "rho": res.rho, "iterations": res.iterations, "relax_calls": res.relax_calls})
    return EXIT_OK


def cmd_diag(args) -> int:
    mesh, _ = _load(args)
    src = _sources(args, mesh.n_vertices)
    conn = build_connectivity(mesh)
    ordering = compute_toplesets(conn, src)
    _, trace = ptp_run(mesh, conn, ordering, src, _config(args))
    report = bound_suite(mesh, conn, ordering, trace)
    out = args.out_dir
    if out:
        os.makedirs(out, exist_ok=True)
        io.write_rows_csv(os.path.join(out, "toplesets.csv"), ["topleset_index", "size"],
                          enumerate(ordering.sizes().tolist()))
        io.write_rows_csv(os.path.join(out, "degrees.csv"), ["degree", "count"],
                          sorted(degree_histogram(conn).items()))
        io.write_rows_csv(os.path.join(out, "trace.csv"), ["k", "i_k", "j_k", "updated", "max_rel_change"],
                          trace.rows())
    if args.out_csv:
        io.ensure_parent(args.out_csv)
        io.write_rows_csv(args.out_csv, ["topleset_index", "size"], enumerate(ordering.sizes().tolist()))
    payload = {"manifest": _manifest(args), "bounds": report, "unreached": ordering.n_unreached}
    if args.stats:
        _write_json(args.stats, payload)
    print(("all clear" if report["all_clear"] else "bound flags raised")
          + f": n={report['n']} rho={report['rho']} K={report['K']}")
    return EXIT_OK


def _parse_range(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(":"))
    except ValueError:
        raise InputError(f"--sources-range takes A:B, got {text!r}") from None
    if a < 1 or a > b:
        raise InputError("--sources-range needs 1 <= A <= B")
    return a, b


def cmd_bench(args) -> int:
    mesh, _ = _load(args)
    a, b = _parse_range(args.sources_range)
    if b > mesh.n_vertices:
        raise InputError(f"--sources-range upper end exceeds {mesh.n_vertices} vertices")
    conn = build_connectivity(mesh)
    cfg = _config(args, trace=False)
    samples = fps(mesh, conn, b, args.seed, cfg).samples
    rows = []
    for m in range(a, b + 1):
        src = samples[:m]
        ordering = compute_toplesets(conn, src)
        _, trace = ptp_run(mesh, conn, ordering, src, cfg)
        fs = FmStats()
        fm_run(mesh, conn, src, stats=fs)
        rows.append((m, trace.relax_calls, fs.relax_calls, ordering.rho, trace.K))
    header = ["m", "ptp_relax", "fm_relax", "rho", "K"]
    if args.out_csv:
        io.ensure_parent(args.out_csv)
        io.write_rows_csv(args.out_csv, header, rows)
    else:
        _print_rows(header, rows)
    if args.stats:
        _write_json(args.stats, {"manifest": _manifest(args), "rows": [dict(zip(header, r)) for r in rows]})
    return EXIT_OK


def _print_rows(header, rows) -> None:
    print(",".join(header))
    for r in rows:
        print(",".join(str(x) for x in r))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="geodist", description="Geodesic distances on triangle meshes.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        g = sp.add_argument_group("input mesh (exactly one)")
        g.add_argument("--mesh", help="OFF or OBJ file")
        g.add_argument("--grid", metavar="NX,NY[,SHEAR]")
        g.add_argument("--sphere", type=int, metavar="SUBDIV")
        sp.add_argument("--epsilon", type=float, default=0.001)
        sp.add_argument("--precision", choices=("single", "double"), default="double")
        sp.add_argument("--workers", default=None, help="N or 'auto' (default: $GEODIST_WORKERS or 1)")
        sp.add_argument("--stats", metavar="PATH", help="JSON run summary")
        sp.add_argument("--out-csv", metavar="PATH")

    g = sub.add_parser("geodesic", help="distance field from a source set")
    common(g)
    g.add_argument("--source", metavar="I[,I...]")
    g.add_argument("--method", choices=("ptp", "fm", "dijkstra"), default="ptp")
    g.add_argument("--out-ply", metavar="PATH")
    g.add_argument("--trace", metavar="PATH", help="per-iteration band CSV (ptp only)")
    g.add_argument("--timings", action="store_true", help="add wall time to the JSON stats")
    g.set_defaults(func=cmd_geodesic)

    f = sub.add_parser("fps", help="farthest point sampling")
    common(f)
    f.add_argument("--count", type=int, required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out-ply", metavar="PATH", help="Voronoi-coloured PLY")
    f.set_defaults(func=cmd_fps)

    d = sub.add_parser("diag", help="toplesets, degrees, band trace and bound checks")
    common(d)
    d.add_argument("--source", metavar="I[,I...]")
    d.add_argument("--out-dir", metavar="DIR")
    d.set_defaults(func=cmd_diag)

    b = sub.add_parser("bench", help="relax-call counts against the number of sources")
    common(b)
    b.add_argument("--sources-range", required=True, metavar="A:B")
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (InputError, MeshError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"geodist: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IndexError as exc:
        print(f"geodist: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, ArithmeticError, RuntimeError, MemoryError, AssertionError) as exc:
        print(f"geodist: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
