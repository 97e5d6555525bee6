"""Farthest point sampling and Voronoi regions, plus operation counts as sources grow."""
from pathlib import Path

import numpy as np

from geodist.generators import generate_grid, generate_icosphere
from geodist.io import write_label_ply, write_rows_csv
from geodist.mesh import build_connectivity
from geodist.ptp import PtpConfig, ptp_run
from geodist.reference import FmStats, fm_run
from geodist.sampling import fps, voronoi
from geodist.toplesets import compute_toplesets

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

sphere = generate_icosphere(4)
sc = build_connectivity(sphere)
res = fps(sphere, sc, 100, seed=0)
print("sphere fps: covering radius %.4f after %d samples" % (res.radius, res.samples.size))
print("   insertion radii", np.round(res.insertion_radius[1:8], 3), "...")
write_label_ply(sphere, res.labels, out / "sphere_voronoi.ply")
sizes = np.bincount(res.labels)
print("   region sizes min %d max %d" % (sizes.min(), sizes.max()))

# two corners of a square split it along the anti-diagonal
grid = generate_grid(41, 41)
gc = build_connectivity(grid)
lab = voronoi(grid, gc, [0, 41 * 41 - 1])
print("grid voronoi: %d / %d vertices go to the first corner" % ((lab == 0).sum(), lab.size))

# relax counts for m spread sources (first m fps samples)
grid = generate_grid(101, 101)
gc = build_connectivity(grid)
spread = fps(grid, gc, 64, 0, PtpConfig(record_trace=False)).samples
rows = []
for m in (1, 2, 4, 8, 16, 32, 64):
    s = spread[:m]
    o = compute_toplesets(gc, s)
    _, t = ptp_run(grid, gc, o, s, PtpConfig(record_trace=False))
    st = FmStats()
    fm_run(grid, gc, s, stats=st)
    rows.append((m, t.relax_calls, st.relax_calls, o.rho, t.K))
    print("m=%2d  ptp relax %7d  fm relax %7d  rho %3d  K %3d" % rows[-1])
write_rows_csv(out / "bench.csv", ["m", "ptp_relax", "fm_relax", "rho", "K"], rows)
# rho (the length of the sequential chain) falls like 1/sqrt(m); total relax work does not
