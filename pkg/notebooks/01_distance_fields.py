"""Distance fields on a flat grid and a sphere, checked against closed forms.

Run from the repository root:  python3 notebooks/01_distance_fields.py
Writes PLY colour maps and CSVs under notebooks/out/.
"""
from pathlib import Path

import numpy as np

from geodist.generators import generate_grid, generate_icosphere, grid_index
from geodist.io import write_distance_csv, write_distance_ply
from geodist.mesh import build_connectivity
from geodist.metrics import analytic_grid_distance, analytic_sphere_distance, mape
from geodist.ptp import PtpConfig, ptp_run
from geodist.reference import dijkstra_run, fm_run
from geodist.toplesets import compute_toplesets

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

# a 201 x 201 unit grid, source in the middle
grid = generate_grid(201, 201)
conn = build_connectivity(grid)
src = [grid_index(201, 100, 100)]
order = compute_toplesets(conn, src)
dist, trace = ptp_run(grid, conn, order, src)
exact = analytic_grid_distance(grid, src)   # flat mesh: geodesic == straight line

print("grid  n=%d  rho=%d  K=%d" % (grid.n_vertices, order.rho, trace.K))
print("  ptp      MAPE %.4f%%" % mape(dist, exact).mape)
print("  fm       MAPE %.4f%%" % mape(fm_run(grid, conn, src), exact).mape)
print("  dijkstra MAPE %.4f%%" % mape(dijkstra_run(grid, conn, src), exact).mape)   # edge paths overshoot

# the planar update gets the axis and diagonal directions exactly; in between it overshoots a little
rel = np.abs(dist.values - exact) / np.where(exact > 0, exact, 1)
worst = int(np.argmax(rel))
print("  worst vertex", worst, "at", grid.vertices[worst, :2], "rel err %.3g" % rel[worst])

write_distance_ply(grid, dist, out / "grid_distance.ply")
write_distance_csv(dist, out / "grid_distance.csv")

# shear the same grid until one triangle family turns obtuse
for shear in (0.0, 0.5, 1.0, 2.0):
    g = generate_grid(41, 41, shear)
    s = [0]
    d, _ = ptp_run(g, build_connectivity(g), compute_toplesets(build_connectivity(g), s), s)
    angle = np.degrees(g.face_angles()).max()
    print("shear %.1f  max angle %5.1f deg  MAPE %.3f%%" % (shear, angle, mape(d, analytic_grid_distance(g, s)).mape))

# unit sphere from the north pole; single precision for comparison
sphere = generate_icosphere(4)
sc = build_connectivity(sphere)
so = compute_toplesets(sc, [0])
ref = analytic_sphere_distance(sphere, [0])
for prec in ("double", "single"):
    d, t = ptp_run(sphere, sc, so, [0], PtpConfig(precision=prec))
    print("sphere %-6s  MAPE %.4f%%  K/rho %.2f" % (prec, mape(d, ref).mape, t.K / so.rho))
write_distance_ply(sphere, d, out / "sphere_distance.ply", binary=True)
