"""How the update band moves: toplesets, band widths, convergence and the bound checks."""
from pathlib import Path

import numpy as np

from geodist.generators import generate_cylinder, generate_grid, generate_icosphere, grid_index
from geodist.io import write_rows_csv
from geodist.mesh import TriangleMesh, build_connectivity, degree_histogram
from geodist.metrics import (analytic_grid_distance, bound_suite, convergence_curve, dynamic_band_counts,
                             empirical_kr, fixed_band_counts)
from geodist.ptp import ptp_run
from geodist.toplesets import classify_sequences, compute_toplesets

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

meshes = {
    "grid": (generate_grid(101, 101), [grid_index(101, 50, 50)]),
    "sphere": (generate_icosphere(4), [0]),
    "cylinder": (generate_cylinder(32, 80), list(range(32))),   # whole bottom ring as source
}

for name, (m, src) in meshes.items():
    c = build_connectivity(m)
    o = compute_toplesets(c, src)
    d, t = ptp_run(m, c, o, src)
    sizes = o.sizes()
    print(name, "n=%d rho=%d K=%d" % (m.n_vertices, o.rho, t.K))
    print("   layer sizes", sizes[:6], "...", sizes[-3:])
    print("   runs", [(s.start, s.end, s.kind) for s in classify_sequences(o)])
    print("   degrees", degree_histogram(c))
    rep = bound_suite(m, c, o, t)
    print("   rho/sqrt(n) %.2f  K/rho %.2f  all clear: %s" % (
        rep["rho_vs_sqrt_n"]["value"], rep["K_vs_rho"]["value"], rep["all_clear"]))
    # last iteration that still moved each layer, next to the layer index
    kr = empirical_kr(t, o)
    print("   max(K_r - r) =", int((kr - np.arange(o.rho))[1:].max()))
    write_rows_csv(out / f"{name}_trace.csv", ["k", "i_k", "j_k", "updated", "max_rel_change"], t.rows())

# the adaptive band against the fixed [k/2, k] band
m, src = meshes["grid"]
c = build_connectivity(m)
o = compute_toplesets(c, src)
_, t = ptp_run(m, c, o, src)
dyn, fix = dynamic_band_counts(t), fixed_band_counts(o.rho)
print("band: adaptive %d iterations, widest %d layers; fixed %d iterations, widest %d" % (
    len(dyn), max(dyn), len(fix), max(fix)))

# a regular grid settles in one sweep, so perturb it to see epsilon matter
g = generate_grid(61, 61)
v = g.vertices.copy()
v[:, :2] += np.random.default_rng(0).uniform(-0.3, 0.3, (v.shape[0], 2))
jit = TriangleMesh(v, g.faces)
s = [grid_index(61, 30, 30)]
curves = convergence_curve(jit, s, analytic_grid_distance(jit, s), epsilons=(1e-1, 1e-2, 1e-3, 1e-4))
for eps, cur in curves.items():
    print("eps %-6g rho %d K %d  MAPE at k=rho %.4f%%  final %.4f%%" % (
        eps, cur["rho"], cur["K"], cur["mape"][cur["rho"] - 1], cur["mape"][-1]))
    write_rows_csv(out / f"convergence_{eps:g}.csv", ["k", "mape"], zip(cur["k"], cur["mape"]))
