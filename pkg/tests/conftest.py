import sys

import numpy as np
import pytest

from geodist.generators import generate_cylinder, generate_grid, generate_icosphere
from geodist.mesh import TriangleMesh, build_connectivity


def jittered_grid(n=41, amount=0.3, seed=1):
    g = generate_grid(n, n)
    v = g.vertices.copy()
    v[:, :2] += np.random.default_rng(seed).uniform(-amount, amount, (v.shape[0], 2))
    return TriangleMesh(v, g.faces)


def single_triangle():
    return TriangleMesh(np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0]]), np.array([[0, 1, 2]]))


def bfs_layers(mesh, sources):
    """Plain-Python multi-source BFS over the edge graph."""
    nbrs = [set() for _ in range(mesh.n_vertices)]
    for a, b, c in mesh.faces.tolist():
        nbrs[a] |= {b, c}
        nbrs[b] |= {a, c}
        nbrs[c] |= {a, b}
    level = {int(s): 0 for s in sources}
    frontier = list(level)
    while frontier:
        nxt = []
        for u in frontier:
            for w in sorted(nbrs[u]):
                if w not in level:
                    level[w] = level[u] + 1
                    nxt.append(w)
        frontier = nxt
    return level


SMALL_MESHES = {
    "grid33": lambda: generate_grid(33, 33),
    "shear34": lambda: generate_grid(34, 34, 2.0),
    "ico3": lambda: generate_icosphere(3),
    "cyl": lambda: generate_cylinder(24, 40),
}


@pytest.fixture(scope="session")
def small_meshes():
    return {k: (f(), build_connectivity(f())) for k, f in SMALL_MESHES.items()}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES):
            terminalreporter.write_line(line)
