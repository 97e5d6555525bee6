import numpy as np
import pytest

from geodist.generators import generate_cylinder, generate_grid, generate_icosphere, grid_index
from geodist.mesh import (
    BOUNDARY, MeshValidationError, NonManifoldError, TriangleMesh, build_connectivity,
    degree_histogram, permute_vertices, vertex_star,
)

from conftest import single_triangle


def faces_by_scan(mesh, v):
    """Brute-force incident faces and neighbours of ``v``."""
    inc = [i for i, f in enumerate(mesh.faces.tolist()) if v in f]
    nb = {u for i in inc for u in mesh.faces[i].tolist() if u != v}
    return set(inc), nb


def check_invariants(mesh):
    conn = build_connectivity(mesh)
    h = np.arange(conn.n_halfedges)
    assert np.array_equal(conn.next(conn.next(conn.next(h))), h)
    twin = conn.opposite
    inner = twin != BOUNDARY
    assert np.array_equal(twin[twin[inner]], h[inner])
    # twins run in opposite directions
    assert np.array_equal(conn.origin(twin[inner]), conn.dest(h[inner]))
    for v in range(mesh.n_vertices):
        star = vertex_star(conn, v)
        faces = [f for _, f in star if f != BOUNDARY]
        inc, nb = faces_by_scan(mesh, v)
        assert len(faces) == len(set(faces)) and set(faces) == inc
        assert {u for u, _ in star} == nb
        assert set(conn.neighbors(v).tolist()) == nb
    return conn


@pytest.mark.parametrize("make", [
    single_triangle,
    lambda: generate_grid(4, 3),
    lambda: generate_grid(5, 4, 2.0),
    lambda: generate_icosphere(1),
    lambda: generate_cylinder(5, 4),
])
def test_connectivity_invariants(make):
    check_invariants(make())


def test_single_triangle_all_boundary():
    conn = build_connectivity(single_triangle())
    assert conn.n_halfedges == 3
    assert np.all(conn.opposite == BOUNDARY)
    star = vertex_star(conn, 0)
    assert {u for u, _ in star} == {1, 2}
    assert {f for _, f in star if f >= 0} == {0}


def test_two_triangles_pair_once():
    m = TriangleMesh(np.array([[0.0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]), np.array([[0, 1, 2], [0, 2, 3]]))
    conn = build_connectivity(m)
    paired = np.flatnonzero(conn.opposite != BOUNDARY)
    assert paired.size == 2
    a, b = paired
    assert conn.opposite[a] == b and conn.opposite[b] == a


def test_three_faces_on_one_edge():
    v = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1]])
    f = np.array([[0, 1, 2], [1, 0, 3], [0, 1, 4]])
    with pytest.raises(NonManifoldError) as err:
        build_connectivity(TriangleMesh(v, f))
    assert set(err.value.edge) == {0, 1}


def test_same_orientation_duplicate_edge():
    v = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [0, -1, 0]])
    with pytest.raises(NonManifoldError):
        build_connectivity(TriangleMesh(v, np.array([[0, 1, 2], [0, 1, 3]])))


def test_bowtie_vertex_rejected():
    v = np.array([[0.0, 0, 0], [1, 0, 0], [1, 1, 0], [-1, 0, 0], [-1, -1, 0]])
    with pytest.raises(NonManifoldError):
        build_connectivity(TriangleMesh(v, np.array([[0, 1, 2], [0, 3, 4]])))


@pytest.mark.parametrize("v,f", [
    ([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 5]]),
    ([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 1]]),
    ([[0, 0, 0], [0, 0, 0], [0, 1, 0]], [[0, 1, 2]]),
    ([[0, 0, np.nan], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]]),
])
def test_invalid_meshes(v, f):
    with pytest.raises(MeshValidationError):
        TriangleMesh(np.array(v, dtype=float), np.array(f))


def test_mesh_is_read_only():
    m = single_triangle()
    with pytest.raises(ValueError):
        m.vertices[0, 0] = 5.0


def test_grid_stars():
    m = generate_grid(5, 5)
    conn = build_connectivity(m)
    inner = grid_index(5, 2, 2)
    star = vertex_star(conn, inner)
    assert len(star) == 6 and all(f >= 0 for _, f in star)
    # corners on the split diagonal see 3 neighbours, the others 2
    assert len(conn.neighbors(grid_index(5, 0, 0))) == 3
    assert len(conn.neighbors(grid_index(5, 4, 0))) == 2
    assert len(conn.neighbors(grid_index(5, 4, 4))) == 3
    assert len(conn.neighbors(grid_index(5, 0, 4))) == 2


def test_grid_generator():
    m = generate_grid(2, 2)
    assert (m.n_vertices, m.n_faces) == (4, 2)
    m = generate_grid(4, 3, 0.5)
    assert np.allclose(m.vertices[grid_index(4, 2, 1)], [2.5, 1.0, 0.0])
    assert np.degrees(generate_grid(12, 12).face_angles()).max() <= 90 + 1e-9
    assert np.degrees(generate_grid(3, 3, 2.0).face_angles()).max() > 90


@pytest.mark.slow
def test_million_vertex_grid_size():
    assert generate_grid(1001, 1001).n_vertices == 1002001


@pytest.mark.parametrize("k,nv,nf", [(0, 12, 20), (1, 42, 80), (3, 642, 1280)])
def test_icosphere_counts(k, nv, nf):
    m = generate_icosphere(k)
    assert (m.n_vertices, m.n_faces) == (nv, nf)
    assert m.n_vertices == m.n_faces // 2 + 2
    assert np.allclose(np.linalg.norm(m.vertices, axis=1), 1.0, rtol=1e-12, atol=0)
    assert np.array_equal(m.vertices[0], [0.0, 0.0, 1.0])


def test_degree_histograms():
    assert degree_histogram(build_connectivity(single_triangle())) == {2: 3}
    assert degree_histogram(build_connectivity(generate_icosphere(0))) == {5: 12}
    h = degree_histogram(build_connectivity(generate_grid(20, 20)))
    assert max(h, key=h.get) == 6 and sum(h.values()) == 400


def test_cylinder_is_closed_around():
    m = generate_cylinder(8, 3)
    conn = check_invariants(m)
    assert set(degree_histogram(conn)) <= {4, 6}
    ring = np.linalg.norm(m.vertices[1] - m.vertices[0])
    assert ring == pytest.approx(1.0)


def test_permute_round_trip():
    m = generate_grid(4, 4)
    perm = np.random.default_rng(0).permutation(m.n_vertices)
    p = permute_vertices(m, perm)
    assert np.array_equal(p.vertices, m.vertices[perm])
    assert np.array_equal(perm[p.faces], m.faces)
