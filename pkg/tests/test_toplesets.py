import numpy as np
import pytest

from geodist.generators import generate_grid, generate_icosphere, grid_index
from geodist.mesh import TriangleMesh, build_connectivity
from geodist.ptp import PtpConfig, ptp_run
from geodist.toplesets import (
    UNREACHED, check_sources, classify_sequences, compute_toplesets, reorder_for_bands, topleset_histogram,
    unpermute,
)

from conftest import bfs_layers, single_triangle


def layers_of(ordering):
    return {int(v): r for r in range(ordering.rho) for v in ordering.topleset(r)}


def test_single_triangle():
    o = compute_toplesets(build_connectivity(single_triangle()), [0])
    assert o.sorted.tolist() == [0, 1, 2]
    assert o.limits.tolist() == [0, 1, 3]
    assert o.rho == 2
    assert topleset_histogram(o).tolist() == [1, 2]


@pytest.mark.parametrize("mesh,sources", [
    (generate_grid(3, 3), [0]),
    (generate_grid(5, 5), [0, 24]),
    (generate_grid(7, 4, 2.0), [3, 20]),
    (generate_icosphere(2), [0, 5, 77]),
])
def test_matches_bruteforce_bfs(mesh, sources):
    conn = build_connectivity(mesh)
    o = compute_toplesets(conn, sources)
    assert layers_of(o) == bfs_layers(mesh, sources)
    assert o.sizes().sum() == mesh.n_vertices
    assert sorted(o.sources.tolist()) == sorted(sources)
    assert np.all(np.diff(o.limits) > 0)
    for r in range(o.rho):
        layer = o.topleset(r)
        assert np.all(np.diff(layer) > 0)  # ascending ties
    for v in range(mesh.n_vertices):
        r = o.level[v]
        nbr = o.level[conn.neighbors(v)]
        assert nbr.min() >= r - 1
        if r > 0:
            assert (nbr == r - 1).any()


def test_unreached_vertices_are_counted():
    v = np.array([[0.0, 0, 0], [1, 0, 0], [0, 1, 0], [5, 0, 0], [6, 0, 0], [5, 1, 0]])
    m = TriangleMesh(v, np.array([[0, 1, 2], [3, 4, 5]]))
    conn = build_connectivity(m)
    o = compute_toplesets(conn, [0])
    assert o.n_reached == 3 and o.n_unreached == 3
    assert np.all(o.inverse[3:] == UNREACHED)
    d, _ = ptp_run(m, conn, o, [0])
    assert np.all(np.isinf(d.values[3:])) and d.n_unreached == 3


@pytest.mark.parametrize("bad,exc", [([], ValueError), ([1, 1], ValueError), ([9], IndexError), ([-1], IndexError)])
def test_source_errors(bad, exc):
    with pytest.raises(exc):
        check_sources(bad, 9)
    with pytest.raises(exc):
        compute_toplesets(build_connectivity(generate_grid(3, 3)), bad)


def test_reorder_identity_when_already_sorted():
    m = single_triangle()
    conn = build_connectivity(m)
    o = compute_toplesets(conn, [0])
    pm, pc, po, perm = reorder_for_bands(m, conn, o)
    assert perm.tolist() == [0, 1, 2] and pm is m


def test_reorder_moves_source_first():
    m = single_triangle()
    conn = build_connectivity(m)
    pm, pc, po, perm = reorder_for_bands(m, conn, compute_toplesets(conn, [2]))
    assert perm[0] == 2
    assert np.array_equal(pm.vertices[0], m.vertices[2])
    assert po.is_identity()


@pytest.mark.parametrize("precision", ["double", "single"])
@pytest.mark.parametrize("mesh,sources", [
    (generate_grid(5, 5), [12]),
    (generate_grid(20, 17, 1.5), [40, 300]),
    (generate_icosphere(3), [7, 400, 2]),
])
def test_reorder_bit_identical(mesh, sources, precision):
    conn = build_connectivity(mesh)
    o = compute_toplesets(conn, sources)
    cfg = PtpConfig(precision=precision, labels=True)
    d0, t0 = ptp_run(mesh, conn, o, sources, cfg)
    pm, pc, po, perm = reorder_for_bands(mesh, conn, o)
    old_to_new = np.argsort(perm)
    psrc = old_to_new[sources]
    d1, t1 = ptp_run(pm, pc, po, psrc, cfg)
    assert np.array_equal(unpermute(d1.values, perm), d0.values)
    assert np.array_equal(unpermute(d1.labels, perm), d0.labels)
    assert t0.K == t1.K


@pytest.mark.parametrize("sizes,kinds", [
    ([1, 2, 3, 4], ["increasing"]),
    ([1, 3, 3, 3, 1], ["increasing", "stationary", "decreasing"]),
    ([4, 4, 4], ["stationary"]),
])
def test_classify(sizes, kinds):
    segs = classify_sequences(sizes)
    assert [s.kind for s in segs] == kinds
    assert segs[0].start == 0 and segs[-1].end == len(sizes) - 1
    for a, b in zip(segs, segs[1:]):
        assert b.start == a.end + 1


def test_classify_grid_from_centre():
    conn = build_connectivity(generate_grid(21, 21))
    segs = classify_sequences(compute_toplesets(conn, [grid_index(21, 10, 10)]))
    assert segs[0].kind == "increasing" and segs[-1].kind == "decreasing"


def test_classify_needs_two_layers():
    with pytest.raises(ValueError):
        classify_sequences([3])


def test_sphere_profile_rises_then_falls():
    sizes = compute_toplesets(build_connectivity(generate_icosphere(3)), [0]).sizes()
    peak = int(np.argmax(sizes))
    assert 0 < peak < sizes.size - 1
    assert sizes.sum() == 642


def test_rho_shrinks_with_more_sources():
    from geodist.sampling import fps
    m = generate_grid(61, 61)
    conn = build_connectivity(m)
    samples = fps(m, conn, 64, 0).samples
    rhos = [compute_toplesets(conn, samples[:k]).rho for k in (1, 4, 16, 64)]
    assert rhos == sorted(rhos, reverse=True) and rhos[0] > rhos[-1]
