import numpy as np
import pytest

from geodist.generators import generate_grid, generate_icosphere
from geodist.io import (
    distance_colors, label_colors, load_mesh, parse_obj, parse_off, read_distance_csv, write_colored_ply,
    write_distance_csv, write_distance_ply, write_obj, write_off,
)
from geodist.mesh import MeshParseError, MeshValidationError
from geodist.ptp import DistanceMap


def test_minimal_off():
    m = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2")
    assert (m.n_vertices, m.n_faces) == (3, 1)


def test_off_with_comments_and_blank_lines():
    m = parse_off("OFF # header\n\n3 1 0\n# a vertex\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")
    assert m.n_faces == 1


def test_minimal_obj():
    text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3\nf 1 3 4\n"
    m = parse_obj(text)
    assert (m.n_vertices, m.n_faces) == (4, 2)
    assert m.faces.min() == 0


def test_obj_slash_indices():
    m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1\n")
    assert m.faces.tolist() == [[0, 1, 2]]


def test_off_index_out_of_range():
    with pytest.raises(MeshValidationError) as err:
        parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5")
    assert err.value.index == 0


@pytest.mark.parametrize("text", [
    "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0",
])
def test_polygon_rejected_off(text):
    with pytest.raises(MeshValidationError):
        parse_off(text)


def test_polygon_rejected_obj():
    with pytest.raises(MeshValidationError):
        parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")


@pytest.mark.parametrize("text", ["", "PLY\n", "OFF\n3 1\n", "OFF\n3 1 0\n0 0\n", "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 x 2"])
def test_malformed_off(text):
    with pytest.raises(MeshParseError):
        parse_off(text)


def test_unknown_format(tmp_path):
    p = tmp_path / "m.stl"
    p.write_text("solid")
    with pytest.raises(MeshParseError):
        load_mesh(p)


@pytest.mark.parametrize("writer,suffix", [(write_off, ".off"), (write_obj, ".obj")])
def test_round_trip_bit_exact(tmp_path, writer, suffix):
    m = generate_icosphere(2)
    p = tmp_path / ("m" + suffix)
    writer(m, p)
    back = load_mesh(p)
    assert np.array_equal(back.vertices, m.vertices)
    assert np.array_equal(back.faces, m.faces)


def test_ramp_examples():
    c = distance_colors([0.0, 1.0, 2.0])
    assert c.tolist() == [[0, 0, 255], [128, 255, 128], [255, 0, 0]]
    # unreached vertices are drawn at the far end of the ramp
    assert distance_colors([0.0, np.inf, 1.0])[1].tolist() == [255, 0, 0]


def test_label_palette_is_deterministic():
    a = label_colors(np.arange(50))
    assert np.array_equal(a, label_colors(np.arange(50)))
    assert len({tuple(x) for x in a.tolist()}) == 50
    assert label_colors([-1]).tolist() == [[0, 0, 0]]


def _read_ply_ascii(path):
    lines = open(path).read().splitlines()
    end = lines.index("end_header")
    n = int(next(l for l in lines if l.startswith("element vertex")).split()[-1])
    return lines[:end], lines[end + 1:end + 1 + n]


def test_ply_ascii(tmp_path):
    m = generate_grid(3, 3)
    d = DistanceMap(np.arange(9, dtype=float), np.array([0]))
    p = tmp_path / "d.ply"
    write_distance_ply(m, d, p)
    header, rows = _read_ply_ascii(p)
    assert "property uchar red" in header and "element face 8" in header
    assert rows[0].split()[3:] == ["0", "0", "255"]
    assert rows[-1].split()[3:] == ["255", "0", "0"]


def test_ply_binary(tmp_path):
    m = generate_grid(3, 3)
    p = tmp_path / "b.ply"
    colors = np.tile(np.array([[1, 2, 3]], dtype=np.uint8), (9, 1))
    write_colored_ply(m, colors, p, binary=True)
    raw = p.read_bytes()
    head, body = raw.split(b"end_header\n", 1)
    assert b"binary_little_endian" in head
    vert = np.frombuffer(body[:9 * 15], dtype=np.dtype([("p", "<f4", 3), ("c", "u1", 3)]))
    assert np.array_equal(vert["p"], m.vertices.astype(np.float32))
    assert np.all(vert["c"] == [1, 2, 3])


def test_distance_csv(tmp_path):
    d = DistanceMap(np.array([0.0, 1.25, np.inf, 0.1]), np.array([0]))
    p = tmp_path / "d.csv"
    write_distance_csv(d, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "index,distance,label"
    assert lines[1] == "0,0.0,-1"
    assert lines[3] == "2,inf,-1"
    d.labels = np.array([0, 2, -1, 0])
    write_distance_csv(d, p)
    assert p.read_text().splitlines()[2] == "1,1.25,2"
    idx, dist, lab = read_distance_csv(p)
    assert np.array_equal(dist, d.values) and np.array_equal(lab, d.labels)
