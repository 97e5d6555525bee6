"""Mesh readers/writers and distance-map exporters.

Inputs: ASCII OFF and OBJ (``v``/``f`` records only, triangles only).
Outputs: OFF/OBJ (full precision), vertex-coloured PLY, CSV.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .mesh import MeshParseError, MeshValidationError, TriangleMesh


def load_mesh(path, format: str | None = None) -> TriangleMesh:
    path = Path(path)
    fmt = (format or path.suffix.lstrip(".")).upper()
    text = path.read_text()
    if fmt == "OFF":
        return parse_off(text)
    if fmt == "OBJ":
        return parse_obj(text)
    raise MeshParseError(f"unsupported mesh format {fmt!r} (expected OFF or OBJ)")


def _tokens(text: str):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield from line.split()


def parse_off(text: str) -> TriangleMesh:
    tok = _tokens(text)
    try:
        head = next(tok)
    except StopIteration:
        raise MeshParseError("empty OFF file") from None
    if head != "OFF":
        raise MeshParseError(f"expected 'OFF' header, got {head!r}")
    try:
        nv, nf, _ = [int(next(tok)) for _ in range(3)]
    except (StopIteration, ValueError):
        raise MeshParseError("malformed OFF counts line") from None
    if nv < 0 or nf < 0:
        raise MeshParseError("negative element count")
    verts = np.empty((nv, 3))
    for i in range(nv):
        try:
            verts[i] = [float(next(tok)) for _ in range(3)]
        except (StopIteration, ValueError):
            raise MeshParseError(f"malformed vertex {i}") from None
    faces = np.empty((nf, 3), dtype=np.int64)
    for i in range(nf):
        try:
            k = int(next(tok))
        except (StopIteration, ValueError):
            raise MeshParseError(f"malformed face {i}") from None
        if k != 3:
            raise MeshValidationError(f"face {i} has {k} vertices; only triangles are supported", i)
        try:
            faces[i] = [int(next(tok)) for _ in range(3)]
        except (StopIteration, ValueError):
            raise MeshParseError(f"malformed face {i}") from None
    return TriangleMesh(verts, faces)


def parse_obj(text: str) -> TriangleMesh:
    verts, faces = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        kind = parts[0]
        if kind == "v":
            try:
                verts.append([float(x) for x in parts[1:4]])
            except ValueError:
                raise MeshParseError(f"malformed vertex on line {lineno}") from None
            if len(parts) < 4:
                raise MeshParseError(f"malformed vertex on line {lineno}")
        elif kind == "f":
            if len(parts) != 4:
                raise MeshValidationError(
                    f"face {len(faces)} has {len(parts) - 1} vertices; only triangles are supported", len(faces))
            try:
                idx = [int(p.split("/")[0]) for p in parts[1:]]
            except ValueError:
                raise MeshParseError(f"malformed face on line {lineno}") from None
            if any(i < 1 for i in idx):
                raise MeshValidationError(f"index out of range in face {len(faces)}", len(faces))
            faces.append([i - 1 for i in idx])
    return TriangleMesh(np.array(verts, dtype=np.float64).reshape(-1, 3),
                        np.array(faces, dtype=np.int64).reshape(-1, 3))


def write_off(mesh: TriangleMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"OFF\n{mesh.n_vertices} {mesh.n_faces} 0\n")
        for x, y, z in mesh.vertices.tolist():
            fh.write(f"{x!r} {y!r} {z!r}\n")
        for a, b, c in mesh.faces.tolist():
            fh.write(f"3 {a} {b} {c}\n")


def write_obj(mesh: TriangleMesh, path) -> None:
    with open(path, "w") as fh:
        for x, y, z in mesh.vertices.tolist():
            fh.write(f"v {x!r} {y!r} {z!r}\n")
        for a, b, c in (mesh.faces + 1).tolist():
            fh.write(f"f {a} {b} {c}\n")


def distance_colors(values) -> np.ndarray:
    """Blue-green-red ramp as ``(n, 3)`` uint8.

    ``u = d / d_max`` clamped to ``[0, 1]`` (non-finite entries map to 1);
    R = round(255 u), G = round(255 (1 - |2u - 1|)), B = round(255 (1 - u)).
    Rounding is half-up so that u = 0.5 gives (128, 255, 128).
    """
    d = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(d)
    dmax = d[finite].max() if finite.any() else 0.0
    u = np.ones_like(d)
    if dmax > 0:
        u[finite] = np.clip(d[finite] / dmax, 0.0, 1.0)
    else:
        u[finite] = 0.0
    rgb = np.column_stack([255.0 * u, 255.0 * (1.0 - np.abs(2.0 * u - 1.0)), 255.0 * (1.0 - u)])
    return np.floor(rgb + 0.5).astype(np.uint8)


def label_colors(labels) -> np.ndarray:
    """Deterministic RGB per label via a 32-bit integer hash (lowbias32 mixer).

    ``h = x + 1; h ^= h >> 16; h *= 0x7feb352d; h ^= h >> 15; h *= 0x846ca68b;
    h ^= h >> 16`` (mod 2**32); R, G, B are bytes 0, 1, 2 of ``h``.  Label -1
    (unlabelled) is drawn black.
    """
    lab = np.asarray(labels, dtype=np.int64)
    h = (lab + 1).astype(np.uint64) & 0xFFFFFFFF
    h ^= h >> 16
    h = (h * 0x7FEB352D) & 0xFFFFFFFF
    h ^= h >> 15
    h = (h * 0x846CA68B) & 0xFFFFFFFF
    h ^= h >> 16
    rgb = np.column_stack([h & 0xFF, (h >> 8) & 0xFF, (h >> 16) & 0xFF]).astype(np.uint8)
    rgb[lab < 0] = 0
    return rgb


def write_colored_ply(mesh: TriangleMesh, colors: np.ndarray, path, binary: bool = False) -> None:
    colors = np.asarray(colors, dtype=np.uint8)
    if colors.shape != (mesh.n_vertices, 3):
        raise ValueError("need one RGB triple per vertex")
    header = (
        "ply\n"
        f"format {'binary_little_endian' if binary else 'ascii'} 1.0\n"
        f"element vertex {mesh.n_vertices}\n"
        "property float x\nproperty float y\nproperty float z\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\n"
        f"element face {mesh.n_faces}\n"
        "property list uchar int vertex_indices\n"
        "end_header\n"
    )
    if binary:
        vdt = np.dtype([("p", "<f4", 3), ("c", "u1", 3)])
        vrec = np.empty(mesh.n_vertices, dtype=vdt)
        vrec["p"] = mesh.vertices
        vrec["c"] = colors
        fdt = np.dtype([("k", "u1"), ("i", "<i4", 3)])
        frec = np.empty(mesh.n_faces, dtype=fdt)
        frec["k"] = 3
        frec["i"] = mesh.faces
        with open(path, "wb") as fh:
            fh.write(header.encode("ascii"))
            fh.write(vrec.tobytes())
            fh.write(frec.tobytes())
        return
    with open(path, "w") as fh:
        fh.write(header)
        for (x, y, z), (r, g, b) in zip(mesh.vertices.astype(np.float32), colors):
            fh.write(f"{x} {y} {z} {r} {g} {b}\n")
        for a, b, c in mesh.faces:
            fh.write(f"3 {a} {b} {c}\n")


def write_distance_ply(mesh: TriangleMesh, dist, path, binary: bool = False) -> None:
    values = getattr(dist, "values", dist)
    if len(values) != mesh.n_vertices:
        raise ValueError("distance map size does not match the mesh")
    write_colored_ply(mesh, distance_colors(values), path, binary=binary)


def write_label_ply(mesh: TriangleMesh, labels, path, binary: bool = False) -> None:
    write_colored_ply(mesh, label_colors(labels), path, binary=binary)


def _fmt(x: float) -> str:
    x = float(x)
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_distance_csv(dist, path) -> None:
    """Rows ``index,distance,label``; label -1 when the map carries no labels."""
    values = np.asarray(dist.values)
    labels = dist.labels if dist.labels is not None else np.full(values.size, -1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "distance", "label"])
        for i, (d, lab) in enumerate(zip(values.tolist(), np.asarray(labels).tolist())):
            w.writerow([i, _fmt(d), int(lab)])


def read_distance_csv(path):
    idx, dist, lab = [], [], []
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            idx.append(int(row[0]))
            dist.append(float(row[1]))
            lab.append(int(row[2]))
    return np.array(idx), np.array(dist), np.array(lab)


def write_rows_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) if isinstance(x, float) else x for x in row])


def ensure_parent(path) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
