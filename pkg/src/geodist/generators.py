"""Synthetic meshes with closed-form geodesics (flat grids, spheres) or simple topleset structure."""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh


def generate_grid(nx: int, ny: int, shear: float = 0.0) -> TriangleMesh:
    """Planar ``nx`` by ``ny`` grid with vertex ``i + nx * j`` at ``(i + shear * j, j, 0)``.

    Each unit quad is split along its ``(i, j) -> (i + 1, j + 1)`` diagonal.
    With ``shear = 0`` every triangle is right-angled; ``|shear| >= 1`` makes
    one family of triangles obtuse.
    """
    if nx < 2 or ny < 2:
        raise ValueError("grid needs nx >= 2 and ny >= 2")
    j, i = np.mgrid[0:ny, 0:nx]
    verts = np.column_stack([(i + shear * j).ravel(), j.ravel(), np.zeros(nx * ny)]).astype(np.float64)
    qi, qj = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1))
    a = (qi + nx * qj).ravel()
    b, c, d = a + 1, a + nx + 1, a + nx
    faces = np.empty((2 * a.size, 3), dtype=np.int64)
    faces[0::2] = np.column_stack([a, b, c])
    faces[1::2] = np.column_stack([a, c, d])
    return TriangleMesh(verts, faces)


def grid_index(nx: int, i: int, j: int) -> int:
    return i + nx * j


def generate_icosphere(subdiv: int) -> TriangleMesh:
    """Unit icosphere with ``20 * 4**subdiv`` faces; vertex 0 sits at the north pole ``(0, 0, 1)``."""
    if subdiv < 0:
        raise ValueError("subdiv must be >= 0")
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [[-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
         [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
         [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1]],
        dtype=np.float64,
    )
    faces = np.array(
        [[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
         [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
         [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
         [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]],
        dtype=np.int64,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    verts = verts @ _rotation_to_pole(verts[0]).T

    for _ in range(subdiv):
        verts, faces = _split(verts, faces)
    # the rotation leaves vertex 0 a few ulps off the pole
    verts[0] = (0.0, 0.0, 1.0)
    return TriangleMesh(verts, faces)


def _rotation_to_pole(u: np.ndarray) -> np.ndarray:
    """Rotation matrix taking unit vector ``u`` onto ``+z``."""
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(u, z)
    s = np.linalg.norm(axis)
    c = float(u @ z)
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    k = axis / s
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * kx + (1 - c) * (kx @ kx)


def _split(verts: np.ndarray, faces: np.ndarray):
    n = verts.shape[0]
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    e.sort(axis=1)
    uniq, inv = np.unique(e, axis=0, return_inverse=True)
    inv = inv.reshape(3, -1)
    mid = verts[uniq[:, 0]] + verts[uniq[:, 1]]
    mid /= np.linalg.norm(mid, axis=1, keepdims=True)
    m01, m12, m20 = (inv[k] + n for k in range(3))
    a, b, c = faces.T
    new_faces = np.concatenate([
        np.column_stack([a, m01, m20]),
        np.column_stack([b, m12, m01]),
        np.column_stack([c, m20, m12]),
        np.column_stack([m01, m12, m20]),
    ])
    return np.vstack([verts, mid]), new_faces


def generate_cylinder(n_around: int, n_along: int, radius: float | None = None,
                      spacing: float = 1.0) -> TriangleMesh:
    """Open cylinder made of ``n_along`` rings of ``n_around`` vertices.

    Ring ``j`` lies at height ``j * spacing``; vertex ``i + n_around * j``.
    Using the whole bottom ring as the source set gives equally sized
    toplesets (one ring each).  The default radius makes ring edges as long
    as the spacing.
    """
    if n_around < 3 or n_along < 2:
        raise ValueError("cylinder needs n_around >= 3 and n_along >= 2")
    if radius is None:
        radius = spacing / (2.0 * np.sin(np.pi / n_around))
    theta = 2.0 * np.pi * np.arange(n_around) / n_around
    j, i = np.mgrid[0:n_along, 0:n_around]
    verts = np.column_stack([
        radius * np.cos(theta[i.ravel()]),
        radius * np.sin(theta[i.ravel()]),
        spacing * j.ravel(),
    ])
    qi, qj = np.meshgrid(np.arange(n_around), np.arange(n_along - 1))
    qi, qj = qi.ravel(), qj.ravel()
    a = qi + n_around * qj
    b = (qi + 1) % n_around + n_around * qj
    c = b + n_around
    d = a + n_around
    faces = np.empty((2 * a.size, 3), dtype=np.int64)
    faces[0::2] = np.column_stack([a, b, c])
    faces[1::2] = np.column_stack([a, c, d])
    return TriangleMesh(verts, faces)
