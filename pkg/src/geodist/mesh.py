"""Triangle mesh container and compact half-edge connectivity.

Half-edge ``h`` of face ``f`` at corner ``c`` is stored implicitly as
``h = 3 * f + c``; its origin is ``faces[f, c]`` and its successor inside the
face is ``3 * f + (c + 1) % 3``.  Only the opposite table and one outgoing
half-edge per vertex are materialised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

BOUNDARY = -1


class MeshError(ValueError):
    """Base class for invalid mesh input."""


class MeshParseError(MeshError):
    pass


class MeshValidationError(MeshError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NonManifoldError(MeshError):
    def __init__(self, message: str, edge: tuple[int, int] | None = None, vertex: int | None = None):
        super().__init__(message)
        self.edge = edge
        self.vertex = vertex


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Vertex positions ``(n, 3)`` and face index triples ``(m, 3)``.

    Arrays are copied, validated and made read-only on construction.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=np.float64, copy=True)
        f = np.array(self.faces, dtype=np.int64, copy=True)
        if v.size == 0:
            v = v.reshape(0, 3)
        if f.size == 0:
            f = f.reshape(0, 3)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshValidationError(f"vertices must have shape (n, 3), got {v.shape}")
        if f.ndim != 2 or f.shape[1] != 3:
            raise MeshValidationError(f"faces must have shape (m, 3), got {f.shape}")
        _validate(v, f)
        v.flags.writeable = False
        f.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_faces(self) -> int:
        return self.faces.shape[0]

    def edges(self) -> np.ndarray:
        """Unique undirected edges as ``(e, 2)`` with ``a < b``, lexicographically sorted."""
        f = self.faces
        a = f.reshape(-1)
        b = f[:, [1, 2, 0]].reshape(-1)
        n = self.n_vertices
        key = np.unique(np.minimum(a, b) * n + np.maximum(a, b))
        return np.column_stack([key // n, key % n])

    def face_angles(self) -> np.ndarray:
        """Interior angles ``(m, 3)`` in radians; column c is the angle at corner c."""
        p = self.vertices[self.faces]
        out = np.empty(self.faces.shape)
        for c in range(3):
            a = p[:, (c + 1) % 3] - p[:, c]
            b = p[:, (c + 2) % 3] - p[:, c]
            cos = np.einsum("ij,ij->i", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            out[:, c] = np.arccos(np.clip(cos, -1.0, 1.0))
        return out


def _validate(v: np.ndarray, f: np.ndarray) -> None:
    bad = np.flatnonzero(~np.isfinite(v).all(axis=1))
    if bad.size:
        raise MeshValidationError(f"non-finite coordinate in vertex {bad[0]}", int(bad[0]))
    if f.size == 0:
        return
    n = v.shape[0]
    bad = np.flatnonzero(((f < 0) | (f >= n)).any(axis=1))
    if bad.size:
        raise MeshValidationError(f"index out of range in face {bad[0]}", int(bad[0]))
    repeated = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 2] == f[:, 0])
    bad = np.flatnonzero(repeated)
    if bad.size:
        raise MeshValidationError(f"repeated vertex index in face {bad[0]}", int(bad[0]))
    zero = np.zeros(f.shape[0], dtype=bool)
    for c in range(3):
        zero |= (v[f[:, c]] == v[f[:, (c + 1) % 3]]).all(axis=1)
    bad = np.flatnonzero(zero)
    if bad.size:
        raise MeshValidationError(f"zero-length edge in face {bad[0]}", int(bad[0]))


@dataclass(frozen=True, eq=False)
class Connectivity:
    """Compact half-edge tables plus CSR adjacency used by the solvers.

    ``opposite[h]`` is the twin half-edge or ``BOUNDARY``.  ``outgoing[v]`` is a
    half-edge leaving ``v`` (for boundary vertices, the one that starts the open
    fan), or ``BOUNDARY`` for isolated vertices.

    ``adj_ptr``/``adj_idx`` list each vertex's neighbours in ascending order.
    ``corner_ptr``/``corner_other`` list, for each vertex, the two other
    vertices of every incident face (in face-winding order), ordered by face
    index.
    """

    faces: np.ndarray
    opposite: np.ndarray
    outgoing: np.ndarray
    adj_ptr: np.ndarray
    adj_idx: np.ndarray
    corner_ptr: np.ndarray
    corner_other: np.ndarray
    corner_face: np.ndarray
    n_vertices: int = field(default=0)

    @property
    def n_halfedges(self) -> int:
        return self.opposite.shape[0]

    def origin(self, h):
        return self.faces.reshape(-1)[h]

    @staticmethod
    def next(h):
        return h - h % 3 + (h + 1) % 3

    @staticmethod
    def prev(h):
        return h - h % 3 + (h + 2) % 3

    def dest(self, h):
        return self.origin(self.next(h))

    def neighbors(self, v: int) -> np.ndarray:
        return self.adj_idx[self.adj_ptr[v]:self.adj_ptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.adj_ptr)


def build_connectivity(mesh: TriangleMesh) -> Connectivity:
    """Build half-edge tables; raise :class:`NonManifoldError` on non-manifold input."""
    n = mesh.n_vertices
    f = mesh.faces
    m = f.shape[0]
    origin = f.reshape(-1)
    dest = f[:, [1, 2, 0]].reshape(-1)
    key = origin * n + dest

    order = np.argsort(key, kind="stable")
    sk = key[order]
    dup = np.flatnonzero(sk[1:] == sk[:-1])
    if dup.size:
        h = order[dup[0]]
        a, b = int(origin[h]), int(dest[h])
        raise NonManifoldError(
            f"non-manifold edge ({min(a, b)}, {max(a, b)}): shared by faces with the same orientation "
            "or by more than two faces",
            edge=(min(a, b), max(a, b)),
        )

    twin = dest * n + origin
    pos = np.searchsorted(sk, twin)
    pos = np.minimum(pos, max(sk.size - 1, 0))
    found = sk[pos] == twin if sk.size else np.zeros(0, dtype=bool)
    opposite = np.where(found, order[pos] if sk.size else pos, BOUNDARY).astype(np.int64)

    hs = np.arange(3 * m, dtype=np.int64)
    outgoing = np.full(n, BOUNDARY, dtype=np.int64)
    outgoing[origin] = hs
    prev = hs - hs % 3 + (hs + 2) % 3
    fan_start = hs[opposite[prev] == BOUNDARY]
    outgoing[origin[fan_start]] = fan_start

    incident = np.bincount(origin, minlength=n)
    walked = _star_face_counts(origin, opposite, outgoing)
    bad = np.flatnonzero(walked != incident)
    if bad.size:
        raise NonManifoldError(f"non-manifold vertex {bad[0]}: incident faces form more than one fan",
                               vertex=int(bad[0]))

    edges = mesh.edges()
    both = np.unique(np.concatenate([edges[:, 0] * n + edges[:, 1], edges[:, 1] * n + edges[:, 0]]))
    adj_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(both // n, minlength=n), out=adj_ptr[1:])
    adj_idx = both % n

    corner_order = np.argsort(origin, kind="stable")
    corner_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(incident, out=corner_ptr[1:])
    corner_face = corner_order // 3
    c = corner_order % 3
    corner_other = np.stack([f[corner_face, (c + 1) % 3], f[corner_face, (c + 2) % 3]], axis=1)

    tables = dict(
        faces=f, opposite=opposite, outgoing=outgoing, adj_ptr=adj_ptr, adj_idx=adj_idx,
        corner_ptr=corner_ptr, corner_other=np.ascontiguousarray(corner_other),
        corner_face=np.ascontiguousarray(corner_face),
    )
    for arr in tables.values():
        arr.flags.writeable = False
    return Connectivity(**tables, n_vertices=n)


@numba.njit
def _star_face_counts(origin, opposite, outgoing):
    n = outgoing.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for v in range(n):
        h0 = outgoing[v]
        if h0 < 0:
            continue
        h = h0
        count = 0
        while True:
            count += 1
            o = opposite[h]
            if o < 0:
                break
            h = o - o % 3 + (o + 1) % 3
            if h == h0 or count > origin.shape[0]:
                break
        out[v] = count
    return out


def vertex_star(conn: Connectivity, v: int) -> list[tuple[int, int]]:
    """Rotationally ordered ``(neighbor, face)`` pairs around ``v``.

    The walk follows ``next(opposite(h))``; each pair holds the far end of the
    current half-edge and the face that half-edge belongs to.  For a boundary
    vertex the fan is open, so the first neighbour (the one across the leading
    boundary edge) has no face of its own and is paired with ``-1``.
    """
    if not 0 <= v < conn.n_vertices:
        raise IndexError(f"vertex {v} out of range")
    h0 = int(conn.outgoing[v])
    if h0 < 0:
        return []
    star = []
    if conn.opposite[conn.prev(h0)] == BOUNDARY:
        star.append((int(conn.origin(conn.prev(h0))), BOUNDARY))
    h = h0
    while True:
        star.append((int(conn.dest(h)), h // 3))
        o = int(conn.opposite[h])
        if o < 0:
            break
        h = conn.next(o)
        if h == h0:
            break
    return star


def degree_histogram(conn: Connectivity) -> dict[int, int]:
    deg, count = np.unique(conn.degrees(), return_counts=True)
    return {int(d): int(c) for d, c in zip(deg, count)}


def permute_vertices(mesh: TriangleMesh, new_to_old: np.ndarray) -> TriangleMesh:
    """Mesh whose vertex ``p`` is the old vertex ``new_to_old[p]``; faces keep their order."""
    new_to_old = np.asarray(new_to_old, dtype=np.int64)
    old_to_new = np.empty_like(new_to_old)
    old_to_new[new_to_old] = np.arange(new_to_old.size)
    return TriangleMesh(mesh.vertices[new_to_old], old_to_new[mesh.faces])
