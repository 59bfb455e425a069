"""Conforming triangle meshes of catalog domains.

Triangles and quadrilaterals get structured meshes; everything else is
meshed by a constrained Delaunay triangulation of a boundary polygon plus an
interior triangular lattice. Curved boundaries keep a parameter value on
every boundary vertex so that refinement can project new midpoints back onto
the true curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import triangle as tr
from scipy.spatial import cKDTree

from ..domains import PlanarDomain, Polygon, polygon_area
from ..errors import MeshingError, ParameterError

H_SLACK = 1.5


@dataclass
class TriangleMesh:
    """Vertices ``(N, 2)``, counterclockwise triangles ``(T, 3)``, boundary flags.

    ``params`` holds the boundary-curve parameter of each boundary vertex of a
    curved domain (NaN elsewhere); ``domain`` is kept for refinement.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    params: np.ndarray | None = None
    domain: PlanarDomain | None = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def area(self) -> float:
        return float(np.sum(self.signed_areas()))

    def edges(self):
        """Unique sorted edges and, per triangle, the index of each local edge.

        Local edge ``k`` joins local vertices ``k`` and ``(k + 1) % 3``.
        """
        t = self.triangles
        all_edges = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1).reshape(-1, 2)
        all_edges = np.sort(all_edges, axis=1)
        uniq, inverse, counts = np.unique(all_edges, axis=0, return_inverse=True, return_counts=True)
        return uniq, inverse.reshape(-1, 3), counts

    @property
    def h_max(self) -> float:
        e, _, _ = self.edges()
        d = self.vertices[e[:, 1]] - self.vertices[e[:, 0]]
        return float(np.sqrt(np.max(np.sum(d * d, axis=1))))

    def topological_boundary(self) -> np.ndarray:
        """Flags of vertices lying on edges that belong to exactly one triangle."""
        e, _, counts = self.edges()
        flags = np.zeros(self.n_vertices, dtype=bool)
        flags[e[counts == 1].ravel()] = True
        return flags

    def centroids(self) -> np.ndarray:
        c = self.vertices[self.triangles].mean(axis=1)
        return c[:, 0] + 1j * c[:, 1]

    def to_text(self) -> str:
        lines = [f"v {x!r} {y!r} {int(b)}" for (x, y), b in zip(self.vertices.tolist(), self.boundary)]
        lines += [f"t {i} {j} {k}" for i, j, k in self.triangles.tolist()]
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "TriangleMesh":
        verts, flags, tris = [], [], []
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append((float(parts[1]), float(parts[2])))
                flags.append(bool(int(parts[3])))
            elif parts[0] == "t":
                tris.append(tuple(int(p) for p in parts[1:4]))
            else:
                raise ValueError(f"unrecognized mesh line: {line!r}")
        return cls(np.array(verts, dtype=float), np.array(tris, dtype=np.int64),
                   np.array(flags, dtype=bool))


def _complex_to_xy(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.column_stack([z.real, z.imag])


def _orient(vertices, triangles):
    p = vertices[triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    neg = (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) < 0
    triangles = triangles.copy()
    triangles[neg] = triangles[neg][:, [0, 2, 1]]
    return triangles


def _structured_triangle(verts: np.ndarray, target_h: float):
    p0, p1, p2 = verts
    longest = max(abs(p1 - p0), abs(p2 - p1), abs(p0 - p2))
    n = max(1, int(math.ceil(longest / target_h - 1e-12)))
    idx = -np.ones((n + 1, n + 1), dtype=np.int64)
    pts = []
    for j in range(n + 1):
        for i in range(n + 1 - j):
            idx[i, j] = len(pts)
            pts.append(p0 + (i / n) * (p1 - p0) + (j / n) * (p2 - p0))
    tris = []
    for j in range(n):
        for i in range(n - j):
            tris.append((idx[i, j], idx[i + 1, j], idx[i, j + 1]))
            if i + j < n - 1:
                tris.append((idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]))
    return _complex_to_xy(pts), np.array(tris, dtype=np.int64)


def _is_convex(v: np.ndarray) -> bool:
    e = np.roll(v, -1) - v
    cross = (np.conj(e) * np.roll(e, -1)).imag
    return bool(np.all(cross > 0))


def _structured_quad(verts: np.ndarray, target_h: float):
    p0, p1, p2, p3 = verts
    nx = max(1, int(math.ceil(max(abs(p1 - p0), abs(p2 - p3)) / target_h - 1e-12)))
    ny = max(1, int(math.ceil(max(abs(p3 - p0), abs(p2 - p1)) / target_h - 1e-12)))
    while True:
        s = np.arange(nx + 1) / nx
        t = np.arange(ny + 1) / ny
        S, T = np.meshgrid(s, t, indexing="ij")
        Z = (1 - S) * (1 - T) * p0 + S * (1 - T) * p1 + S * T * p2 + (1 - S) * T * p3
        idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
        a = idx[:-1, :-1].ravel()
        b = idx[1:, :-1].ravel()
        c = idx[1:, 1:].ravel()
        d = idx[:-1, 1:].ravel()
        z = Z.ravel()
        use_ac = np.abs(z[c] - z[a]) <= np.abs(z[d] - z[b])
        tris = np.where(use_ac[:, None],
                        np.column_stack([a, b, c, a, c, d]),
                        np.column_stack([a, b, d, b, c, d])).reshape(-1, 3)
        mesh_h = max(np.abs(z[b] - z[a]).max(), np.abs(z[d] - z[a]).max(),
                     np.minimum(np.abs(z[c] - z[a]), np.abs(z[d] - z[b])).max(),
                     np.abs(z[c] - z[b]).max(), np.abs(z[c] - z[d]).max())
        if mesh_h <= H_SLACK * target_h:
            return _complex_to_xy(z), tris
        nx, ny = 2 * nx, 2 * ny


def _lattice(domain, boundary_pts, spacing):
    x0, x1, y0, y1 = domain.bbox()
    dy = spacing * math.sqrt(3) / 2
    rows = np.arange(y0 + 0.5 * dy, y1, dy)
    pts = []
    for k, y in enumerate(rows):
        shift = 0.5 * spacing * (k % 2)
        xs = np.arange(x0 + 0.5 * spacing + shift, x1, spacing)
        pts.append(xs + 1j * y)
    if not pts:
        return np.empty(0, dtype=complex)
    z = np.concatenate(pts)
    z = z[domain.contains(z)]
    if z.size == 0:
        return z
    dense = boundary_pts
    tree = cKDTree(_complex_to_xy(dense))
    dist, _ = tree.query(_complex_to_xy(z))
    return z[dist >= 0.55 * spacing]


def _dense_boundary(domain, spacing):
    if isinstance(domain, Polygon):
        v = domain.vertices
        out = []
        for a, b in zip(v, np.roll(v, -1)):
            k = max(1, int(math.ceil(abs(b - a) / spacing)))
            out.append(a + (b - a) * np.arange(k) / k)
        return np.concatenate(out), None
    return domain.boundary_samples(spacing)


def _delaunay(domain: PlanarDomain, target_h: float):
    spacing = target_h
    for _ in range(8):
        bpts, params = _dense_boundary(domain, spacing)
        if domain.curved:
            defect = abs(domain.area - polygon_area(bpts))
            refine_boundary = defect >= (spacing * 0.9) ** 2
        else:
            refine_boundary = False
        if refine_boundary:
            spacing *= 0.8
            continue
        fine, _ = _dense_boundary(domain, spacing / 8)
        interior = _lattice(domain, fine, spacing)
        nb = len(bpts)
        seg = np.column_stack([np.arange(nb), (np.arange(nb) + 1) % nb])
        pts = np.concatenate([bpts, interior])
        try:
            out = tr.triangulate({"vertices": _complex_to_xy(pts), "segments": seg}, "pQ")
        except Exception as exc:  # the C library raises bare RuntimeErrors
            raise MeshingError(f"triangulation failed: {exc}") from exc
        if "triangles" not in out or len(out["vertices"]) != len(pts):
            raise MeshingError("triangulator inserted unexpected vertices")
        verts = np.asarray(out["vertices"], dtype=float)
        tris = _orient(verts, np.asarray(out["triangles"], dtype=np.int64))
        all_params = None
        if params is not None:
            all_params = np.full(len(verts), np.nan)
            all_params[:nb] = params
        mesh = TriangleMesh(verts, tris, np.zeros(len(verts), bool), all_params, domain)
        if mesh.h_max <= H_SLACK * target_h:
            return mesh
        spacing *= 0.85
    raise MeshingError(f"could not reach h_max <= {H_SLACK} * {target_h}")


def triangulate(d: PlanarDomain, target_h: float) -> TriangleMesh:
    """Conforming mesh of ``d`` with ``h_max <= 1.5 * target_h``."""
    if not target_h > 0:
        raise ParameterError(f"target_h = {target_h!r} must be positive")
    if target_h >= d.diameter:
        raise ParameterError(f"target_h = {target_h} is not below the domain diameter {d.diameter:.4g}")
    if isinstance(d, Polygon) and len(d.vertices) == 3:
        verts, tris = _structured_triangle(d.vertices, target_h)
        mesh = TriangleMesh(verts, tris, np.zeros(len(verts), bool), None, d)
    elif isinstance(d, Polygon) and len(d.vertices) == 4 and _is_convex(d.vertices):
        verts, tris = _structured_quad(d.vertices, target_h)
        mesh = TriangleMesh(verts, tris, np.zeros(len(verts), bool), None, d)
    else:
        mesh = _delaunay(d, target_h)
    mesh.triangles = _orient(mesh.vertices, mesh.triangles)
    if np.any(mesh.signed_areas() <= 0):
        raise MeshingError("degenerate triangle in initial mesh")
    mesh.boundary = mesh.topological_boundary()
    return mesh


def refine(m: TriangleMesh) -> TriangleMesh:
    """Split every triangle into four at the edge midpoints.

    On curved domains, midpoints of boundary edges are moved onto the true
    boundary curve.
    """
    edges, local, counts = m.edges()
    nv = m.n_vertices
    mid = 0.5 * (m.vertices[edges[:, 0]] + m.vertices[edges[:, 1]])
    on_boundary = counts == 1
    mid_params = None
    if m.params is not None:
        mid_params = np.full(len(edges), np.nan)
    curved = m.domain is not None and m.domain.curved and m.params is not None
    if curved:
        be = edges[on_boundary]
        ta, tb = m.params[be[:, 0]], m.params[be[:, 1]]
        if np.any(np.isnan(ta)) or np.any(np.isnan(tb)):
            raise MeshingError("boundary vertex without a curve parameter")
        t = m.domain.param_midpoint(ta, tb)
        mid[on_boundary] = _complex_to_xy(m.domain.boundary_point(t))
        mid_params[on_boundary] = t
    verts = np.concatenate([m.vertices, mid])
    e = local + nv
    t = m.triangles
    tris = np.concatenate([
        np.column_stack([t[:, 0], e[:, 0], e[:, 2]]),
        np.column_stack([t[:, 1], e[:, 1], e[:, 0]]),
        np.column_stack([t[:, 2], e[:, 2], e[:, 1]]),
        np.column_stack([e[:, 0], e[:, 1], e[:, 2]]),
    ])
    boundary = np.concatenate([m.boundary, on_boundary])
    params = None if m.params is None else np.concatenate([m.params, mid_params])
    out = TriangleMesh(verts, tris, boundary, params, m.domain)
    if np.any(out.signed_areas() <= 0):
        raise MeshingError("boundary projection inverted a triangle during refinement")
    return out
