"""P1 stiffness and mass matrices with Dirichlet elimination."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..coefficients import EllipticityMatrix, MatrixField
from ..errors import AssemblyError
from .mesh import TriangleMesh

_LOCAL_MASS = (np.ones((3, 3)) + np.eye(3)) / 12.0


@dataclass
class SparseSystem:
    """Generalized eigenproblem ``K x = lambda M x`` on the interior vertices.

    The pre-elimination matrices are kept as ``full_stiffness`` and
    ``full_mass``; ``interior_index`` maps rows back to mesh vertices.
    """

    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    n_interior: int
    interior_index: np.ndarray
    full_stiffness: sp.csr_matrix
    full_mass: sp.csr_matrix
    mesh: TriangleMesh


def _coefficients(A_field, centroids):
    if A_field is None:
        one = np.ones(centroids.shape)
        return one, 0 * one, one
    if isinstance(A_field, EllipticityMatrix):
        A_field = MatrixField.constant(A_field)
    if isinstance(A_field, MatrixField):
        return A_field.evaluate(centroids)
    mats = [A_field(z) for z in centroids]
    return (np.array([m.a11 for m in mats]), np.array([m.a12 for m in mats]),
            np.array([m.a22 for m in mats]))


def _weights(mass_weight, centroids):
    if mass_weight is None:
        return np.ones(centroids.shape)
    w = np.asarray(mass_weight(centroids), dtype=float)
    return np.broadcast_to(w, centroids.shape).astype(float)


def assemble(m: TriangleMesh, A_field=None, mass_weight=None) -> SparseSystem:
    """Assemble the A-weighted stiffness and weighted consistent mass matrices.

    Coefficients are frozen at triangle centroids. ``A_field`` may be ``None``
    (identity), an :class:`EllipticityMatrix`, a :class:`MatrixField`, or any
    callable returning an :class:`EllipticityMatrix` at a point.
    ``mass_weight`` must accept an array of complex points.
    """
    c = m.centroids()
    a11, a12, a22 = _coefficients(A_field, c)
    bad = ~((a11 > 0) & (a11 * a22 - a12 * a12 > 0) & np.isfinite(a11 * a22))
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise AssemblyError(
            f"coefficient not positive definite on triangle {k} "
            f"(vertices {m.triangles[k].tolist()}, centroid {c[k]:.6g})"
        )
    w = _weights(mass_weight, c)
    if np.any(~(w > 0)):
        k = int(np.flatnonzero(~(w > 0))[0])
        raise AssemblyError(f"mass weight not positive on triangle {k} (centroid {c[k]:.6g})")

    p = m.vertices[m.triangles]
    x, y = p[..., 0], p[..., 1]
    # gradients of the barycentric coordinates, times twice the area
    gx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    gy = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area2 = x[:, 1] * y[:, 2] - x[:, 2] * y[:, 1] + x[:, 2] * y[:, 0] - x[:, 0] * y[:, 2] \
        + x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0]
    area = 0.5 * area2

    Agx = a11[:, None] * gx + a12[:, None] * gy
    Agy = a12[:, None] * gx + a22[:, None] * gy
    Ke = (Agx[:, :, None] * gx[:, None, :] + Agy[:, :, None] * gy[:, None, :]) / (4.0 * area[:, None, None])
    Me = (w * area)[:, None, None] * _LOCAL_MASS

    n = m.n_vertices
    rows = np.repeat(m.triangles, 3, axis=1).ravel()
    cols = np.tile(m.triangles, (1, 3)).ravel()
    K = sp.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((Me.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    # exact symmetrization: summation order of duplicates can differ per triangle
    K = 0.5 * (K + K.T)
    M = 0.5 * (M + M.T)

    interior = np.flatnonzero(~m.boundary)
    return SparseSystem(
        stiffness=K[interior][:, interior].tocsr(),
        mass=M[interior][:, interior].tocsr(),
        n_interior=len(interior),
        interior_index=interior,
        full_stiffness=K,
        full_mass=M,
        mesh=m,
    )
