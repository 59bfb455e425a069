"""Smallest generalized eigenvalue by inverse power iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import splu

from ..errors import ConvergenceError
from .assembly import SparseSystem

MAX_ITER = 10_000


@dataclass(frozen=True)
class EigenResult:
    lambda1: float
    residual: float  # ||K x - lambda M x|| / ||x||_M
    h_max: float
    n_interior: int
    iterations: int
    vector: np.ndarray | None = None


def smallest_eigenvalue(s: SparseSystem, tol: float = 1e-10, max_iter: int = MAX_ITER,
                        x0: np.ndarray | None = None) -> EigenResult:
    """Inverse power iteration on ``K x = lambda M x``.

    Each step solves ``K y = M x`` with a sparse LU factorization computed
    once. Iteration stops when the Rayleigh quotient changes by at most
    ``tol * lambda`` and the residual certificate is at most ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if s.n_interior == 0:
        raise ConvergenceError("mesh has no interior vertices")
    K, M = s.stiffness, s.mass
    lu = splu(K.tocsc())
    x = np.ones(s.n_interior) if x0 is None else np.asarray(x0, dtype=float).copy()
    x /= np.sqrt(x @ (M @ x))
    lam_old = np.inf
    lam = float(x @ (K @ x))
    residual = np.inf
    for it in range(1, max_iter + 1):
        y = lu.solve(M @ x)
        x = y / np.sqrt(y @ (M @ y))
        Kx = K @ x
        lam_old, lam = lam, float(x @ Kx)
        residual = float(np.linalg.norm(Kx - lam * (M @ x)))
        if abs(lam - lam_old) <= tol * lam and residual <= tol:
            return EigenResult(lam, residual, s.mesh.h_max, s.n_interior, it, x)
    raise ConvergenceError(
        f"inverse iteration did not converge in {max_iter} steps "
        f"(lambda={lam:.12g}, residual={residual:.3e})",
        last=EigenResult(lam, residual, s.mesh.h_max, s.n_interior, max_iter, x),
    )
