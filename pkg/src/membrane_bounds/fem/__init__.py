"""Finite-element oracle for first Dirichlet eigenvalues."""

from .assembly import SparseSystem, assemble
from .eigen import EigenResult, smallest_eigenvalue
from .mesh import TriangleMesh, refine, triangulate
from .study import (
    ConvergenceTable,
    ReductionReport,
    lambda1_estimate,
    richardson,
    weighted_reduction_check,
)

__all__ = [
    "ConvergenceTable",
    "EigenResult",
    "ReductionReport",
    "SparseSystem",
    "TriangleMesh",
    "assemble",
    "lambda1_estimate",
    "refine",
    "richardson",
    "smallest_eigenvalue",
    "triangulate",
    "weighted_reduction_check",
]
