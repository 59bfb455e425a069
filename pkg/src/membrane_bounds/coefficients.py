"""Pointwise algebra of ellipticity matrices and Beltrami coefficients.

A symmetric matrix ``A`` with ``det A = 1`` and the complex dilatation ``mu``
determine each other::

    mu = (a22 - a11 - 2i a12) / det(I + A)

    A = 1/(1 - |mu|^2) * [[|1 - mu|^2, -2 Im mu],
                          [-2 Im mu,   |1 + mu|^2]]

Everything here is a pure function of immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidDilatationError,
    InvalidMatrixError,
    OrientationError,
    StencilError,
)

DET_TOL = 1e-12
DET_RENORMALIZE_TOL = 1e-9
DEFAULT_STEP = 1e-5


@dataclass(frozen=True)
class EllipticityMatrix:
    """Symmetric positive definite 2x2 matrix with unit determinant.

    Only ``a11``, ``a12`` and ``a22`` are stored. Inputs whose determinant is
    within 1e-9 of one are rescaled by ``1/sqrt(det)``; anything further off
    raises :class:`InvalidMatrixError`.
    """

    a11: float
    a12: float
    a22: float

    def __post_init__(self):
        a11, a12, a22 = float(self.a11), float(self.a12), float(self.a22)
        if not all(math.isfinite(v) for v in (a11, a12, a22)):
            raise InvalidMatrixError(f"non-finite entries ({a11}, {a12}, {a22})")
        if a11 <= 0.0:
            raise InvalidMatrixError(f"a11 = {a11} is not positive")
        det = a11 * a22 - a12 * a12
        if abs(det - 1.0) > DET_RENORMALIZE_TOL:
            raise InvalidMatrixError(f"det = {det!r} differs from 1")
        if abs(det - 1.0) > DET_TOL:
            s = math.sqrt(det)
            a11, a12, a22 = a11 / s, a12 / s, a22 / s
        object.__setattr__(self, "a11", a11)
        object.__setattr__(self, "a12", a12)
        object.__setattr__(self, "a22", a22)

    @classmethod
    def identity(cls) -> "EllipticityMatrix":
        return cls(1.0, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    def as_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a12, self.a22]])

    def quadratic_form(self, xi) -> float:
        x, y = xi
        return self.a11 * x * x + 2.0 * self.a12 * x * y + self.a22 * y * y


@dataclass(frozen=True)
class BeltramiValue:
    """Complex dilatation at a point, ``|mu| < 1``."""

    re: float
    im: float

    def __post_init__(self):
        re, im = float(self.re), float(self.im)
        if not (math.isfinite(re) and math.isfinite(im)) or math.hypot(re, im) >= 1.0:
            raise InvalidDilatationError(f"|mu| = {math.hypot(re, im)!r} is not < 1")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def from_complex(cls, mu: complex) -> "BeltramiValue":
        mu = complex(mu)
        return cls(mu.real, mu.imag)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)


@dataclass(frozen=True)
class WirtingerPair:
    """Derivatives ``phi_z`` and ``phi_zbar`` (scalars or equal-shape arrays)."""

    dz: complex
    dzbar: complex

    @property
    def mu(self):
        return self.dzbar / self.dz

    @property
    def jacobian(self):
        return jacobian_from_wirtinger(self)


@dataclass(frozen=True)
class DistortionSummary:
    K: float
    Q: float
    mu_sup: float


@dataclass(frozen=True)
class MeasureClass:
    """Outcome of :func:`classify_measure_preservation`.

    ``kind`` is ``"preserving"``, ``"quasi_preserving"`` or ``"neither"``;
    ``C`` is ``max(sup J, 1/inf J)`` over the samples.
    """

    kind: str
    C: float

    @property
    def preserving(self) -> bool:
        return self.kind == "preserving"


def _as_mu(mu) -> BeltramiValue:
    if isinstance(mu, BeltramiValue):
        return mu
    return BeltramiValue.from_complex(mu)


def ellipticity_constant(A: EllipticityMatrix) -> float:
    """Larger eigenvalue of ``A``; the smaller one is its reciprocal."""
    if not isinstance(A, EllipticityMatrix):
        A = EllipticityMatrix(*A)
    half_trace = 0.5 * (A.a11 + A.a22)
    gap = math.hypot(0.5 * (A.a11 - A.a22), A.a12)
    return max(half_trace + gap, 1.0)


def matrix_to_mu(A: EllipticityMatrix) -> BeltramiValue:
    if not isinstance(A, EllipticityMatrix):
        A = EllipticityMatrix(*A)
    # det(I + A) = 1 + tr A + det A, and det A = 1
    denom = 2.0 + A.a11 + A.a22
    # "+ 0.0" folds negative zero
    return BeltramiValue((A.a22 - A.a11) / denom + 0.0, -2.0 * A.a12 / denom + 0.0)


def mu_to_matrix(mu) -> EllipticityMatrix:
    try:
        mu = _as_mu(mu)
    except (TypeError, ValueError) as exc:
        raise InvalidDilatationError(str(exc)) from exc
    m = mu.value
    s = 1.0 - abs(m) ** 2
    return EllipticityMatrix(abs(1.0 - m) ** 2 / s, -2.0 * m.imag / s, abs(1.0 + m) ** 2 / s)


def mu_to_matrix_arrays(mu: np.ndarray):
    """Vectorized :func:`mu_to_matrix`; returns ``(a11, a12, a22)`` arrays."""
    mu = np.asarray(mu, dtype=complex)
    s = 1.0 - np.abs(mu) ** 2
    return np.abs(1.0 - mu) ** 2 / s, -2.0 * mu.imag / s, np.abs(1.0 + mu) ** 2 / s


def k_to_mu_bound(K: float) -> float:
    """Largest admissible ``|mu|`` for ellipticity constant ``K``."""
    if not K >= 1.0:
        raise DomainError(f"ellipticity constant K = {K!r} must be >= 1")
    if math.isinf(K):
        raise DomainError("ellipticity constant must be finite")
    return (K - 1.0) / (K + 1.0)


def quasiconformality_coefficient(mu_sup: float) -> float:
    if not 0.0 <= mu_sup < 1.0:
        raise DomainError(f"mu_sup = {mu_sup!r} must lie in [0, 1)")
    return (1.0 + mu_sup) / (1.0 - mu_sup)


def distortion_summary(A: EllipticityMatrix) -> DistortionSummary:
    mu_sup = abs(matrix_to_mu(A))
    return DistortionSummary(
        K=ellipticity_constant(A),
        Q=quasiconformality_coefficient(mu_sup),
        mu_sup=mu_sup,
    )


def wirtinger_derivatives(
    map: Callable, z, h: float = DEFAULT_STEP, domain=None
) -> WirtingerPair:
    """Central-difference Wirtinger derivatives of ``map`` at ``z``.

    Uses the four points ``z +- h`` and ``z +- ih``; the error is O(h^2) for
    C^3 maps. ``z`` may be a complex array if ``map`` is vectorized. When
    ``domain`` is given, every stencil point must satisfy
    ``domain.contains``.
    """
    if not h > 0:
        raise DomainError(f"step h = {h!r} must be positive")
    stencil = [z + h, z - h, z + 1j * h, z - 1j * h]
    if domain is not None:
        for p in stencil:
            if not np.all(domain.contains(p)):
                raise StencilError(f"stencil point near z={z!r} leaves the domain (h={h})")
    try:
        fxp, fxm, fyp, fym = (map(p) for p in stencil)
    except (ValueError, ZeroDivisionError, FloatingPointError) as exc:
        raise StencilError(f"map failed on the stencil around z={z!r}: {exc}") from exc
    vals = np.asarray([fxp, fxm, fyp, fym], dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise StencilError(f"map is not finite on the stencil around z={z!r}")
    dx = (fxp - fxm) / (2.0 * h)
    dy = (fyp - fym) / (2.0 * h)
    return WirtingerPair(0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy))


def jacobian_from_wirtinger(w: WirtingerPair):
    return np.abs(w.dz) ** 2 - np.abs(w.dzbar) ** 2


def classify_measure_preservation(
    map: Callable,
    sample_points: Sequence[complex],
    tol: float = 1e-9,
    C_max: float = 1e6,
    h: float = DEFAULT_STEP,
    jacobian: Callable | None = None,
) -> MeasureClass:
    """Decide whether ``map`` preserves area on the given samples.

    The Jacobian is taken from ``jacobian`` when supplied, otherwise from
    numerical Wirtinger derivatives of ``map``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if not C_max > 1:
        raise DomainError("C_max must exceed 1")
    z = np.asarray(sample_points, dtype=complex)
    if jacobian is not None:
        J = np.asarray(jacobian(z), dtype=float) * np.ones(z.shape)
    else:
        J = np.asarray(jacobian_from_wirtinger(wirtinger_derivatives(map, z, h)))
    if np.any(J <= 0):
        k = int(np.argmin(J))
        raise OrientationError(f"Jacobian {J.flat[k]!r} <= 0 at z={z.flat[k]!r}")
    C = float(max(J.max(), 1.0 / J.min()))
    if np.all(np.abs(J - 1.0) <= tol):
        return MeasureClass("preserving", C)
    if C <= C_max:
        return MeasureClass("quasi_preserving", C)
    return MeasureClass("neither", C)


class MatrixField:
    """Coefficient field ``z -> A(z)``.

    ``func`` is vectorized: it takes a complex array and returns the arrays
    ``(a11, a12, a22)``. Calling the field on a single point returns an
    :class:`EllipticityMatrix`; :meth:`evaluate` works on whole arrays.
    """

    def __init__(self, func: Callable, label: str = "field"):
        self.func = func
        self.label = label

    @classmethod
    def constant(cls, A: EllipticityMatrix | None = None) -> "MatrixField":
        A = EllipticityMatrix.identity() if A is None else A

        def func(z):
            one = np.ones(np.shape(z))
            return A.a11 * one, A.a12 * one, A.a22 * one

        return cls(func, label=f"constant({A.a11:g}, {A.a12:g}, {A.a22:g})")

    @classmethod
    def from_mu(cls, mu_func: Callable, label: str = "from_mu") -> "MatrixField":
        return cls(lambda z: mu_to_matrix_arrays(mu_func(z)), label=label)

    def evaluate(self, z):
        a11, a12, a22 = self.func(np.asarray(z, dtype=complex))
        shape = np.shape(z)
        return (np.broadcast_to(a11, shape).astype(float),
                np.broadcast_to(a12, shape).astype(float),
                np.broadcast_to(a22, shape).astype(float))

    def __call__(self, z) -> EllipticityMatrix:
        a11, a12, a22 = self.evaluate(complex(z))
        return EllipticityMatrix(float(a11), float(a12), float(a22))

    def __repr__(self):
        return f"MatrixField({self.label})"
