"""Worked examples: domains with closed-form A-quasiconformal maps.

Each :class:`CatalogEntry` bundles a domain ``Omega``, its image under the
map, the map's Wirtinger derivatives, dilatation, coefficient matrix and
Jacobians, and (where known) the Laplace eigenvalue of the image together
with the resulting lower bound ``lambda1(image) / ||J_inverse||_inf``.

All map callables are vectorized over complex arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .coefficients import (
    EllipticityMatrix,
    BeltramiValue,
    MatrixField,
    WirtingerPair,
    classify_measure_preservation,
    mu_to_matrix_arrays,
)
from .domains import Disc, ParametricDomain, PlanarDomain, Polygon, rectangle, unit_square
from .errors import ParameterError, VerificationError

J01 = 2.404825557695773

ENTRY_NAMES = (
    "triangle_affine",
    "cardioid_power",
    "square_diag_stretch",
    "square_shear_stretch",
    "shear_flow",
    "separable",
)


@dataclass(frozen=True)
class MappingSpec:
    forward: Callable
    wirtinger: Callable  # z -> (phi_z, phi_zbar)
    jacobian: Callable
    inverse_jacobian_on_image: Callable  # w -> |J(w, phi^-1)|
    mu: Callable
    matrix: Callable  # z -> (a11, a12, a22)

    def wirtinger_at(self, z) -> WirtingerPair:
        dz, dzbar = self.wirtinger(z)
        return WirtingerPair(dz, dzbar)

    def mu_at(self, z) -> BeltramiValue:
        return BeltramiValue.from_complex(complex(self.mu(complex(z))))

    def matrix_at(self, z) -> EllipticityMatrix:
        a11, a12, a22 = (float(np.real(v)) for v in self.matrix(complex(z)))
        return EllipticityMatrix(a11, a12, a22)

    def matrix_field(self) -> MatrixField:
        return MatrixField(self.matrix, label="catalog")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    domain: PlanarDomain
    image: PlanarDomain
    map: MappingSpec
    parameters: dict
    jac_inf_norm: float
    reference_lambda1_image: float | None = None
    constant_jacobian: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def reference_bound(self) -> float | None:
        if self.reference_lambda1_image is None:
            return None
        return self.reference_lambda1_image / self.jac_inf_norm

    def sample(self, n: int, seed: int = 0) -> np.ndarray:
        return sample_interior(self.domain, n, seed)

    def measure_class(self, n_samples: int = 256, seed: int = 0):
        z = self.sample(n_samples, seed)
        return classify_measure_preservation(self.map.forward, z, jacobian=self.map.jacobian)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "parameters": dict(sorted(self.parameters.items())),
            "domain": self.domain.to_json(),
            "image": self.image.to_json(),
            "area": self.domain.area,
            "image_area": self.image.area,
            "jac_inf_norm": self.jac_inf_norm,
            "reference_lambda1_image": self.reference_lambda1_image,
            "reference_bound": self.reference_bound,
            "metadata": {k: v for k, v in sorted(self.metadata.items())},
        }


def sample_interior(domain: PlanarDomain, n: int, seed: int = 0) -> np.ndarray:
    """``n`` scrambled-Halton points inside ``domain`` (rejection sampling)."""
    if n < 1:
        raise ParameterError("n_samples must be >= 1")
    x0, x1, y0, y1 = domain.bbox()
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    out = []
    count = 0
    while count < n:
        u = sampler.random(max(64, 2 * (n - count)))
        z = (x0 + (x1 - x0) * u[:, 0]) + 1j * (y0 + (y1 - y0) * u[:, 1])
        z = z[domain.contains(z)]
        out.append(z)
        count += z.size
    return np.concatenate(out)[:n]


def _const(value, z):
    return np.full(np.shape(z), value, dtype=complex if isinstance(value, complex) else float)


# ---------------------------------------------------------------- entries


def triangle_affine(a: float = 2.0, b: float = 1.0) -> CatalogEntry:
    if not (a > b >= 0):
        raise ParameterError(f"triangle_affine needs a > b >= 0, got a={a}, b={b}")
    d = a * a - b * b
    mu = -b / a
    A = ((a + b) / (a - b), 0.0, (a - b) / (a + b))
    mapping = MappingSpec(
        forward=lambda z: (a * z - b * np.conj(z)) / d,
        wirtinger=lambda z: (_const(complex(a / d), z), _const(complex(-b / d), z)),
        jacobian=lambda z: _const(1.0 / d, z),
        inverse_jacobian_on_image=lambda w: _const(d, w),
        mu=lambda z: _const(complex(mu), z),
        matrix=lambda z: tuple(_const(v, z) for v in A),
    )
    return CatalogEntry(
        name="triangle_affine",
        domain=Polygon([0, a + b, 1j * (a - b)]),
        image=Polygon([0, 1, 1j]),
        map=mapping,
        parameters={"a": float(a), "b": float(b)},
        jac_inf_norm=d,
        reference_lambda1_image=5 * math.pi**2,
        constant_jacobian=True,
    )


def _cardioid_curve(t):
    return np.cos(t / 2) ** 4 * np.exp(1j * t)


def _cardioid_inside(z, tol=0.0):
    rho, theta = np.abs(z), np.angle(z)
    return rho < np.cos(theta / 2) ** 4 + tol


def cardioid_power() -> CatalogEntry:
    def forward(z):
        z = np.asarray(z, dtype=complex)
        return 2 * np.abs(z) ** 0.25 * np.exp(0.5j * np.angle(z)) - 1

    def wirtinger(z):
        z = np.asarray(z, dtype=complex)
        rho, th = np.abs(z), np.angle(z)
        s = rho ** (-0.75)
        return 0.75 * s * np.exp(-0.5j * th), -0.25 * s * np.exp(1.5j * th)

    def mu(z):
        z = np.asarray(z, dtype=complex)
        return -z / (3 * np.conj(z))

    def matrix(z):
        z = np.asarray(z, dtype=complex)
        zb = np.conj(z)
        n2 = 8 * np.abs(zb) ** 2
        off = 0.75 * (z / zb).imag
        return np.abs(3 * zb + z) ** 2 / n2, off, np.abs(3 * zb - z) ** 2 / n2

    mapping = MappingSpec(
        forward=forward,
        wirtinger=wirtinger,
        jacobian=lambda z: 1.0 / (2 * np.abs(z) ** 1.5),
        inverse_jacobian_on_image=lambda w: np.abs(np.asarray(w) + 1) ** 6 / 32,
        mu=mu,
        matrix=matrix,
    )
    return CatalogEntry(
        name="cardioid_power",
        domain=ParametricDomain(_cardioid_curve, -math.pi, math.pi,
                                inside=_cardioid_inside, label="rho=cos^4(theta/2)"),
        image=Disc(0j, 1.0),
        map=mapping,
        parameters={},
        jac_inf_norm=2.0,
        reference_lambda1_image=J01**2,
    )


def square_diag_stretch(a: float = 2.0) -> CatalogEntry:
    # a = 1 is the identity map; kept so the conformal limit can be exercised
    if not a >= 1:
        raise ParameterError(f"square_diag_stretch needs a >= 1, got a={a}")
    mu = (a * a - 1) / (a * a + 1)
    mapping = MappingSpec(
        forward=lambda z: a * np.real(z) + 1j * np.imag(z) / a,
        wirtinger=lambda z: (_const(complex(0.5 * (a + 1 / a)), z),
                             _const(complex(0.5 * (a - 1 / a)), z)),
        jacobian=lambda z: _const(1.0, z),
        inverse_jacobian_on_image=lambda w: _const(1.0, w),
        mu=lambda z: _const(complex(mu), z),
        matrix=lambda z: (_const(1 / a**2, z), _const(0.0, z), _const(a**2, z)),
    )
    return CatalogEntry(
        name="square_diag_stretch",
        domain=unit_square(),
        image=rectangle(a, 1 / a),
        map=mapping,
        parameters={"a": float(a)},
        jac_inf_norm=1.0,
        reference_lambda1_image=math.pi**2 * (a**2 + 1 / a**2),
        constant_jacobian=True,
    )


def square_shear_stretch(a: float = 2.0, b: float = 1.0) -> CatalogEntry:
    if not a > 1:
        raise ParameterError(f"square_shear_stretch needs a > 1, got a={a}")
    den = (a * a + 1) ** 2 + a * a * b * b
    mu = complex(((a * a - 1) * (a * a + 1) - a * a * b * b) / den, 2 * a**3 * b / den)
    dz = complex(0.5 * (a + 1 / a), -0.5 * b)
    dzbar = complex(0.5 * (a - 1 / a), 0.5 * b)
    A = tuple(float(v) for v in mu_to_matrix_arrays(mu))
    mapping = MappingSpec(
        forward=lambda z: a * np.real(z) + b * np.imag(z) + 1j * np.imag(z) / a,
        wirtinger=lambda z: (_const(dz, z), _const(dzbar, z)),
        jacobian=lambda z: _const(1.0, z),
        inverse_jacobian_on_image=lambda w: _const(1.0, w),
        mu=lambda z: _const(mu, z),
        matrix=lambda z: tuple(_const(v, z) for v in A),
    )
    return CatalogEntry(
        name="square_shear_stretch",
        domain=unit_square(),
        image=Polygon([0, a, a + b + 1j / a, b + 1j / a]),
        map=mapping,
        parameters={"a": float(a), "b": float(b)},
        jac_inf_norm=1.0,
        constant_jacobian=True,
        metadata={"matrix_source": "reconstructed from mu via the inverse dilatation formula"},
    )


def shear_flow(c: float = 1.0, f: Callable | None = None,
               fprime: Callable | None = None) -> CatalogEntry:
    """Shear ``(x, y) -> (x + f(y), y)`` of the unit square.

    Without ``f`` the shear is linear, ``f(y) = c*y``, and the image is a
    parallelogram.
    """
    if (f is None) != (fprime is None):
        raise ParameterError("shear_flow needs both f and fprime, or neither")
    linear = f is None
    if linear:
        f = lambda y: c * np.asarray(y, dtype=float)  # noqa: E731
        fprime = lambda y: np.full(np.shape(y), float(c))  # noqa: E731

    def fp(z):
        return np.asarray(fprime(np.imag(np.asarray(z, dtype=complex))), dtype=float)

    def mu(z):
        g = fp(z)
        return (-g * g + 2j * g) / (4 + g * g)

    def matrix(z):
        g = fp(z)
        return 1 + g * g, -g, np.ones_like(g)

    mapping = MappingSpec(
        forward=lambda z: np.real(z) + f(np.imag(z)) + 1j * np.imag(z),
        wirtinger=lambda z: (1 - 0.5j * fp(z), 0.5j * fp(z)),
        jacobian=lambda z: np.ones(np.shape(z)),
        inverse_jacobian_on_image=lambda w: np.ones(np.shape(w)),
        mu=mu,
        matrix=matrix,
    )
    if linear:
        image = Polygon([0, 1, 1 + c + 1j, c + 1j])
        params = {"c": float(c)}
    else:
        image = _sheared_square(f)
        params = {}
    return CatalogEntry(
        name="shear_flow",
        domain=unit_square(),
        image=image,
        map=mapping,
        parameters=params,
        jac_inf_norm=1.0,
        constant_jacobian=True,
        metadata={
            "f": f"{c}*y" if linear else "custom",
            "printed_matrix": "[[1, -f'], [-f', 1 + f'^2]]",
            "matrix_note": "shipped matrix [[1 + f'^2, -f'], [-f', 1]] is the one "
                           "recovered from mu by the inverse dilatation formula",
        },
    )


def _sheared_square(f: Callable) -> ParametricDomain:
    def curve(t):
        t = np.asarray(t, dtype=float)
        k = np.clip(np.floor(t), 0, 3)
        s = t - k
        x = np.select([k == 0, k == 1, k == 2, k == 3], [s, 1.0, 1.0 - s, 0.0])
        y = np.select([k == 0, k == 1, k == 2, k == 3], [0.0, s, 1.0, 1.0 - s])
        return x + f(y) + 1j * y

    def inside(w, tol=0.0):
        u, v = np.real(w), np.imag(w)
        x = u - f(np.clip(v, 0, 1))
        return (v > -tol) & (v < 1 + tol) & (x > -tol) & (x < 1 + tol)

    return ParametricDomain(curve, 0.0, 4.0, inside=inside, label="sheared unit square")


def _invert_increasing(g: Callable, values, lo=0.0, hi=1.0, iters=60):
    values = np.asarray(values, dtype=float)
    a = np.full(values.shape, lo)
    b = np.full(values.shape, hi)
    for _ in range(iters):
        m = 0.5 * (a + b)
        below = g(m) < values
        a = np.where(below, m, a)
        b = np.where(below, b, m)
    return 0.5 * (a + b)


def separable(a_slope: float = 2.0, b_slope: float = 0.5,
              a: Callable | None = None, a_prime: Callable | None = None,
              b: Callable | None = None, b_prime: Callable | None = None) -> CatalogEntry:
    """``(x, y) -> a(x) + i b(y)`` on the unit square.

    Defaults to the linear pair ``a(x) = a_slope*x``, ``b(y) = b_slope*y``.
    Custom ``a``/``b`` must come with their derivatives and be increasing.
    """
    custom = (a, a_prime, b, b_prime)
    if any(g is not None for g in custom) and any(g is None for g in custom):
        raise ParameterError("separable needs all of a, a_prime, b, b_prime, or none")
    linear = a is None
    if linear:
        p, q = float(a_slope), float(b_slope)
        a = lambda x: p * np.asarray(x, dtype=float)  # noqa: E731
        b = lambda y: q * np.asarray(y, dtype=float)  # noqa: E731
        a_prime = lambda x: np.full(np.shape(x), p)  # noqa: E731
        b_prime = lambda y: np.full(np.shape(y), q)  # noqa: E731

    grid = np.linspace(0.0, 1.0, 1001)
    inf_ap, inf_bp = float(np.min(a_prime(grid))), float(np.min(b_prime(grid)))
    if inf_ap <= 0 or inf_bp <= 0:
        raise ParameterError("separable needs inf a' > 0 and inf b' > 0")

    def ders(z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(a_prime(z.real), float), np.asarray(b_prime(z.imag), float)

    def mu(z):
        ap, bp = ders(z)
        return ((ap - bp) / (ap + bp)).astype(complex)

    def matrix(z):
        ap, bp = ders(z)
        return bp / ap, np.zeros_like(ap), ap / bp

    def inverse_jacobian(w):
        w = np.asarray(w, dtype=complex)
        if linear:
            return np.full(w.shape, 1.0 / (p * q))
        x = _invert_increasing(a, w.real)
        y = _invert_increasing(b, w.imag)
        return 1.0 / (a_prime(x) * b_prime(y))

    def wirtinger(z):
        ap, bp = ders(z)
        return 0.5 * (ap + bp) + 0j, 0.5 * (ap - bp) + 0j

    mapping = MappingSpec(
        forward=lambda z: a(np.real(z)) + 1j * b(np.imag(z)),
        wirtinger=wirtinger,
        jacobian=lambda z: np.prod(ders(z), axis=0),
        inverse_jacobian_on_image=inverse_jacobian,
        mu=mu,
        matrix=matrix,
    )
    a0, a1 = float(a(0.0)), float(a(1.0))
    b0, b1 = float(b(0.0)), float(b(1.0))
    w, h = a1 - a0, b1 - b0
    return CatalogEntry(
        name="separable",
        domain=unit_square(),
        image=rectangle(w, h, complex(a0, b0)),
        map=mapping,
        parameters={"a_slope": p, "b_slope": q} if linear else {},
        jac_inf_norm=1.0 / (inf_ap * inf_bp),
        reference_lambda1_image=math.pi**2 * (1 / w**2 + 1 / h**2),
        constant_jacobian=linear,
        metadata={} if linear else {"a": "custom", "b": "custom"},
    )


_BUILDERS = {
    "triangle_affine": triangle_affine,
    "cardioid_power": cardioid_power,
    "square_diag_stretch": square_diag_stretch,
    "square_shear_stretch": square_shear_stretch,
    "shear_flow": shear_flow,
    "separable": separable,
}


def entry(name: str, **parameters) -> CatalogEntry:
    """Build the catalog entry ``name`` with the given parameters."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ParameterError(
            f"unknown catalog entry {name!r}; choose from {', '.join(ENTRY_NAMES)}"
        ) from None
    try:
        return builder(**parameters)
    except TypeError as exc:
        raise ParameterError(f"{name}: {exc}") from exc


def all_entries() -> list[CatalogEntry]:
    return [entry(name) for name in ENTRY_NAMES]


# ---------------------------------------------------------------- verification


@dataclass
class VerificationReport:
    entry: str
    n_samples: int
    tol: float
    residuals: dict
    witnesses: dict

    @property
    def passed(self) -> bool:
        return all(r <= self.tol for r in self.residuals.values())

    def to_json(self) -> dict:
        return {
            "entry": self.entry,
            "n_samples": self.n_samples,
            "tol": self.tol,
            "passed": self.passed,
            "residuals": dict(sorted(self.residuals.items())),
        }


def verify_entry(e: CatalogEntry, n_samples: int = 1000, tol: float = 1e-6,
                 seed: int = 0, raise_on_failure: bool = True) -> VerificationReport:
    """Cross-check an entry's closed forms at quasi-random interior points.

    Checks: Beltrami residual, Jacobian vs Wirtinger derivatives, unit
    determinant, matrix vs the dilatation, image membership, and the
    inverse-Jacobian identity ``J_inv(phi(z)) * J(z) = 1``.
    """
    if n_samples < 1:
        raise ParameterError("n_samples must be >= 1")
    z = e.sample(n_samples, seed)
    m = e.map
    dz, dzbar = (np.asarray(v, dtype=complex) for v in m.wirtinger(z))
    mu = np.asarray(m.mu(z), dtype=complex)
    J = np.asarray(m.jacobian(z), dtype=float)
    a11, a12, a22 = (np.asarray(v, dtype=float) for v in m.matrix(z))
    b11, b12, b22 = mu_to_matrix_arrays(mu)
    w = np.asarray(m.forward(z), dtype=complex)
    scale = np.maximum(1.0, np.maximum(np.abs(a11), np.abs(a22)))

    checks = {
        "beltrami": np.abs(dzbar - mu * dz) / np.abs(dz),
        "jacobian": np.abs(J - (np.abs(dz) ** 2 - np.abs(dzbar) ** 2)) / np.maximum(1.0, np.abs(J)),
        "determinant": np.abs(a11 * a22 - a12 * a12 - 1.0),
        "matrix": np.max(np.abs([a11 - b11, a12 - b12, a22 - b22]), axis=0) / scale,
        "image": (~e.image.contains(w, tol=1e-12)).astype(float),
        "inverse_jacobian": np.abs(np.asarray(m.inverse_jacobian_on_image(w)) * J - 1.0),
    }
    residuals, witnesses = {}, {}
    for key, r in checks.items():
        r = np.broadcast_to(r, z.shape)
        k = int(np.argmax(r))
        residuals[key] = float(r[k])
        witnesses[key] = complex(z[k])
    report = VerificationReport(e.name, n_samples, tol, residuals, witnesses)
    if raise_on_failure and not report.passed:
        key = max(residuals, key=lambda k: residuals[k] / tol)
        raise VerificationError(e.name, key, witnesses[key], residuals[key], tol)
    return report
