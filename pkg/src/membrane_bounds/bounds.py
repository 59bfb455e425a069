"""Lower bounds for lambda1(A, Omega) and the constants that feed them.

Every public bound returns a :class:`BoundReport` recording the formula
used and all of its inputs.

Bound families
--------------
``K_faber_krahn``
    ``j01^2 / (K R*^2)`` from the disc of equal area and the ellipticity
    constant.
``infty_regular``
    ``lambda1(image) / ||J_{phi^-1}||_inf``.
``beta_regular``
    ``1 / (C_{r,2}(image)^2 ||J_{phi^-1}||_beta)`` with ``r = 2 beta / (beta - 1)``.
``measure_preserving_RFK``
    ``j01^2 pi / |Omega|`` for area-preserving maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import J01, CatalogEntry
from .errors import DomainError, QuadratureError
from .fem.mesh import refine, triangulate

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
ENDPOINT_GAP = 1e-6
THEOREMS = ("K_faber_krahn", "beta_regular", "infty_regular", "measure_preserving_RFK", "variation")


@dataclass(frozen=True)
class BoundReport:
    value: float
    theorem: str
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"unknown theorem tag {self.theorem!r}")
        if not self.value > 0:
            raise DomainError(f"bound value {self.value!r} is not positive")

    def to_json(self) -> dict:
        return {"inputs": dict(sorted(self.inputs.items())), "theorem": self.theorem,
                "value": self.value}


@dataclass(frozen=True)
class SPConstant:
    r: float
    area: float
    value: float
    argmin_p: float
    formula: str = "source"

    @property
    def p_interval(self) -> tuple[float, float]:
        return 2 * self.r / (self.r + 2), 2.0


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise DomainError(f"gamma_fn needs x > 0, got {x!r}")
    return math.gamma(x)


def _check_positive(**kw):
    for k, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{k} = {v!r} must be positive and finite")


def sp_log_objective(p: float, r: float, area: float, formula: str = "source") -> float:
    """Logarithm of the Sobolev-Poincare objective minimized over ``p``."""
    power = (p - 1.0) / p if formula == "source" else 1.0
    return (
        power * math.log((p - 1.0) / (2.0 - p))
        - 0.5 * math.log(math.pi)
        - math.log(2.0) / p
        + math.log(area) / r
        - 0.5 * (math.lgamma(2.0 / p) + math.lgamma(3.0 - 2.0 / p))
    )


def sp_objective(p: float, r: float, area: float, formula: str = "source") -> float:
    lo = 2 * r / (r + 2)
    if not lo < p < 2:
        raise DomainError(f"p = {p!r} outside ({lo}, 2)")
    return math.exp(sp_log_objective(p, r, area, formula))


def sp_constant_upper(r: float, area: float, formula: str = "source") -> SPConstant:
    """Upper estimate of the Sobolev-Poincare constant ``C_{r,2}``.

    Minimizes the objective over ``p`` in ``(2r/(r+2), 2)`` by golden-section
    search on the log-objective followed by Newton polishing. For ``r > 2``
    the infimum sits at the left end of the interval and the returned
    ``argmin_p`` is ``2r/(r+2) + 1e-6``.

    ``formula="restated"`` uses power 1 on the ``(p-1)/(2-p)`` factor.
    """
    if not r >= 2:
        raise DomainError(f"r = {r!r} must be >= 2")
    _check_positive(area=area)
    if formula not in ("source", "restated"):
        raise ValueError(f"unknown formula {formula!r}")
    lo = 2 * r / (r + 2) + ENDPOINT_GAP
    hi = 2.0 - ENDPOINT_GAP

    def f(p):
        return sp_log_objective(p, r, area, formula)

    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-12:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    p = 0.5 * (a + b)
    if p - lo > 1e-7 and hi - p > 1e-7:
        for _ in range(3):
            step = 1e-5 * min(1.0, p - lo, hi - p)
            f0, fp, fm = f(p), f(p + step), f(p - step)
            curv = (fp - 2 * f0 + fm) / step**2
            if curv <= 0:
                break
            trial = p - (fp - fm) / (2 * step) / curv
            if lo < trial < hi and f(trial) <= f0:
                p = trial
    candidates = [(f(p), p), (f(lo), lo)]
    logv, p = min(candidates)
    return SPConstant(r, area, math.exp(logv), p, formula)


def lambda1_disc(R: float) -> float:
    _check_positive(R=R)
    return J01**2 / R**2


def _r_star(area: float) -> float:
    return math.sqrt(area / math.pi)


def lambda1_lower_via_K(area: float, K: float) -> BoundReport:
    _check_positive(area=area)
    if not (K >= 1 and math.isfinite(K)):
        raise DomainError(f"K = {K!r} must be a finite number >= 1")
    R = _r_star(area)
    return BoundReport(J01**2 / (K * R * R), "K_faber_krahn",
                       {"K": K, "R_star": R, "area": area, "j01": J01})


def lambda1_lower_infty(lambda1_image: float, jac_inf_norm: float) -> BoundReport:
    _check_positive(lambda1_image=lambda1_image, jac_inf_norm=jac_inf_norm)
    return BoundReport(lambda1_image / jac_inf_norm, "infty_regular",
                       {"jac_inf_norm": jac_inf_norm, "lambda1_image": lambda1_image})


def beta_exponent(beta: float) -> float:
    """Sobolev exponent ``r = 2 beta / (beta - 1)`` paired with a Jacobian in L^beta."""
    if not beta > 1:
        raise DomainError(f"beta = {beta!r} must exceed 1")
    return 2.0 * beta / (beta - 1.0)


def lambda1_lower_beta(beta: float, area_image: float, jac_beta_norm: float,
                       formula: str = "source") -> BoundReport:
    r = beta_exponent(beta)
    _check_positive(area_image=area_image, jac_beta_norm=jac_beta_norm)
    C = sp_constant_upper(r, area_image, formula)
    return BoundReport(
        1.0 / (C.value**2 * jac_beta_norm),
        "beta_regular",
        {"area_image": area_image, "argmin_p": C.argmin_p, "beta": beta,
         "jac_beta_norm": jac_beta_norm, "r": r, "sp_constant": C.value},
    )


def variation_lower_bound(lambda1_image: float, jac_inf_norm: float) -> float:
    """Lower bound for ``lambda1(A, Omega) - lambda1(image)`` when the image contains Omega."""
    _check_positive(lambda1_image=lambda1_image)
    if not 0 < jac_inf_norm < 1:
        raise DomainError(f"jac_inf_norm = {jac_inf_norm!r} must lie in (0, 1)")
    return (1.0 - jac_inf_norm) / jac_inf_norm * lambda1_image


def faber_krahn_measure_preserving(area: float) -> BoundReport:
    _check_positive(area=area)
    R = _r_star(area)
    return BoundReport(J01**2 / (R * R), "measure_preserving_RFK",
                       {"R_star": R, "area": area, "j01": J01})


def sp_remark_consistency(lambda1_image: float, area: float) -> bool:
    """Whether the estimate of ``C_{2,2}^2`` dominates the exact ``1/lambda1``."""
    _check_positive(lambda1_image=lambda1_image, area=area)
    return sp_constant_upper(2.0, area).value ** 2 >= 1.0 / lambda1_image


# ---------------------------------------------------------------- quadrature

_S15 = math.sqrt(15.0)
_A1, _B1 = (9 - 2 * _S15) / 21, (6 + _S15) / 21
_A2, _B2 = (9 + 2 * _S15) / 21, (6 - _S15) / 21
QUAD_POINTS = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
    [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
])
QUAD_WEIGHTS = np.array([9 / 40] + [(155 + _S15) / 1200] * 3 + [(155 - _S15) / 1200] * 3)


def _pairwise_sum(x: np.ndarray) -> float:
    # fixed reduction tree, independent of chunking
    x = np.asarray(x, dtype=float)
    while x.size > 1:
        if x.size % 2:
            x = np.append(x, 0.0)
        x = x[0::2] + x[1::2]
    return float(x[0]) if x.size else 0.0


def integrate_on_mesh(mesh, func) -> float:
    """Degree-5 seven-point rule over every triangle of ``mesh``."""
    p = mesh.vertices[mesh.triangles]
    z = p[..., 0] + 1j * p[..., 1]
    qp = z @ QUAD_POINTS.T  # (T, 7)
    vals = np.asarray(func(qp), dtype=float)
    return _pairwise_sum((vals @ QUAD_WEIGHTS) * mesh.signed_areas())


@dataclass(frozen=True)
class BetaNorm:
    value: float
    change: float  # relative change between the last two levels
    levels: tuple


def jacobian_beta_norm_study(e: CatalogEntry, beta: float, n_refine: int = 5,
                             target_h: float = 0.1) -> BetaNorm:
    if not beta >= 1:
        raise DomainError(f"beta = {beta!r} must be >= 1")
    if n_refine < 2:
        raise DomainError("n_refine must be >= 2")
    J = e.map.inverse_jacobian_on_image
    mesh = triangulate(e.image, min(target_h, 0.5 * e.image.diameter))
    values = []
    for level in range(n_refine):
        if level:
            mesh = refine(mesh)
        with np.errstate(over="raise", invalid="raise"):
            try:
                integral = integrate_on_mesh(mesh, lambda w: np.abs(J(w)) ** beta)
            except FloatingPointError as exc:
                raise QuadratureError(f"{e.name}: integrand overflow at beta={beta}") from exc
        if not math.isfinite(integral) or integral <= 0:
            raise QuadratureError(f"{e.name}: integral {integral!r} is not finite and positive")
        values.append(integral ** (1.0 / beta))
    change = abs(values[-1] - values[-2]) / values[-1]
    if change > 0.1:
        raise QuadratureError(f"{e.name}: beta-norm changed by {change:.1%} at the final level")
    return BetaNorm(values[-1], change, tuple(values))


def jacobian_beta_norm(e: CatalogEntry, beta: float, n_refine: int = 5,
                       target_h: float = 0.1) -> float:
    """``||J_{phi^-1}||_{L^beta(image)}`` by mesh quadrature on the image."""
    return jacobian_beta_norm_study(e, beta, n_refine, target_h).value


# ---------------------------------------------------------------- per entry


def entry_ellipticity_constant(e: CatalogEntry, n_samples: int = 2048) -> float:
    """Largest ellipticity constant of the entry's matrix over interior samples."""
    z = e.sample(n_samples)
    a11, a12, a22 = (np.asarray(v, dtype=float) for v in e.map.matrix(z))
    K = 0.5 * (a11 + a22) + np.hypot(0.5 * (a11 - a22), a12)
    return float(max(1.0, K.max()))


def applicable_bounds(e: CatalogEntry, beta: float | None = None,
                      n_refine: int = 5) -> list[BoundReport]:
    """Every bound the entry's data supports, in a fixed order."""
    reports = [lambda1_lower_via_K(e.domain.area, entry_ellipticity_constant(e))]
    if e.reference_lambda1_image is not None:
        reports.append(lambda1_lower_infty(e.reference_lambda1_image, e.jac_inf_norm))
    if beta is not None:
        norm = jacobian_beta_norm(e, beta, n_refine)
        reports.append(lambda1_lower_beta(beta, e.image.area, norm))
    if e.measure_class().preserving:
        reports.append(faber_krahn_measure_preserving(e.domain.area))
    return reports
