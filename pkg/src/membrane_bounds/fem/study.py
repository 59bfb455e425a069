"""Refinement studies and the weighted-image cross-check."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from ..errors import IdentityViolation, ParameterError
from .assembly import assemble
from .eigen import EigenResult, smallest_eigenvalue
from .mesh import TriangleMesh, refine, triangulate

ASSUMED_ORDER = 2.0


@dataclass
class ConvergenceTable:
    rows: list  # (h_max, lambda1) per level, coarse to fine
    extrapolated: float
    observed_order: float
    results: list = field(default_factory=list, repr=False)
    meshes: list = field(default_factory=list, repr=False)

    @property
    def finest(self) -> float:
        return self.rows[-1][1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("h_max,lambda1\n")
        for h, lam in self.rows:
            buf.write(f"{h!r},{lam!r}\n")
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "rows": [{"h_max": h, "lambda1": lam} for h, lam in self.rows],
            "extrapolated": self.extrapolated,
            "observed_order": self.observed_order,
        }


def richardson(values) -> tuple[float, float]:
    """Extrapolate a halving-step sequence; returns ``(limit, order)``.

    The order is fitted from the last three values. With only two values, or
    when the last two differences do not shrink geometrically, the order is
    taken as 2 and reported as NaN.
    """
    if len(values) < 2:
        raise ParameterError("need at least two levels to extrapolate")
    d2 = values[-2] - values[-1]
    q = math.nan
    if len(values) >= 3:
        d1 = values[-3] - values[-2]
        if d2 != 0 and d1 / d2 > 1:
            q = math.log2(d1 / d2)
    q_used = ASSUMED_ORDER if math.isnan(q) else q
    return values[-1] - d2 / (2.0**q_used - 1.0), q


def lambda1_estimate(d, A_field=None, levels: int = 4, target_h: float = 0.1,
                     mass_weight=None, tol: float = 1e-10,
                     mesh: TriangleMesh | None = None) -> ConvergenceTable:
    """Solve on ``levels`` uniformly refined meshes and extrapolate lambda1."""
    if levels < 2:
        raise ParameterError(f"levels = {levels} must be >= 2")
    m = triangulate(d, target_h) if mesh is None else mesh
    rows, results, meshes = [], [], []
    for level in range(levels):
        if level:
            m = refine(m)
        res: EigenResult = smallest_eigenvalue(assemble(m, A_field, mass_weight), tol)
        rows.append((res.h_max, res.lambda1))
        results.append(res)
        meshes.append(m)
    limit, q = richardson([lam for _, lam in rows])
    return ConvergenceTable(rows, limit, q, results, meshes)


@dataclass
class ReductionReport:
    entry: str
    direct: ConvergenceTable
    weighted: ConvergenceTable
    rel_diff: float
    tol: float

    @property
    def agree(self) -> bool:
        return self.rel_diff <= self.tol

    def to_json(self) -> dict:
        return {
            "entry": self.entry,
            "direct": self.direct.extrapolated,
            "weighted": self.weighted.extrapolated,
            "rel_diff": self.rel_diff,
            "agree": self.agree,
        }


def weighted_reduction_check(e, levels: int = 4, target_h: float = 0.1, tol: float = 0.02,
                             raise_on_violation: bool = False,
                             image_target_h: float | None = None) -> ReductionReport:
    """Compare lambda1(A, domain) with the weighted Laplace problem on the image.

    The weighted problem has unit stiffness on the image and mass weight
    ``|J(w, phi^-1)|``.
    """
    direct = lambda1_estimate(e.domain, e.map.matrix_field(), levels, target_h)
    weighted = lambda1_estimate(e.image, None, levels,
                                target_h if image_target_h is None else image_target_h,
                                mass_weight=e.map.inverse_jacobian_on_image)
    rel = abs(direct.extrapolated - weighted.extrapolated) / weighted.extrapolated
    report = ReductionReport(e.name, direct, weighted, rel, tol)
    if raise_on_violation and not report.agree:
        raise IdentityViolation(
            f"{e.name}: direct {direct.extrapolated:.8g} vs weighted "
            f"{weighted.extrapolated:.8g} (rel diff {rel:.3%} > {tol:.0%})"
        )
    return report
