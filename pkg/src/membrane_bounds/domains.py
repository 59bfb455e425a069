"""Planar domains: polygons, discs and domains bounded by a parametric curve.

Points are complex numbers throughout. Boundaries are oriented
counterclockwise.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ParameterError

MIN_CURVED_VERTICES = 8


def polygon_area(vertices) -> float:
    """Signed shoelace area (positive for counterclockwise vertices)."""
    v = np.asarray(vertices, dtype=complex)
    return 0.5 * float(np.sum((np.conj(v) * np.roll(v, -1)).imag))


def points_in_polygon(points, vertices, tol: float = 0.0) -> np.ndarray:
    """Even-odd test; points within ``tol`` of an edge count as inside."""
    p = np.atleast_1d(np.asarray(points, dtype=complex))
    v = np.asarray(vertices, dtype=complex)
    x, y = p.real, p.imag
    inside = np.zeros(p.shape, dtype=bool)
    near = np.zeros(p.shape, dtype=bool)
    for a, b in zip(v, np.roll(v, -1)):
        ya, yb = a.imag, b.imag
        crosses = (ya > y) != (yb > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xc = a.real + (y - ya) * (b.real - a.real) / (yb - ya)
        inside ^= crosses & (x < xc)
        if tol > 0:
            e = b - a
            t = np.clip(((p - a) * np.conj(e)).real / max(abs(e) ** 2, 1e-300), 0.0, 1.0)
            near |= np.abs(p - (a + t * e)) <= tol
    return inside | near


class PlanarDomain:
    """Bounded, simply connected planar domain.

    Subclasses provide ``area``, ``contains``, ``boundary_polygon`` and the
    boundary parametrization used by the mesher.
    """

    curved = False

    @property
    def area(self) -> float:
        raise NotImplementedError

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def boundary_polygon(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def bbox(self):
        b = self.boundary_polygon(max(MIN_CURVED_VERTICES, 1024) if self.curved else 8)
        return b.real.min(), b.real.max(), b.imag.min(), b.imag.max()

    @property
    def diameter(self) -> float:
        x0, x1, y0, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0)

    def to_json(self) -> dict:
        raise NotImplementedError


class Polygon(PlanarDomain):
    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=complex).ravel()
        if v.size < 3:
            raise ParameterError("a polygon needs at least 3 vertices")
        a = polygon_area(v)
        if a == 0:
            raise ParameterError("degenerate polygon (zero area)")
        self.vertices = v if a > 0 else v[::-1].copy()

    @cached_property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        return points_in_polygon(points, self.vertices, tol)

    def boundary_polygon(self, n: int) -> np.ndarray:
        if n < len(self.vertices):
            raise ParameterError(
                f"n = {n} is below the polygon's vertex count {len(self.vertices)}"
            )
        return self.vertices.copy()

    def bbox(self):
        v = self.vertices
        return v.real.min(), v.real.max(), v.imag.min(), v.imag.max()

    def to_json(self) -> dict:
        return {"kind": "polygon", "vertices": [[z.real, z.imag] for z in self.vertices]}

    def __repr__(self):
        return f"Polygon({len(self.vertices)} vertices, area={self.area:.6g})"


class _CurvedDomain(PlanarDomain):
    """Domain bounded by a closed curve ``t -> point`` on ``[t0, t1)``."""

    curved = True
    t0 = 0.0
    t1 = 2 * math.pi

    def boundary_point(self, t):
        raise NotImplementedError

    @property
    def period(self) -> float:
        return self.t1 - self.t0

    def boundary_polygon(self, n: int) -> np.ndarray:
        """``n`` boundary points at uniformly spaced parameter values."""
        if n < MIN_CURVED_VERTICES:
            raise ParameterError(f"n = {n} must be at least {MIN_CURVED_VERTICES}")
        t = self.t0 + self.period * np.arange(n) / n
        return np.asarray(self.boundary_point(t), dtype=complex)

    def param_midpoint(self, ta, tb):
        """Parameter halfway between two nearby boundary parameters."""
        ta, tb = np.asarray(ta, float), np.asarray(tb, float)
        d = np.mod(tb - ta + 0.5 * self.period, self.period) - 0.5 * self.period
        return self.t0 + np.mod(ta + 0.5 * d - self.t0, self.period)

    def boundary_samples(self, spacing: float, n_dense: int = 1 << 14):
        """Boundary points roughly equidistant in arc length.

        Returns ``(points, params)``.
        """
        t = self.t0 + self.period * np.arange(n_dense + 1) / n_dense
        z = np.asarray(self.boundary_point(t), dtype=complex)
        s = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(z)))])
        n = max(MIN_CURVED_VERTICES, int(math.ceil(s[-1] / spacing)))
        targets = s[-1] * np.arange(n) / n
        params = np.interp(targets, s, t)
        return np.asarray(self.boundary_point(params), dtype=complex), params

    @cached_property
    def area(self) -> float:
        # shoelace at n and 2n; the inscribed-polygon error is O(n^-2)
        a1 = polygon_area(self.boundary_polygon(1 << 15))
        a2 = polygon_area(self.boundary_polygon(1 << 16))
        return (4.0 * a2 - a1) / 3.0


class Disc(_CurvedDomain):
    def __init__(self, center: complex = 0j, radius: float = 1.0):
        if not radius > 0:
            raise ParameterError(f"radius = {radius!r} must be positive")
        self.center = complex(center)
        self.radius = float(radius)

    def boundary_point(self, t):
        return self.center + self.radius * np.exp(1j * np.asarray(t, dtype=float))

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        p = np.asarray(points, dtype=complex)
        return np.abs(p - self.center) < self.radius + tol

    def bbox(self):
        c, r = self.center, self.radius
        return c.real - r, c.real + r, c.imag - r, c.imag + r

    def to_json(self) -> dict:
        return {"kind": "disc", "center": [self.center.real, self.center.imag], "radius": self.radius}

    def __repr__(self):
        return f"Disc(center={self.center}, radius={self.radius})"


class ParametricDomain(_CurvedDomain):
    """Interior of a closed counterclockwise curve.

    Parameters
    ----------
    curve : callable
        Vectorized map from parameter values in ``[t0, t1)`` to boundary points.
    inside : callable, optional
        Exact membership predicate ``inside(points, tol) -> bool array``. If
        omitted, membership is tested against a dense boundary polygon.
    """

    def __init__(self, curve: Callable, t0: float = 0.0, t1: float = 2 * math.pi,
                 inside: Callable | None = None, label: str = "parametric"):
        if not t1 > t0:
            raise ParameterError("parameter range must be increasing")
        self.curve = curve
        self.t0, self.t1 = float(t0), float(t1)
        self._inside = inside
        self.label = label
        if polygon_area(self.boundary_polygon(256)) <= 0:
            raise ParameterError("boundary curve must be counterclockwise and enclose positive area")

    def boundary_point(self, t):
        return self.curve(np.asarray(t, dtype=float))

    @cached_property
    def _dense_polygon(self):
        return self.boundary_polygon(4096)

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        if self._inside is not None:
            return np.asarray(self._inside(np.asarray(points, dtype=complex), tol))
        return points_in_polygon(points, self._dense_polygon, tol)

    def to_json(self) -> dict:
        return {"kind": "parametric_boundary", "curve": self.label,
                "t_range": [self.t0, self.t1]}

    def __repr__(self):
        return f"ParametricDomain({self.label!r})"


def boundary_polygon(d: PlanarDomain, n: int) -> np.ndarray:
    """Counterclockwise ``n``-vertex polygonal approximation of ``d``'s boundary."""
    return d.boundary_polygon(n)


def unit_square() -> Polygon:
    return Polygon([0, 1, 1 + 1j, 1j])


def rectangle(width: float, height: float, origin: complex = 0j) -> Polygon:
    o = complex(origin)
    return Polygon([o, o + width, o + width + 1j * height, o + 1j * height])


def unit_right_triangle() -> Polygon:
    return Polygon([0, 1, 1j])
