"""Cached FEM studies shared between test modules (one process, one solve)."""

from functools import lru_cache

from membrane_bounds.catalog import entry
from membrane_bounds.domains import Disc, unit_right_triangle, unit_square
from membrane_bounds.fem import lambda1_estimate, weighted_reduction_check

LEVELS = 4


@lru_cache(maxsize=None)
def laplace(name: str):
    domain, h = {
        "square": (unit_square(), 0.1),
        "triangle": (unit_right_triangle(), 0.1),
        "disc": (Disc(), 0.05),
    }[name]
    return lambda1_estimate(domain, None, LEVELS, h)


@lru_cache(maxsize=None)
def direct(name: str, params: tuple = (), target_h: float = 0.1):
    e = entry(name, **dict(params))
    return lambda1_estimate(e.domain, e.map.matrix_field(), LEVELS, target_h)


@lru_cache(maxsize=None)
def reduction(name: str, params: tuple = (), target_h: float = 0.1):
    e = entry(name, **dict(params))
    return weighted_reduction_check(e, LEVELS, target_h)


@lru_cache(maxsize=None)
def image_laplace(name: str, params: tuple = (), target_h: float = 0.1):
    e = entry(name, **dict(params))
    return lambda1_estimate(e.image, None, LEVELS, target_h)
