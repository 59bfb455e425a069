import dataclasses
import json
import math

import numpy as np
import pytest

from membrane_bounds.catalog import (
    ENTRY_NAMES,
    all_entries,
    entry,
    sample_interior,
    verify_entry,
)
from membrane_bounds.domains import Disc, Polygon, boundary_polygon, polygon_area, unit_square
from membrane_bounds.errors import ParameterError, VerificationError

# 0.5 * integral of cos^8(t/2) over [-pi, pi], by scipy.integrate.quad
CARDIOID_AREA = 0.859029241215959


@pytest.fixture(scope="module")
def entries():
    return {e.name: e for e in all_entries()}


def test_six_entries(entries):
    assert list(entries) == list(ENTRY_NAMES)
    assert len(entries) == 6


@pytest.mark.parametrize("name", ENTRY_NAMES)
def test_verify_entry_default_tolerance(entries, name):
    report = verify_entry(entries[name], n_samples=1000, tol=1e-6)
    assert report.passed
    assert set(report.residuals) >= {"beltrami", "jacobian", "determinant", "matrix", "image"}


def test_verify_triangle_tight_tolerance():
    assert verify_entry(entry("triangle_affine", a=2, b=1), 500, 1e-8).passed


def test_verify_cardioid():
    assert verify_entry(entry("cardioid_power"), 500, 1e-6).passed


def test_fault_injection_trips_beltrami(entries):
    e = entries["triangle_affine"]
    bad = dataclasses.replace(e, map=dataclasses.replace(e.map, mu=lambda z: -e.map.mu(z)))
    with pytest.raises(VerificationError) as info:
        verify_entry(bad, 100, 1e-6)
    assert info.value.check in ("beltrami", "matrix")
    report = verify_entry(bad, 100, 1e-6, raise_on_failure=False)
    assert report.residuals["beltrami"] > 1e-6


def test_reference_bound_triangle():
    e = entry("triangle_affine", a=2, b=1)
    assert e.reference_bound == pytest.approx(5 * math.pi**2 / 3, rel=1e-15)


@pytest.mark.parametrize("a, b", [(2, 1), (3, 1), (1.5, 0.5), (2, 0)])
def test_reference_bound_general(a, b):
    assert entry("triangle_affine", a=a, b=b).reference_bound == pytest.approx(
        5 * math.pi**2 / (a * a - b * b), rel=1e-14)


def test_cardioid_jac_inf_norm(entries):
    e = entries["cardioid_power"]
    assert e.jac_inf_norm == 2
    # the supremum is approached near w = 1
    w = np.array([0.999999 + 0j])
    assert e.map.inverse_jacobian_on_image(w)[0] == pytest.approx(2, rel=1e-5)


def test_identity_stretch_has_zero_dilatation():
    e = entry("square_diag_stretch", a=1)
    assert np.all(e.map.mu(e.sample(50)) == 0)


@pytest.mark.parametrize("name, kwargs", [
    ("triangle_affine", {"a": 1, "b": 1}),
    ("square_diag_stretch", {"a": 0.5}),
    ("square_shear_stretch", {"a": 1.0}),
    ("separable", {"a_slope": -1.0}),
])
def test_bad_parameters(name, kwargs):
    with pytest.raises(ParameterError):
        entry(name, **kwargs)


def test_unknown_entry_and_kwarg():
    with pytest.raises(ParameterError):
        entry("nope")
    with pytest.raises(ParameterError):
        entry("cardioid_power", a=2)


def test_shear_flow_records_printed_matrix(entries):
    assert entries["shear_flow"].metadata["printed_matrix"] == "[[1, -f'], [-f', 1 + f'^2]]"


def test_shear_flow_matrix_matches_dilatation():
    e = entry("shear_flow", c=1.0)
    z = e.sample(20)
    a11, a12, a22 = e.map.matrix(z)
    # f(y) = y, f' = 1: the consistent matrix is [[2, -1], [-1, 1]]
    assert np.allclose(a11, 2) and np.allclose(a12, -1) and np.allclose(a22, 1)


def test_shear_flow_custom_profile():
    e = entry("shear_flow", f=lambda y: y + 0.25 * y**2, fprime=lambda y: 1 + 0.5 * y)
    assert verify_entry(e, 300, 1e-6).passed
    assert e.image.area == pytest.approx(1.0, abs=1e-6)


class TestBoundaryPolygon:
    def test_unit_square_exact_corners(self):
        v = boundary_polygon(unit_square(), 4)
        assert sorted(v.tolist(), key=lambda c: (c.real, c.imag)) == [0, 1j, 1, 1 + 1j]
        assert polygon_area(v) == 1

    def test_polygon_too_few(self):
        with pytest.raises(ParameterError):
            boundary_polygon(unit_square(), 3)

    def test_curved_needs_eight(self):
        with pytest.raises(ParameterError):
            boundary_polygon(Disc(), 7)

    def test_disc_area_limit(self):
        n = 400_000
        v = boundary_polygon(Disc(), n)
        assert abs(polygon_area(v) - math.pi) <= 1e-9
        assert polygon_area(v) > 0  # counterclockwise

    def test_cardioid_area(self, entries):
        d = entries["cardioid_power"].domain
        assert d.area == pytest.approx(CARDIOID_AREA, rel=1e-10)
        assert polygon_area(boundary_polygon(d, 4096)) == pytest.approx(CARDIOID_AREA, rel=1e-5)

    def test_second_order_convergence(self, entries):
        d = entries["cardioid_power"].domain
        errs = [CARDIOID_AREA - polygon_area(boundary_polygon(d, n)) for n in (256, 512)]
        assert 3.5 < errs[0] / errs[1] < 4.5


def test_polygon_reorients_clockwise_input():
    p = Polygon([0, 1j, 1 + 1j, 1])
    assert polygon_area(p.vertices) == pytest.approx(1)
    assert p.area == pytest.approx(1)


@pytest.mark.parametrize("name", [n for n in ENTRY_NAMES if n != "cardioid_power"])
def test_constant_jacobian_inverse_is_reciprocal(entries, name):
    e = entries[name]
    z = e.sample(200)
    w = e.map.forward(z)
    inv = np.asarray(e.map.inverse_jacobian_on_image(w), dtype=float)
    J = np.asarray(e.map.jacobian(z), dtype=float)
    assert np.ptp(inv) <= 1e-12
    assert np.max(np.abs(inv - 1 / J)) <= 1e-12


def test_constant_jacobian_flags(entries):
    flagged = {n for n, e in entries.items() if e.constant_jacobian}
    assert flagged == set(ENTRY_NAMES) - {"cardioid_power"}


def test_cardioid_inverse_jacobian_identity(entries):
    e = entries["cardioid_power"]
    z = e.sample(1000, seed=3)
    w = e.map.forward(z)
    assert np.max(np.abs(e.map.inverse_jacobian_on_image(w) * e.map.jacobian(z) - 1)) <= 1e-12


@pytest.mark.parametrize("name, kind", [
    ("triangle_affine", "quasi_preserving"),
    ("cardioid_power", "quasi_preserving"),
    ("square_diag_stretch", "preserving"),
    ("square_shear_stretch", "preserving"),
    ("shear_flow", "preserving"),
    ("separable", "preserving"),
])
def test_measure_classes(entries, name, kind):
    assert entries[name].measure_class().kind == kind


def test_separable_non_preserving_slopes():
    e = entry("separable", a_slope=2.0, b_slope=1.0)
    assert e.measure_class().kind == "quasi_preserving"
    assert verify_entry(e, 200, 1e-6).passed


def test_samples_are_interior_and_reproducible(entries):
    e = entries["cardioid_power"]
    z1 = sample_interior(e.domain, 300, seed=7)
    z2 = sample_interior(e.domain, 300, seed=7)
    assert np.array_equal(z1, z2)
    assert e.domain.contains(z1).all()


def test_to_json_round_trips(entries):
    for e in entries.values():
        data = json.loads(json.dumps(e.to_json()))
        assert data["name"] == e.name
        assert data["area"] == pytest.approx(e.domain.area)
