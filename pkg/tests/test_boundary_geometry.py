import numpy as np
import pytest

from nevdodge.errors import (
    DeformationTooLarge,
    DegenerateParametrization,
    NonSimpleCurve,
    NotStarShaped,
    ResolutionTooLow,
)
from nevdodge.geometry.boundary_geometry import (
    BoundaryCurve,
    DeformationField,
    arclength_derivative,
    boundary_distance,
    bump_profile,
    circle,
    contains,
    curvature_at,
    deform,
    make_curve,
    nodes,
    polar_rule,
    quadrature,
    to_fourier,
)


def test_circle_quadrature(disk):
    quad = quadrature(disk, 64)
    assert quad.perimeter == pytest.approx(2 * np.pi, abs=1e-12)
    np.testing.assert_allclose(quad.normals, quad.points, atol=1e-13)
    np.testing.assert_allclose(quad.curvature, 1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(quad.tangents, axis=1), 1.0, atol=1e-13)


def test_ellipse_area_and_curvature(oval):
    assert oval.signed_area() == pytest.approx(np.pi * 1.2 * 0.8, rel=1e-12)
    # κ at the end of the major axis is a/b²
    assert curvature_at(oval, 0.0) == pytest.approx(1.2 / 0.8**2, rel=1e-12)
    np.testing.assert_allclose(oval.centroid(), [0.0, 0.0], atol=1e-13)


def test_trapezoid_rule_is_spectral(oval):
    quad = quadrature(oval, 64)
    # ∫ x ν_x dS = area by the divergence theorem
    assert np.sum(quad.weights * quad.points[:, 0] * quad.normals[:, 0]) == pytest.approx(
        np.pi * 0.96, rel=1e-12
    )


def test_arclength_derivative_on_circle(disk):
    quad = quadrature(disk, 32)
    np.testing.assert_allclose(arclength_derivative(quad, np.cos(quad.s)), -np.sin(quad.s), atol=1e-12)


def test_rejects_broken_coefficients():
    with pytest.raises(DegenerateParametrization):
        make_curve([0.5, 0.0, 0.7], [0.5j, 0.0, -0.5j])
    # clockwise unit circle
    with pytest.raises(DegenerateParametrization):
        make_curve([0.5, 0.0, 0.5], [-0.5j, 0.0, 0.5j])
    with pytest.raises(DegenerateParametrization):
        make_curve([0.5, 0.0], [0.5j, 0.0])


def test_rejects_figure_eight():
    # x = cos s, y = sin 2s crosses itself at the origin
    with pytest.raises(NonSimpleCurve):
        make_curve([0, 0.5, 0, 0.5, 0], [0.5j, 0, 0, 0, -0.5j])


def test_quadrature_resolution(perturbed):
    with pytest.raises(ResolutionTooLow):
        quadrature(perturbed, 14)
    with pytest.raises(ResolutionTooLow):
        quadrature(perturbed, 33)
    assert quadrature(perturbed, 16).n == 16


def test_dilation_scales_the_disk(disk):
    field = DeformationField.dilation(disk)
    assert field.c1_norm(disk) == pytest.approx(1.0, rel=1e-10)
    grown = deform(disk, field, 0.1)
    np.testing.assert_allclose(np.linalg.norm(grown.points(nodes(64)), axis=1), 1.1, atol=1e-12)
    with pytest.raises(DeformationTooLarge):
        deform(disk, field, 1.0)
    assert deform(disk, field, 0.0) is disk


def test_frozen_arc_stays_put(disk, rng):
    field = DeformationField.random_trigonometric(4, 0.5, rng, sigma_arc=(0.0, 0.5 * np.pi))
    moved = deform(disk, field, 0.05)
    s = nodes(128)
    on_arc = s <= 0.5 * np.pi
    assert np.max(np.abs(moved.points(s[on_arc]) - disk.points(s[on_arc]))) == 0.0
    assert np.max(np.abs(moved.points(s[~on_arc]) - disk.points(s[~on_arc]))) > 1e-4


def test_random_fields_are_seeded(disk):
    first = DeformationField.random_trigonometric(4, 0.5, np.random.default_rng(7))
    second = DeformationField.random_trigonometric(4, 0.5, np.random.default_rng(7))
    np.testing.assert_array_equal(first.field_x, second.field_x)
    np.testing.assert_array_equal(first.field_y, second.field_y)
    # amplitudes bounded by 0.5/K per mode
    assert np.max(np.abs(first.field_x)) <= np.sqrt(2) * 0.5 * 0.5 / 4


def test_potential_box_cutoff(disk):
    field = DeformationField.dilation(disk, v_box=(-0.2, -0.2, 0.2, 0.2), v_margin=0.1)
    s = nodes(64)
    # the disk boundary is 0.8·√2 away from the box corners at the farthest
    np.testing.assert_allclose(field.eta(s, disk.points(s)), 1.0)
    near = field.eta(np.array([0.0]), np.array([[0.25, 0.0]]))
    assert near[0] == 0.0


def test_normal_bump_profile(disk):
    s = nodes(256)
    profile = bump_profile(s, np.pi, 1.0)
    assert profile[128] == pytest.approx(1.0)
    assert np.all(profile[np.abs(s - np.pi) >= 0.5] == 0.0)
    bump = DeformationField.normal_bump(disk, np.pi, 1.0)
    quad = quadrature(disk, 256)
    sigma = np.einsum("ik,ik->i", bump.displacement(quad.s, quad.points), quad.normals)
    np.testing.assert_allclose(sigma, profile, atol=1e-13)
    # no tangential part and nothing outside the bump
    assert np.all(sigma[profile == 0.0] == 0.0)
    np.testing.assert_allclose(bump.scaled(0.5).vector(quad.s), 0.5 * bump.vector(quad.s), atol=1e-15)


def test_refit_after_deformation(disk):
    grown = deform(disk, DeformationField.dilation(disk), 0.1)
    refit = to_fourier(grown, 4)
    assert isinstance(refit, BoundaryCurve)
    assert not refit.steps
    np.testing.assert_allclose(refit.points(nodes(64)), grown.points(nodes(64)), atol=1e-12)
    assert refit.to_dict()["K"] == 4


def test_polar_rule(disk, oval):
    rule = polar_rule(disk, 16, 64)
    assert rule.integrate(np.ones(len(rule.weights))) == pytest.approx(np.pi, rel=1e-12)
    assert rule.integrate(rule.points[:, 0] ** 2) == pytest.approx(0.25 * np.pi, rel=1e-12)
    assert polar_rule(oval, 16, 64).integrate(np.ones(16 * 64)) == pytest.approx(
        np.pi * 0.96, rel=1e-12
    )
    with pytest.raises(NotStarShaped):
        polar_rule(disk, 8, 32, center=(2.0, 0.0))


def test_contains_and_distance(disk):
    inside = contains(disk, np.array([[0.0, 0.0], [0.9, 0.0], [1.1, 0.0], [0.0, -2.0]]))
    assert inside.tolist() == [True, True, False, False]
    assert boundary_distance(disk, np.array([[0.5, 0.0]]))[0] == pytest.approx(0.5, abs=1e-4)


def test_round_trip_of_domain_schema():
    curve = circle(2.0, center=(0.5, -0.5))
    again = BoundaryCurve.from_dict(curve.to_dict())
    np.testing.assert_allclose(again.points(nodes(16)), curve.points(nodes(16)))
    with pytest.raises(DegenerateParametrization):
        BoundaryCurve.from_dict({**curve.to_dict(), "K": 3})
