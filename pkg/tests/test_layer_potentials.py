import numpy as np
import pytest
from scipy.special import h1vp, hankel1, jv

from nevdodge.errors import DomainError, TooCloseToBoundary
from nevdodge.geometry.boundary_geometry import quadrature
from nevdodge.process.layer_potentials import (
    assemble,
    assemble_laplace,
    boundary_traces,
    eval_double,
    eval_single,
    eval_single_gradient,
    green_representation,
    exterior_source_field,
    interpolate_density,
    jump_suite,
)


@pytest.fixture(scope="module")
def disk_kernels(disk):
    return assemble(5.0, quadrature(disk, 64))


def test_single_layer_on_circle(disk_kernels):
    # e^{ims} diagonalises 𝒮 on the unit circle with eigenvalue (iπ/2) J_m(k) H_m(k)
    k = np.sqrt(5.0)
    density = np.cos(2 * disk_kernels.quad.s)
    expected = 0.5j * np.pi * jv(2, k) * hankel1(2, k) * density
    np.testing.assert_allclose(disk_kernels.single @ density, expected, atol=1e-10)


def test_double_layer_on_circle(disk_kernels):
    k = np.sqrt(5.0)
    density = np.cos(2 * disk_kernels.quad.s)
    eigen = 0.5 + 0.5j * np.pi * k * jv(2, k) * h1vp(2, k)
    np.testing.assert_allclose(disk_kernels.double @ density, eigen * density, atol=1e-10)
    np.testing.assert_allclose(disk_kernels.adjoint @ density, eigen * density, atol=1e-10)
    # inner trace of 𝒟f is the interior field's boundary value
    inner = boundary_traces(disk_kernels, density, "inner", "double_value")
    np.testing.assert_allclose(inner, (eigen - 0.5) * density, atol=1e-10)


def test_laplace_reference(disk):
    kernels = assemble_laplace(quadrature(disk, 64))
    ones = np.ones(64)
    assert eval_double(kernels, ones, (0.2, -0.1)) == pytest.approx(-1.0, abs=1e-12)
    assert eval_double(kernels, ones, (2.0, 0.5)) == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(kernels.double @ ones, -0.5, atol=1e-12)
    density = np.cos(3 * kernels.quad.s)
    np.testing.assert_allclose(kernels.single @ density, density / 6, atol=1e-12)


def test_green_representation_free_space(disk_kernels):
    probes = np.array([[0.1, 0.2], [-0.3, 0.1], [0.0, -0.4]])
    trace, dnu, exact = exterior_source_field(disk_kernels, (2.0, 1.5), probes)
    represented = green_representation(disk_kernels, trace, dnu, probes)
    np.testing.assert_allclose(represented, exact, atol=1e-10)


def test_jump_suite_with_potential(disk, bump):
    report = jump_suite(assemble(5.0, quadrature(disk, 128), bump))
    assert report["n_nodes"] == 128
    for row in report["jumps"]:
        assert row["single_dnu_jump"] < 1e-12
        assert row["double_value_jump"] < 1e-12
    assert report["green_representation"] < 1e-6
    assert report["adjointness"] < 1e-8


def test_potential_changes_the_kernels(disk, bump):
    quad = quadrature(disk, 64)
    free, scattered = assemble(5.0, quad), assemble(5.0, quad, bump)
    assert free.scatter_u is None and scattered.has_scatter
    assert np.max(np.abs(free.single - scattered.single)) > 1e-4


def test_single_layer_gradient(disk_kernels):
    density = np.exp(np.cos(disk_kernels.quad.s))
    x, h = np.array([0.2, -0.3]), 1e-5
    grad = eval_single_gradient(disk_kernels, density, x)
    central = [
        (eval_single(disk_kernels, density, x + h * e) - eval_single(disk_kernels, density, x - h * e)) / (2 * h)
        for e in np.eye(2)
    ]
    np.testing.assert_allclose(grad, central, atol=1e-7)


def test_interpolate_density_is_exact_on_trigonometric_data():
    coarse = np.cos(3 * np.arange(32) * 2 * np.pi / 32) + 0.25
    fine = interpolate_density(coarse, 64)
    np.testing.assert_allclose(fine, np.cos(3 * np.arange(64) * 2 * np.pi / 64) + 0.25, atol=1e-13)


def test_errors(disk, disk_kernels):
    with pytest.raises(DomainError):
        assemble(0.3, quadrature(disk, 64))
    with pytest.raises(TooCloseToBoundary):
        eval_single(disk_kernels, np.ones(64), (0.9, 0.0))
    with pytest.raises(ValueError):
        boundary_traces(disk_kernels, np.ones(64), "left", "single_dnu")


def test_green_representation_on_a_perturbed_disk(perturbed):
    report = jump_suite(assemble(5.0, quadrature(perturbed, 128)))
    assert report["green_representation"] < 1e-8
    assert report["adjointness"] < 1e-10
