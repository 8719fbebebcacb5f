import numpy as np
import pytest
from scipy.special import jv, jvp

from nevdodge.errors import InputError, NearEigenvalue
from nevdodge.geometry.boundary_geometry import quadrature
from nevdodge.process.eigen_scanner import eigenpair
from nevdodge.process.layer_potentials import assemble
from nevdodge.process.neumann_solver import (
    gaussian_source,
    smooth_preset,
    BOUNDARY_PRESETS,
    default_probes,
    exterior_source_point,
    solvability_residual,
    solve_full,
    solve_reduced,
    source_preset,
)

from tests.conftest import RADIAL_MODE


@pytest.mark.parametrize("with_potential", [False, True])
def test_exterior_source_is_reproduced(disk, bump, with_potential):
    potential = bump if with_potential else None
    kernels = assemble(5.0, quadrature(disk, 128), potential)
    preset = BOUNDARY_PRESETS["exterior-source"]
    solution = solve_reduced(kernels, preset.f2(kernels))
    probes = default_probes(disk)
    np.testing.assert_allclose(solution.value(probes), preset.exact(kernels, probes), atol=1e-7)
    assert solution.condition < 1e6


def test_exterior_source_lies_outside(oval):
    point = exterior_source_point(oval)
    assert np.linalg.norm(point) > 2.0


def test_zero_data_gives_zero_solution(disk):
    kernels = assemble(5.0, quadrature(disk, 64))
    solution = solve_reduced(kernels, BOUNDARY_PRESETS["zeros"].f2(kernels))
    np.testing.assert_array_equal(solution.density, 0.0)
    assert solution.value((0.2, 0.1)) == 0.0


def test_near_eigenvalue_is_refused(disk):
    kernels = assemble(RADIAL_MODE, quadrature(disk, 128))
    with pytest.raises(NearEigenvalue):
        solve_reduced(kernels, np.ones(128))


def test_boundary_data_length(disk):
    kernels = assemble(5.0, quadrature(disk, 64))
    with pytest.raises(InputError):
        solve_reduced(kernels, np.ones(32))


def test_interior_source(disk):
    lam = 5.0
    f1 = source_preset("bump-source", disk, None)
    solution = solve_full(disk, lam, None, f1, lambda points, normals: normals[:, 0], n_nodes=128)
    np.testing.assert_allclose(solution.boundary_dnu(), np.cos(solution.kernels.quad.s), atol=1e-8)
    # (Δ+λ)u = 0 away from the source support
    x, h = np.array([0.6, 0.1]), 1e-3
    shifts = np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    values = solution.value(np.vstack([x, x + shifts]))
    residual = (np.sum(values[1:]) - 4 * values[0]) / h**2 + lam * values[0]
    assert abs(residual) < 1e-5 * max(1.0, abs(lam * values[0]))


def test_source_presets(disk, bump):
    assert source_preset("zero", disk, bump) is None
    on_grid = source_preset("bump-source", disk, bump)
    assert (on_grid.nx, on_grid.ny, on_grid.h) == (bump.nx, bump.ny, bump.h)
    with pytest.raises(InputError):
        source_preset("plane-wave", disk, None)


def test_solvability_at_the_radial_mode(disk):
    pair = eigenpair(disk, None, RADIAL_MODE, n_nodes=128)
    quad = pair.quad
    # the normalised radial mode has trace 1/√π, so ∫ 1·u = 2√π
    (constant,) = solvability_residual(quad, None, np.ones(quad.n), list(pair.functions))
    assert abs(constant) == pytest.approx(2 * np.sqrt(np.pi), rel=1e-6)
    # purely imaginary data is just as unsolvable
    (imaginary,) = solvability_residual(quad, None, 1j * np.ones(quad.n), list(pair.functions))
    assert imaginary.real == pytest.approx(0.0, abs=1e-10)
    assert abs(imaginary) == pytest.approx(2 * np.sqrt(np.pi), rel=1e-6)
    (orthogonal,) = solvability_residual(quad, None, np.cos(quad.s), list(pair.functions))
    assert abs(orthogonal) < 1e-8
    assert solvability_residual(quad, None, np.ones(quad.n), []) == []


@pytest.mark.parametrize("n_nodes", [64, 128])
def test_boundary_values_on_circle(disk, n_nodes):
    # ∂_νu = cos 2s on the unit circle: u = J₂(kr) cos 2θ / (k J₂′(k))
    lam = 5.0
    k = np.sqrt(lam)
    kernels = assemble(lam, quadrature(disk, n_nodes))
    solution = solve_reduced(kernels, np.cos(2 * kernels.quad.s))
    expected = jv(2, k) / (k * jvp(2, k)) * np.cos(2 * kernels.quad.s)
    np.testing.assert_allclose(solution.boundary_values(), expected, atol=1e-10)
    inside = np.array([0.5, 0.0])
    assert solution.value(inside) == pytest.approx(jv(2, 0.5 * k) / (k * jvp(2, k)), abs=1e-10)


def test_manufactured_smooth_source(disk):
    lam = 2.0
    source, exact = gaussian_source((0.1, 0.0), 0.12, lam)
    solution = solve_full(disk, lam, None, None, np.zeros(128), n_nodes=128, smooth=source)
    probes = np.vstack([default_probes(disk), [[0.1, 0.0], [0.15, 0.05]]])
    np.testing.assert_allclose(solution.value(probes), exact(probes), atol=1e-6)
    np.testing.assert_allclose(solution.boundary_dnu(), 0.0, atol=1e-8)


def test_smooth_source_gradient_matches_differences():
    source, _ = gaussian_source((0.0, 0.0), 0.2, 3.0)
    points = np.array([[0.1, -0.05], [0.25, 0.3]])
    bare = type(source)(func=source.func, center=source.center, radius=source.radius)
    np.testing.assert_allclose(source.gradient(points), bare.gradient(points), rtol=1e-6)


def test_smooth_source_must_fit(disk):
    source, _ = gaussian_source((0.6, 0.0), 0.1, 2.0)
    with pytest.raises(InputError):
        solve_full(disk, 2.0, None, None, np.zeros(64), n_nodes=64, smooth=source)
    assert smooth_preset("bump-source", disk, 2.0) is None
    preset, _ = smooth_preset("gaussian-source", disk, 2.0)
    assert preset.radius == pytest.approx(0.6)
