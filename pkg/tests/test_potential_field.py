import numpy as np
import pytest

from nevdodge.errors import CoincidentPoints, DomainError, InputError
from nevdodge.process.potential_field import (
    PotentialGrid,
    gaussian_bump,
    lippmann_schwinger,
    scatter_solver,
    scattered_eval,
    self_cell_integral,
    total_kernel,
    volume_potential,
)
from nevdodge.process.special_functions import helmholtz_kernel


def zero_grid(cells=8, half_extent=0.3):
    h = 2 * half_extent / cells
    return PotentialGrid(
        origin=np.array([-half_extent, -half_extent]), h=h, nx=cells, ny=cells, values=np.zeros((cells, cells))
    )


def test_bump_support(bump, disk):
    assert not bump.is_zero
    xmin, ymin, xmax, ymax = bump.support_box()
    assert min(xmin, ymin) >= -0.5 - 1e-12 and max(xmax, ymax) <= 0.5 + 1e-12
    assert bump.support_clearance(disk) > 0.25
    bump.check_inside(disk)
    assert zero_grid().is_zero
    assert zero_grid().support_box() is None


def test_support_outside_domain_is_refused(oval):
    wide = gaussian_bump(width=0.5, half_extent=0.9, cells=16)
    with pytest.raises(InputError):
        wide.check_inside(oval)


def test_potential_schema(small_bump):
    again = PotentialGrid.from_dict(small_bump.to_dict())
    np.testing.assert_array_equal(again.values, small_bump.values)
    with pytest.raises(InputError):
        PotentialGrid.from_dict({"origin": [0, 0], "h": 0.1, "nx": 2, "ny": 2, "values": [1.0]})
    with pytest.raises(InputError):
        PotentialGrid.from_dict({"h": 0.1})


def test_sample_nearest_cell(small_bump):
    centers = small_bump.centers()
    np.testing.assert_allclose(small_bump.sample(centers), small_bump.values.ravel())
    assert small_bump.sample(np.array([[5.0, 5.0]]))[0] == 0.0


def test_self_cell_small_cell_limit():
    # ∫Φ over a disk of radius a ≈ (a²/4)(1 − 2 ln(ka/2) − 2γ) for small ka, plus i·area/4
    k, h = 2.0, 1e-3
    value = self_cell_integral(k, h)
    a = h / np.sqrt(np.pi)
    expected_real = a**2 / 4 * (1 - 2 * np.log(0.5 * k * a) - 2 * 0.5772156649015329)
    assert value.real == pytest.approx(expected_real, rel=1e-4)
    assert value.imag == pytest.approx(0.25 * h**2)


def test_zero_potential_scatters_nothing():
    grid = zero_grid()
    field = lippmann_schwinger(grid, 4.0, (2.0, 0.0))
    dist = np.linalg.norm(grid.centers() - np.array([2.0, 0.0]), axis=1)
    np.testing.assert_allclose(field.values, helmholtz_kernel(2.0, dist))
    assert scattered_eval(field, grid, 4.0, (0.5, 0.5)) == 0.0


def test_lippmann_schwinger_residual(small_bump):
    field = lippmann_schwinger(small_bump, 6.0, (1.5, 0.3))
    assert field.residual < 1e-10
    with pytest.raises(CoincidentPoints):
        lippmann_schwinger(small_bump, 6.0, small_bump.centers()[small_bump.support_mask()][0])
    with pytest.raises(DomainError):
        scatter_solver(small_bump, 0.1)


def test_total_kernel_reciprocity(small_bump):
    x, y = np.array([0.8, 0.1]), np.array([-0.6, 0.5])
    forward = total_kernel(small_bump, 6.0, x, y)
    backward = total_kernel(small_bump, 6.0, y, x)
    assert forward == pytest.approx(backward, rel=1e-10)
    # the potential actually scatters
    assert abs(forward - complex(helmholtz_kernel(np.sqrt(6.0), np.linalg.norm(x - y)))) > 1e-4


def test_total_kernel_normal_derivative(small_bump):
    x, y = np.array([0.8, 0.1]), np.array([-0.6, 0.5])
    normal = np.array([0.6, 0.8])
    h = 1e-5
    central = (
        total_kernel(small_bump, 6.0, x + h * normal, y) - total_kernel(small_bump, 6.0, x - h * normal, y)
    ) / (2 * h)
    assert total_kernel(small_bump, 6.0, x, y, "dnu_x", normal) == pytest.approx(central, abs=1e-6)


def test_volume_potential_solves_helmholtz_outside_sources(small_bump):
    lam = 6.0
    # same grid as the potential
    source = gaussian_bump(center=(0.1, -0.05), amplitude=1.0, width=0.05, half_extent=0.3, cells=16)
    field = volume_potential(small_bump, lam, source.values)
    x, h = np.array([0.7, 0.4]), 1e-3
    shifts = np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    values = field.value(np.vstack([x, x + shifts]))
    laplacian = (np.sum(values[1:]) - 4 * values[0]) / h**2
    assert abs(laplacian + lam * values[0]) < 1e-5 * max(1.0, lam * abs(values[0]))
    grad = field.gradient(x[None, :])[0]
    np.testing.assert_allclose(grad, [(values[1] - values[2]) / (2 * h), (values[3] - values[4]) / (2 * h)], atol=1e-6)


def _scaled(potential, factor):
    return PotentialGrid(
        origin=potential.origin, h=potential.h, nx=potential.nx, ny=potential.ny, values=factor * potential.values
    )


def test_born_limit(small_bump):
    lam, y, x = 6.0, np.array([1.5, 0.3]), np.array([0.7, -0.6])
    errors = []
    for eps in (1e-2, 1e-3):
        weak = _scaled(small_bump, eps)
        solver = scatter_solver(weak, lam)
        first_born = solver.apply(x[None, :], solver.v * solver.incident(y)[:, 0])[0]
        errors.append(abs(scattered_eval(lippmann_schwinger(weak, lam, y), weak, lam, x) - first_born))
    # ‖u_sc − K[V u_in]‖ = O(ε²)
    assert errors[0] / errors[1] == pytest.approx(100.0, rel=0.05)


def test_scattered_field_reciprocity(small_bump):
    lam, x, y = 6.0, np.array([0.8, 0.1]), np.array([-0.6, 0.5])
    forward = scattered_eval(lippmann_schwinger(small_bump, lam, y), small_bump, lam, x)
    backward = scattered_eval(lippmann_schwinger(small_bump, lam, x), small_bump, lam, y)
    assert abs(forward - backward) < 1e-6
    assert abs(forward) > 1e-4


def test_scattered_field_solves_helmholtz_outside_support(small_bump):
    lam, y, x, h = 6.0, np.array([1.5, 0.3]), np.array([0.7, -0.6]), 1e-3
    field = lippmann_schwinger(small_bump, lam, y)
    stencil = x + np.array([[0.0, 0.0], [h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    values = np.array([scattered_eval(field, small_bump, lam, point) for point in stencil])
    laplacian = (np.sum(values[1:]) - 4 * values[0]) / h**2
    assert abs(laplacian + lam * values[0]) < 1e-5


@pytest.mark.slow
def test_grid_refinement_converges():
    lam, y, x = 6.0, np.array([1.5, 0.3]), np.array([0.7, -0.6])
    values = []
    for cells in (12, 24, 48):
        grid = gaussian_bump(center=(0.1, -0.05), amplitude=2.0, width=0.1, half_extent=0.3, cells=cells)
        values.append(scattered_eval(lippmann_schwinger(grid, lam, y), grid, lam, x))
    # each halving of h at least halves the change
    assert abs(values[1] - values[2]) <= 0.5 * abs(values[0] - values[1])
