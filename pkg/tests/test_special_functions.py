import numpy as np
import pytest

from nevdodge.constants import EULER_GAMMA
from nevdodge.errors import CoincidentPoints, DomainError
from nevdodge.process.special_functions import (
    bessel_deriv_zero,
    bessel_j,
    bessel_y,
    disk_neumann_eigenvalues,
    fundamental_solution,
    grad_fundamental_solution,
    laplace_kernel,
)


@pytest.mark.parametrize(
    "m, k, expected",
    [
        (0, 1, 3.8317059702075125),
        (0, 2, 7.0155866698156187),
        (1, 1, 1.8411837813406593),
        (2, 1, 3.0542369282271404),
        (3, 1, 4.2011889412105285),
    ],
)
def test_bessel_derivative_zeros(m, k, expected):
    assert bessel_deriv_zero(m, k) == pytest.approx(expected, abs=1e-12)


def test_disk_spectrum_oracle():
    found = disk_neumann_eigenvalues(3.0, 30.0)
    values = [value for value, _ in found]
    assert values == sorted(values)
    assert [mult for _, mult in found] == [2, 2, 1, 2, 2, 2]
    assert values[0] == pytest.approx(3.38996, abs=1e-5)
    assert values[2] == pytest.approx(14.68197, abs=1e-5)
    assert values[-2:] == pytest.approx([28.27637, 28.42428], abs=1e-5)


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)
    with pytest.raises(DomainError):
        bessel_y(0, 0.0)
    with pytest.raises(DomainError):
        bessel_deriv_zero(0, 0)
    assert bessel_j(0, 0.0) == 1.0


def test_logarithmic_singularity():
    lam = 7.0
    r = 1e-6
    x = np.array([r, 0.0])
    difference = fundamental_solution(lam, x, np.zeros(2)) - laplace_kernel(r)
    expected = 0.25j - (np.log(0.5 * np.sqrt(lam)) + EULER_GAMMA) / (2 * np.pi)
    assert difference == pytest.approx(expected, abs=1e-9)


def test_coincident_points():
    with pytest.raises(CoincidentPoints):
        fundamental_solution(2.0, np.array([0.3, 0.1]), np.array([0.3, 0.1]))


def test_helmholtz_equation_away_from_source():
    lam, h = 5.0, 1e-3
    y = np.array([0.1, -0.2])
    x = np.array([0.7, 0.2])
    shifts = [np.array([h, 0.0]), np.array([-h, 0.0]), np.array([0.0, h]), np.array([0.0, -h])]
    laplacian = (
        sum(fundamental_solution(lam, x + d, y) for d in shifts) - 4 * fundamental_solution(lam, x, y)
    ) / h**2
    assert abs(laplacian + lam * fundamental_solution(lam, x, y)) < 1e-5


def test_gradient_matches_finite_differences():
    lam, h = 3.0, 1e-6
    y = np.array([0.0, 0.0])
    x = np.array([0.4, -0.3])
    grad = grad_fundamental_solution(lam, x, y)
    for axis in range(2):
        step = np.zeros(2)
        step[axis] = h
        central = (fundamental_solution(lam, x + step, y) - fundamental_solution(lam, x - step, y)) / (2 * h)
        assert grad[axis] == pytest.approx(central, abs=1e-7)
