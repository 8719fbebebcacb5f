import numpy as np
import pytest

from nevdodge.process.eigen_scanner import scan
from nevdodge.process.fd_eigensolver import polar_neumann_eigenvalues, polar_operator
from nevdodge.process.potential_field import gaussian_bump

from tests.conftest import FIRST_PAIR, SECOND_PAIR


def test_operator_is_symmetric_with_constant_kernel():
    stiffness, mass = polar_operator(1.0, None, 8, 16)
    assert abs(stiffness - stiffness.T).max() < 1e-14
    np.testing.assert_allclose(stiffness @ np.ones(8 * 16), 0.0, atol=1e-12)
    assert mass.diagonal().sum() == pytest.approx(np.pi)


def test_free_disk_spectrum():
    values = polar_neumann_eigenvalues(count=3)
    np.testing.assert_allclose(values, [FIRST_PAIR, FIRST_PAIR, SECOND_PAIR], atol=1e-2)


@pytest.mark.slow
def test_agrees_with_the_boundary_integral_scan(disk):
    bump = gaussian_bump(amplitude=1.0, width=0.3, half_extent=0.5, cells=32)
    expected = polar_neumann_eigenvalues(potential=bump, count=3)
    report = scan(disk, bump, 3.0, 10.0, steps=71, n_nodes=64)
    found = [value for value, mult in report.eigenvalues for _ in range(mult)][:3]
    np.testing.assert_allclose(found, expected, rtol=1e-2)
