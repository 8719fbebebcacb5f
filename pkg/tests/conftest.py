"""
Shared domains and potentials.
"""

import numpy as np
import pytest

from nevdodge.geometry.boundary_geometry import circle, ellipse, radial_curve
from nevdodge.process.potential_field import gaussian_bump
from nevdodge.process.special_functions import bessel_deriv_zero

# (j′_{0,1})², (j′_{1,1})², (j′_{2,1})²
RADIAL_MODE = bessel_deriv_zero(0, 1) ** 2
FIRST_PAIR = bessel_deriv_zero(1, 1) ** 2
SECOND_PAIR = bessel_deriv_zero(2, 1) ** 2


@pytest.fixture(scope="session")
def disk():
    return circle(1.0)


@pytest.fixture(scope="session")
def oval():
    return ellipse(1.2, 0.8)


@pytest.fixture(scope="session")
def perturbed():
    return radial_curve(1.0, 0.1, 3)


@pytest.fixture(scope="session")
def bump():
    """Centred Gaussian, A = 1, w = 0.3, on a 32×32 grid over [−0.5, 0.5]²."""
    return gaussian_bump(center=(0.0, 0.0), amplitude=1.0, width=0.3, half_extent=0.5, cells=32)


@pytest.fixture(scope="session")
def small_bump():
    return gaussian_bump(center=(0.1, -0.05), amplitude=2.0, width=0.1, half_extent=0.3, cells=16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
