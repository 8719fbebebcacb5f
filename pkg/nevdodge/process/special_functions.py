"""
Bessel and Hankel functions, the outgoing fundamental solution of Δ+λ in the
plane and the zeros of Bessel derivatives that give the Neumann spectrum of
the unit disk.

    Φ_λ(x − y) = (i/4) H₀⁽¹⁾(√λ |x − y|)
    ∇_x Φ_λ(x − y) = −(i√λ/4) H₁⁽¹⁾(√λ |x − y|) (x − y)/|x − y|

Φ_λ is outgoing and satisfies (Δ+λ)Φ_λ = −δ₀, the sign shared by the
logarithmic Laplace kernel −(1/2π) ln r it reduces to at short range.
"""

import logging
from typing import Union

import numpy as np
from scipy.optimize import brentq
from scipy.special import hankel1, jnp_zeros, jv, jvp, yv

from nevdodge.errors import CoincidentPoints, DomainError

log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# scipy's jnp_zeros may report the trivial zero at x = 0 for m ≥ 1
_TRIVIAL_ZERO = 1e-8


def bessel_j(m: int, x: ArrayLike) -> ArrayLike:
    """Bessel function of the first kind J_m(x)."""
    if m < 0:
        raise DomainError(f"order must be non-negative, got {m}")
    return jv(m, x)


def bessel_y(m: int, x: ArrayLike) -> ArrayLike:
    """Bessel function of the second kind Y_m(x), x > 0."""
    if m < 0:
        raise DomainError(f"order must be non-negative, got {m}")
    if np.any(np.asarray(x) <= 0):
        raise DomainError("Y_m is only defined for x > 0")
    return yv(m, x)


def _separation(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    dist = np.linalg.norm(diff, axis=-1)
    if np.any(dist == 0.0):
        raise CoincidentPoints("fundamental solution evaluated at x = y")
    return diff, dist


def fundamental_solution(lam: float, x: np.ndarray, y: np.ndarray) -> ArrayLike:
    """Φ_λ(x − y) for points (or broadcastable arrays of points) x ≠ y."""
    _, dist = _separation(x, y)
    return 0.25j * hankel1(0, np.sqrt(lam) * dist)


def grad_fundamental_solution(lam: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of Φ_λ(x − y) in x; the last axis holds the two components."""
    diff, dist = _separation(x, y)
    k = np.sqrt(lam)
    radial = -0.25j * k * hankel1(1, k * dist) / dist
    return radial[..., None] * diff


def helmholtz_kernel(k: float, dist: np.ndarray) -> np.ndarray:
    """(i/4) H₀⁽¹⁾(k r) on an array of positive distances."""
    return 0.25j * hankel1(0, k * dist)


def helmholtz_radial_derivative(k: float, dist: np.ndarray) -> np.ndarray:
    """d/dr of (i/4) H₀⁽¹⁾(k r), divided by r; multiply by (x − y) for the gradient."""
    return -0.25j * k * hankel1(1, k * dist) / dist


def laplace_kernel(dist: np.ndarray) -> np.ndarray:
    """−(1/2π) ln r, the λ → 0 counterpart used to check orientation."""
    return -np.log(dist) / (2.0 * np.pi)


def laplace_radial_derivative(dist: np.ndarray) -> np.ndarray:
    return -1.0 / (2.0 * np.pi * dist**2)


def bessel_deriv_zero(m: int, k: int) -> float:
    """k-th positive zero j′_{m,k} of J_m′.

    Candidates come from scipy and are polished by Brent's method on J_m′
    inside a bracket of half the gap to the neighbouring zeros.
    """
    if m < 0 or k < 1:
        raise DomainError(f"need m ≥ 0 and k ≥ 1, got m={m}, k={k}")
    zeros = jnp_zeros(m, k + 1)
    zeros = zeros[zeros > _TRIVIAL_ZERO]
    root = float(zeros[k - 1])
    half_gap = 0.25 * np.pi
    lo, hi = root - half_gap, root + half_gap
    if jvp(m, lo) * jvp(m, hi) < 0:
        root = brentq(lambda x: jvp(m, x), lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return root


def disk_neumann_eigenvalues(
    lam_min: float, lam_max: float, radius: float = 1.0
) -> list[tuple[float, int]]:
    """Neumann eigenvalues of the disk in [lam_min, lam_max] with multiplicity.

    The spectrum is {(j′_{m,k}/R)²}; angular order m ≥ 1 contributes the
    cosine and sine mode, hence multiplicity 2.
    """
    found = []
    m = 0
    while (bessel_deriv_zero(m, 1) / radius) ** 2 <= lam_max:
        k = 1
        while True:
            value = (bessel_deriv_zero(m, k) / radius) ** 2
            if value > lam_max:
                break
            if value >= lam_min:
                found.append((value, 1 if m == 0 else 2))
            k += 1
        m += 1
    return sorted(found)
