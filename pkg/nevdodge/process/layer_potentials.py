"""
Single layer 𝒮, double layer 𝒟 and adjoint double layer 𝒩 built on the total
Green kernel u_to = u_in + u_sc, discretised by the Nyström method.

Matrices act on node values. The free part u_in = Φ_λ has a logarithmic
singularity; its kernels are split as

    M(t, τ) = M₁(t, τ) ln(4 sin²((t−τ)/2)) + M₂(t, τ)

with M₁, M₂ smooth, and the logarithm integrated by the weights

    R_j(t) = −(2π/n) Σ_{m=1}^{n−1} cos(m(t−t_j))/m − (π/n²) cos(n(t−t_j)),  N = 2n.

The scattered part u_sc is smooth near ∂Ω and uses the plain trapezoid rule.

Jump relations with ν outward, + outside and − inside Ω:

    ∂_ν(𝒮f)_± = 𝒩f ∓ ½f,      (𝒟f)_± = 𝒟f ± ½f.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import j0, j1

from nevdodge.constants import EULER_GAMMA, LAMBDA_FLOOR, NEAR_BOUNDARY_FACTOR
from nevdodge.errors import DomainError, TooCloseToBoundary
from nevdodge.geometry.boundary_geometry import SurfaceQuadrature
from nevdodge.process.potential_field import PotentialGrid, ScatterSolver, scatter_solver
from nevdodge.process.special_functions import (
    helmholtz_kernel,
    helmholtz_radial_derivative,
    laplace_kernel,
    laplace_radial_derivative,
)
from nevdodge.utils.caching import cache

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KernelMatrixSet:
    """Discrete 𝒮, 𝒟, 𝒩 at one λ on one quadrature.

    ``scatter_u`` and ``scatter_du`` hold u_to(z, y_j) and ∂_{ν_y}u_to(z, y_j)
    on the potential support; they feed evaluation away from the boundary.
    """

    lam: float
    quad: SurfaceQuadrature
    potential: Optional[PotentialGrid]
    single: np.ndarray
    double: np.ndarray
    adjoint: np.ndarray
    laplace: bool = False
    scatter_u: Optional[np.ndarray] = None
    scatter_du: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.quad.n

    @property
    def has_scatter(self) -> bool:
        return self.scatter_u is not None

    def solver(self) -> ScatterSolver:
        return scatter_solver(self.potential, self.lam)

    def adjointness_residual(self) -> float:
        """‖W𝒩 − (W𝒟)ᵀ‖ / ‖W𝒟‖ with W the weight diagonal."""
        weights = self.quad.weights[:, None]
        lhs = weights * self.adjoint
        rhs = (weights * self.double).T
        return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def log_weights(n_nodes: int) -> np.ndarray:
    """Matrix R_ij = R(t_i − t_j) of the logarithmic quadrature."""
    half = n_nodes // 2
    offsets = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    modes = np.arange(1, half)
    row = -(2.0 * np.pi / half) * (np.cos(np.outer(offsets, modes)) @ (1.0 / modes))
    row -= np.pi / half**2 * np.cos(half * offsets)
    index = (np.arange(n_nodes)[:, None] - np.arange(n_nodes)[None, :]) % n_nodes
    return row[index]


def _geometry(quad: SurfaceQuadrature):
    diff = quad.points[:, None, :] - quad.points[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    off = ~np.eye(quad.n, dtype=bool)
    safe = np.where(off, dist, 1.0)
    gap = quad.s[:, None] - quad.s[None, :]
    with np.errstate(divide="ignore"):
        logterm = np.where(off, np.log(4.0 * np.sin(0.5 * gap) ** 2), 0.0)
    normal_y = np.einsum("ijk,jk->ij", diff, quad.normals)
    normal_x = np.einsum("ijk,ik->ij", diff, quad.normals)
    return diff, safe, off, logterm, normal_y, normal_x


def _curvature_diagonal(quad: SurfaceQuadrature) -> np.ndarray:
    # limit of the double and adjoint kernels (times |γ′|) at t = τ
    return -quad.curvature * quad.speed / (4.0 * np.pi)


def _free_helmholtz(lam: float, quad: SurfaceQuadrature):
    k = np.sqrt(lam)
    _, dist, off, logterm, normal_y, normal_x = _geometry(quad)
    speed_y = quad.speed[None, :]
    h = 2.0 * np.pi / quad.n
    weights = log_weights(quad.n)
    kr = np.where(off, k * dist, 0.0)

    full = helmholtz_kernel(k, dist) * speed_y
    log_part = -j0(kr) / (4.0 * np.pi) * speed_y
    smooth = np.where(off, full - log_part * logterm, 0.0)
    diag = (0.25j - (EULER_GAMMA + np.log(0.5 * k * quad.speed)) / (2.0 * np.pi)) * quad.speed
    smooth[~off] = diag
    single = weights * log_part + h * smooth

    bessel = j1(kr) / dist
    radial = helmholtz_radial_derivative(k, dist)
    full = -radial * normal_y * speed_y
    log_part = np.where(off, -k / (4.0 * np.pi) * bessel * normal_y * speed_y, 0.0)
    smooth = np.where(off, full - log_part * logterm, 0.0)
    smooth[~off] = _curvature_diagonal(quad)
    double = weights * log_part + h * smooth

    full = radial * normal_x * speed_y
    log_part = np.where(off, k / (4.0 * np.pi) * bessel * normal_x * speed_y, 0.0)
    smooth = np.where(off, full - log_part * logterm, 0.0)
    smooth[~off] = _curvature_diagonal(quad)
    adjoint = weights * log_part + h * smooth
    return single, double, adjoint


def _scatter_parts(solver: ScatterSolver, quad: SurfaceQuadrature):
    """u_sc contributions (trapezoid rule) and the support fields behind them."""
    total = solver.solve(solver.incident(quad.points))
    total_dnu = solver.solve(solver.incident_dnu(quad.points, quad.normals))
    weights = quad.weights[None, :]
    single = solver.apply(quad.points, solver.v[:, None] * total) * weights
    double = solver.apply(quad.points, solver.v[:, None] * total_dnu) * weights
    gradient = solver.apply_gradient(quad.points, solver.v[:, None] * total)
    adjoint = np.einsum("pim,pi->pm", gradient, quad.normals) * weights
    return single, double, adjoint, total, total_dnu


@cache(ttl=-1, maxsize=8)
def assemble(
    lam: float, quad: SurfaceQuadrature, potential: Optional[PotentialGrid] = None
) -> KernelMatrixSet:
    """Nyström matrices of 𝒮, 𝒟, 𝒩 for u_to at λ on ∂Ω."""
    if lam < LAMBDA_FLOOR:
        raise DomainError(f"λ={lam} below the floor {LAMBDA_FLOOR}")
    single, double, adjoint = _free_helmholtz(lam, quad)
    scatter_u = scatter_du = None
    if potential is not None and not potential.is_zero:
        solver = scatter_solver(potential, lam)
        s_sc, d_sc, n_sc, scatter_u, scatter_du = _scatter_parts(solver, quad)
        single = single + s_sc
        double = double + d_sc
        adjoint = adjoint + n_sc
    log.debug("assembled N=%d kernels at λ=%.10g", quad.n, lam)
    return KernelMatrixSet(
        lam=float(lam),
        quad=quad,
        potential=potential,
        single=single,
        double=double,
        adjoint=adjoint,
        scatter_u=scatter_u,
        scatter_du=scatter_du,
    )


def assemble_laplace(quad: SurfaceQuadrature) -> KernelMatrixSet:
    """Reference kernels of the Laplacian, Φ₀ = −(1/2π) ln r."""
    _, dist, off, logterm, normal_y, normal_x = _geometry(quad)
    speed_y = quad.speed[None, :]
    h = 2.0 * np.pi / quad.n
    log_part = -np.ones_like(dist) / (4.0 * np.pi) * speed_y
    smooth = np.where(off, laplace_kernel(dist) * speed_y - log_part * logterm, 0.0)
    smooth[~off] = -np.log(quad.speed) * quad.speed / (2.0 * np.pi)
    single = log_weights(quad.n) * log_part + h * smooth

    radial = laplace_radial_derivative(dist)
    double = np.where(off, -radial * normal_y * speed_y, 0.0)
    adjoint = np.where(off, radial * normal_x * speed_y, 0.0)
    double[~off] = _curvature_diagonal(quad)
    adjoint[~off] = _curvature_diagonal(quad)
    return KernelMatrixSet(
        lam=0.0,
        quad=quad,
        potential=None,
        single=single,
        double=h * double,
        adjoint=h * adjoint,
        laplace=True,
    )


# ---------------------------------------------------------------------------
# Evaluation off the boundary
# ---------------------------------------------------------------------------
def _targets(kernels: KernelMatrixSet, x) -> np.ndarray:
    points = np.atleast_2d(np.asarray(x, dtype=float))
    quad = kernels.quad
    dist = np.linalg.norm(points[:, None, :] - quad.points[None, :, :], axis=-1)
    floor = NEAR_BOUNDARY_FACTOR * quad.perimeter / quad.n
    if np.any(dist.min(axis=1) <= floor):
        raise TooCloseToBoundary(
            f"evaluation point within {floor:.3g} of the boundary at N={quad.n}"
        )
    return points


def _shape(x, values):
    return values[0] if np.ndim(x) == 1 else values


def eval_single(kernels: KernelMatrixSet, density: np.ndarray, x):
    """𝒮f(x) = ∫ u_to(x, y) f(y) dS(y)."""
    points = _targets(kernels, x)
    quad = kernels.quad
    weighted = quad.weights * np.asarray(density)
    diff = points[:, None, :] - quad.points[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    if kernels.laplace:
        values = laplace_kernel(dist) @ weighted
    else:
        values = helmholtz_kernel(np.sqrt(kernels.lam), dist) @ weighted
    if kernels.has_scatter:
        solver = kernels.solver()
        values = values + solver.apply(points, solver.v * (kernels.scatter_u @ weighted))
    return _shape(x, values)


def eval_double(kernels: KernelMatrixSet, density: np.ndarray, x):
    """𝒟f(x) = ∫ ∂_{ν_y}u_to(x, y) f(y) dS(y)."""
    points = _targets(kernels, x)
    quad = kernels.quad
    weighted = quad.weights * np.asarray(density)
    diff = points[:, None, :] - quad.points[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    if kernels.laplace:
        radial = laplace_radial_derivative(dist)
    else:
        radial = helmholtz_radial_derivative(np.sqrt(kernels.lam), dist)
    values = (-radial * np.einsum("pjk,jk->pj", diff, quad.normals)) @ weighted
    if kernels.has_scatter:
        solver = kernels.solver()
        values = values + solver.apply(points, solver.v * (kernels.scatter_du @ weighted))
    return _shape(x, values)


def eval_single_gradient(kernels: KernelMatrixSet, density: np.ndarray, x) -> np.ndarray:
    """∇𝒮f(x), one row per point."""
    points = _targets(kernels, x)
    quad = kernels.quad
    weighted = quad.weights * np.asarray(density)
    diff = points[:, None, :] - quad.points[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    if kernels.laplace:
        radial = laplace_radial_derivative(dist)
    else:
        radial = helmholtz_radial_derivative(np.sqrt(kernels.lam), dist)
    values = np.einsum("pj,pjk,j->pk", radial, diff, weighted)
    if kernels.has_scatter:
        solver = kernels.solver()
        values = values + solver.apply_gradient(points, solver.v * (kernels.scatter_u @ weighted))
    return _shape(x, values)


def green_representation(kernels: KernelMatrixSet, trace: np.ndarray, dnu: np.ndarray, x):
    """u(x) = 𝒮(∂_νu)(x) − 𝒟(u|_{∂Ω})(x) inside Ω (zero outside)."""
    return eval_single(kernels, dnu, x) - eval_double(kernels, trace, x)


def boundary_traces(
    kernels: KernelMatrixSet, density: np.ndarray, side: str, which: str
) -> np.ndarray:
    """Inner or outer trace of ∂_ν𝒮f (``single_dnu``) or of 𝒟f (``double_value``)."""
    if side not in ("inner", "outer"):
        raise ValueError(f"side must be inner or outer, got {side!r}")
    density = np.asarray(density)
    sign = 1.0 if side == "inner" else -1.0
    if which == "single_dnu":
        return kernels.adjoint @ density + sign * 0.5 * density
    if which == "double_value":
        return kernels.double @ density - sign * 0.5 * density
    raise ValueError(f"unknown trace {which!r}")


def interpolate_density(density: np.ndarray, n_nodes: int) -> np.ndarray:
    """Trigonometric interpolation of node values onto n_nodes equispaced nodes."""
    density = np.asarray(density)
    n_old = len(density)
    spectrum = np.fft.fft(density)
    padded = np.zeros(n_nodes, dtype=complex)
    half = n_old // 2
    padded[:half] = spectrum[:half]
    padded[-half + 1 :] = spectrum[half + 1 :]
    padded[half] = 0.5 * spectrum[half]
    padded[-half] += 0.5 * spectrum[half]
    values = np.fft.ifft(padded) * n_nodes / n_old
    return np.real(values) if np.isrealobj(density) else values


# ---------------------------------------------------------------------------
# Jump-relation suite
# ---------------------------------------------------------------------------
def trigonometric_densities(quad: SurfaceQuadrature) -> dict[str, np.ndarray]:
    s = quad.s
    return {
        "one": np.ones_like(s),
        "cos": np.cos(s),
        "sin2": np.sin(2 * s),
        "mixed": np.cos(3 * s) + 0.5 * np.sin(s),
        "exp_cos": np.exp(np.cos(s)),
    }


def exterior_source_field(kernels: KernelMatrixSet, source, probes: np.ndarray):
    """Trace, normal derivative and probe values of u = u_to(·, source).

    ``source`` lies outside Ω, so u solves (Δ+λ−V)u = 0 inside.
    """
    quad = kernels.quad
    source = np.asarray(source, dtype=float)
    k = np.sqrt(kernels.lam)

    def values_and_gradient(points):
        diff = points - source
        dist = np.linalg.norm(diff, axis=1)
        value = helmholtz_kernel(k, dist)
        grad = helmholtz_radial_derivative(k, dist)[:, None] * diff
        if kernels.has_scatter:
            solver = kernels.solver()
            density = solver.v * solver.solve(solver.incident(source)[:, 0])
            value = value + solver.apply(points, density)
            grad = grad + solver.apply_gradient(points, density)
        return value, grad

    trace, grad = values_and_gradient(quad.points)
    dnu = np.einsum("ik,ik->i", grad, quad.normals)
    inside, _ = values_and_gradient(np.atleast_2d(probes))
    return trace, dnu, inside


def jump_suite(
    kernels: KernelMatrixSet,
    densities: Optional[dict[str, np.ndarray]] = None,
    source=(2.0, 1.5),
    probes=((0.1, 0.2), (-0.3, 0.1), (0.0, -0.4)),
) -> dict:
    """Residuals of the jump relations, the Green representation and 𝒟 = 𝒩*."""
    densities = densities or trigonometric_densities(kernels.quad)
    rows = []
    for name, density in densities.items():
        single_jump = boundary_traces(kernels, density, "inner", "single_dnu") - boundary_traces(
            kernels, density, "outer", "single_dnu"
        )
        double_jump = boundary_traces(kernels, density, "outer", "double_value") - boundary_traces(
            kernels, density, "inner", "double_value"
        )
        rows.append(
            {
                "density": name,
                "single_dnu_jump": float(np.max(np.abs(single_jump - density))),
                "double_value_jump": float(np.max(np.abs(double_jump - density))),
            }
        )
    probes = np.asarray(probes, dtype=float)
    trace, dnu, exact = exterior_source_field(kernels, source, probes)
    represented = green_representation(kernels, trace, dnu, probes)
    return {
        "lambda": kernels.lam,
        "n_nodes": kernels.n,
        "jumps": rows,
        "green_representation": float(np.max(np.abs(represented - exact))),
        "adjointness": kernels.adjointness_residual(),
    }
