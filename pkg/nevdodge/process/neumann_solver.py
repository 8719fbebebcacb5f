"""
Neumann problem for Δ+λ−V:

    (Δ+λ−V)u = f₁ in Ω,   ∂_νu = f₂ on ∂Ω.

The volume part w (outgoing, (Δ+λ−V)w = f₁) is removed first; the rest
v = 𝒮φ solves the homogeneous equation with ∂_νv = g = f₂ − ∂_νw, i.e.

    𝒩φ + ½φ = g.

The integral equation is uniquely solvable exactly when λ is not a Neumann
eigenvalue, so a large condition number of 𝒩+½I is reported as NearEigenvalue.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from nevdodge.constants import DEFAULT_NODES, NEAR_EIGEN_COND, SUPPORT_CUTOFF
from nevdodge.errors import InputError, NearEigenvalue
from nevdodge.geometry.boundary_geometry import (
    BoundaryCurve,
    SurfaceQuadrature,
    quadrature,
)
from nevdodge.process.layer_potentials import (
    KernelMatrixSet,
    assemble,
    eval_single,
    eval_single_gradient,
    exterior_source_field,
    interpolate_density,
)
from nevdodge.process.potential_field import (
    PotentialGrid,
    SmoothSource,
    VolumeField,
    gaussian_bump,
    volume_potential,
)

log = logging.getLogger(__name__)

# relative residual of the boundary solve worth a warning
SOLVE_RESIDUAL_WARN = 1e-10


@dataclass(frozen=True, eq=False)
class NeumannSolution:
    """u = w + 𝒮φ with the density φ at the quadrature nodes."""

    kernels: KernelMatrixSet
    density: np.ndarray
    g: np.ndarray
    condition: float
    residual: float
    volume: Optional[VolumeField] = None

    def value(self, x):
        values = np.atleast_1d(eval_single(self.kernels, self.density, x))
        if self.volume is not None:
            values = values + self.volume.value(np.atleast_2d(x))
        return values[0] if np.ndim(x) == 1 else values

    def gradient(self, x) -> np.ndarray:
        grad = np.atleast_2d(eval_single_gradient(self.kernels, self.density, x))
        if self.volume is not None:
            grad = grad + self.volume.gradient(np.atleast_2d(x))
        return grad[0] if np.ndim(x) == 1 else grad

    def boundary_values(self) -> np.ndarray:
        """u on ∂Ω at the nodes (𝒮φ is continuous across the boundary)."""
        values = self.kernels.single @ self.density
        if self.volume is not None:
            values = values + self.volume.value(self.kernels.quad.points)
        return values

    def boundary_dnu(self) -> np.ndarray:
        """Inner trace of ∂_νu at the nodes."""
        quad = self.kernels.quad
        dnu = self.kernels.adjoint @ self.density + 0.5 * self.density
        if self.volume is not None:
            dnu = dnu + np.einsum("ik,ik->i", self.volume.gradient(quad.points), quad.normals)
        return dnu


def condition_estimate(matrix: np.ndarray, lu=None) -> float:
    """1-norm condition number from LAPACK's gecon on the LU factors."""
    lu = lu_factor(matrix) if lu is None else lu
    (gecon,) = get_lapack_funcs(("gecon",), (lu[0],))
    rcond, _ = gecon(lu[0], np.linalg.norm(matrix, 1), norm="1")
    return np.inf if rcond == 0.0 else float(1.0 / rcond)


def solve_reduced(
    kernels: KernelMatrixSet,
    g: np.ndarray,
    near_eigen_cond: float = NEAR_EIGEN_COND,
) -> NeumannSolution:
    """Solve 𝒩φ + ½φ = g; v = 𝒮φ has inner normal derivative g."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (kernels.n,):
        raise InputError(f"boundary data has {g.shape} values for N={kernels.n} nodes")
    system = kernels.adjoint + 0.5 * np.eye(kernels.n)
    lu = lu_factor(system, check_finite=True)
    condition = condition_estimate(system, lu)
    if condition > near_eigen_cond:
        raise NearEigenvalue(
            f"λ={kernels.lam:.10g} is numerically a Neumann eigenvalue (cond={condition:.3e}); "
            "the problem is only solvable when λ is not a Neumann eigenvalue"
        )
    density = lu_solve(lu, g)
    scale = np.linalg.norm(g)
    residual = float(np.linalg.norm(system @ density - g) / scale) if scale > 0 else 0.0
    if residual > SOLVE_RESIDUAL_WARN:
        log.warning("boundary solve residual %.2e at λ=%g", residual, kernels.lam)
    log.debug("reduced solve at λ=%g: cond=%.3e", kernels.lam, condition)
    return NeumannSolution(
        kernels=kernels, density=density, g=g, condition=condition, residual=residual
    )


def _source_grid(
    potential: Optional[PotentialGrid], f1: Optional[PotentialGrid]
) -> PotentialGrid:
    """Grid carrying V (possibly zero) with the same cells as f₁."""
    if potential is None or potential.is_zero:
        return PotentialGrid(
            origin=f1.origin, h=f1.h, nx=f1.nx, ny=f1.ny, values=np.zeros((f1.ny, f1.nx))
        )
    same = (
        np.allclose(potential.origin, f1.origin)
        and np.isclose(potential.h, f1.h)
        and (potential.nx, potential.ny) == (f1.nx, f1.ny)
    )
    if not same:
        raise InputError("f1 must be sampled on the cells of the potential grid")
    return potential


def solve_full(
    curve: BoundaryCurve,
    lam: float,
    potential: Optional[PotentialGrid],
    f1: Optional[PotentialGrid],
    f2,
    n_nodes: int = DEFAULT_NODES,
    near_eigen_cond: float = NEAR_EIGEN_COND,
    smooth: Optional[SmoothSource] = None,
) -> NeumannSolution:
    """(Δ+λ−V)u = f₁ in Ω, ∂_νu = f₂ on ∂Ω.

    f₁ is ``f1`` (values on grid cells, None for none) plus the analytic
    ``smooth`` part. ``f2`` is an array of node values or a callable of
    (points, normals).
    """
    quad = quadrature(curve, n_nodes)
    kernels = assemble(lam, quad, potential)
    f2 = f2(quad.points, quad.normals) if callable(f2) else f2
    f2 = np.asarray(f2, dtype=complex)
    has_grid = f1 is not None and np.any(f1.values)
    if not has_grid and smooth is None:
        return solve_reduced(kernels, f2, near_eigen_cond)
    if smooth is not None and smooth.clearance(curve) <= 0:
        raise InputError("smooth source must lie inside the domain")
    if has_grid:
        grid = _source_grid(potential, f1)
        if grid.support_clearance(curve) < 0 or f1.support_clearance(curve) < 0:
            raise InputError("source and potential must lie inside the domain")
        volume = volume_potential(grid, lam, f1.values, smooth)
    else:
        if potential is not None and potential.support_clearance(curve) < 0:
            raise InputError("potential must lie inside the domain")
        volume = volume_potential(potential, lam, None, smooth)
    dnu_w = np.einsum("ik,ik->i", volume.gradient(quad.points), quad.normals)
    reduced = solve_reduced(kernels, f2 - dnu_w, near_eigen_cond)
    return NeumannSolution(
        kernels=kernels,
        density=reduced.density,
        g=reduced.g,
        condition=reduced.condition,
        residual=reduced.residual,
        volume=volume,
    )


def _support_disk(smooth: SmoothSource, radial: int = 48, angular: int = 96):
    """Gauss–Legendre × trapezoid nodes and weights on the support disk of f₁."""
    t, t_weights = np.polynomial.legendre.leggauss(radial)
    radii = 0.5 * smooth.radius * (t + 1.0)
    theta = 2.0 * np.pi * np.arange(angular) / angular
    points = smooth.center + radii[:, None, None] * np.stack([np.cos(theta), np.sin(theta)], -1)[None]
    weights = (0.5 * smooth.radius * t_weights * radii)[:, None] * np.full(angular, 2.0 * np.pi / angular)
    return points.reshape(-1, 2), weights.ravel()


def solvability_residual(
    quad: SurfaceQuadrature,
    f1: Optional[PotentialGrid],
    f2: np.ndarray,
    eigfuns: list,
    smooth: Optional[SmoothSource] = None,
) -> list[complex]:
    """∫_{∂Ω} f₂v − ∫_Ω f₁v for each normalised eigenfunction v at λ.

    The eigenfunctions are real, so complex data gives complex residuals.
    All entries vanish exactly when the Neumann problem is solvable.
    """
    f2 = np.asarray(f2, dtype=complex)
    disk = _support_disk(smooth) if smooth is not None else None
    residuals = []
    for eigfun in eigfuns:
        trace = eigfun.trace
        if len(trace) != quad.n:
            trace = interpolate_density(trace, quad.n)
        boundary = np.sum(quad.weights * f2 * trace)
        interior = 0.0
        if f1 is not None and np.any(f1.values):
            mask = f1.values.ravel() != 0
            cells = f1.centers()[mask]
            interior = f1.h**2 * np.sum(f1.values.ravel()[mask] * eigfun.value(cells))
        if disk is not None:
            points, weights = disk
            interior = interior + np.sum(weights * smooth(points) * eigfun.value(points))
        residuals.append(complex(boundary - interior))
    return residuals


# ---------------------------------------------------------------------------
# Named data presets
# ---------------------------------------------------------------------------
def exterior_source_point(curve: BoundaryCurve, distance: float = 2.5) -> np.ndarray:
    """A point ``distance`` radii away from the centroid, outside Ω."""
    center = curve.centroid()
    radius = np.max(np.linalg.norm(curve.points(np.linspace(0, 2 * np.pi, 256)) - center, axis=1))
    direction = np.array([0.8, 0.6])
    return center + distance * radius * direction


def default_probes(curve: BoundaryCurve, fraction: float = 0.5, count: int = 5) -> np.ndarray:
    """Points halfway between the centroid and the boundary."""
    center = curve.centroid()
    angles = 2 * np.pi * (np.arange(count) + 0.25) / count
    boundary = curve.points(angles)
    return center + fraction * (boundary - center)


@dataclass(frozen=True)
class BoundaryPreset:
    name: str
    f2: Callable[[KernelMatrixSet], np.ndarray]
    exact: Optional[Callable[[KernelMatrixSet, np.ndarray], np.ndarray]] = None


def _exterior_source_f2(kernels: KernelMatrixSet) -> np.ndarray:
    source = exterior_source_point(kernels.quad.curve)
    _, dnu, _ = exterior_source_field(kernels, source, kernels.quad.curve.centroid()[None, :])
    return dnu


def _exterior_source_exact(kernels: KernelMatrixSet, probes: np.ndarray) -> np.ndarray:
    source = exterior_source_point(kernels.quad.curve)
    _, _, inside = exterior_source_field(kernels, source, probes)
    return inside


BOUNDARY_PRESETS = {
    "zeros": BoundaryPreset("zeros", lambda kernels: np.zeros(kernels.n, dtype=complex)),
    "exterior-source": BoundaryPreset(
        "exterior-source", _exterior_source_f2, _exterior_source_exact
    ),
}


def source_preset(name: str, curve: BoundaryCurve, potential: Optional[PotentialGrid]):
    """Interior source f₁ by name: ``zero`` or ``bump-source``.

    The bump is a Gaussian of width 0.1 at the centroid, sampled on the
    potential's cells when a potential is given.
    """
    if name == "zero":
        return None
    if name != "bump-source":
        raise InputError(f"unknown f1 preset {name!r}")
    center = curve.centroid()
    if potential is None or potential.is_zero:
        return gaussian_bump(center=center, width=0.1, half_extent=0.3, cells=24)
    dist2 = np.sum((potential.centers() - center) ** 2, axis=1)
    values = np.exp(-dist2 / 0.1**2)
    values[values < SUPPORT_CUTOFF] = 0.0
    return PotentialGrid(
        origin=potential.origin,
        h=potential.h,
        nx=potential.nx,
        ny=potential.ny,
        values=values.reshape(potential.ny, potential.nx),
    )


def gaussian_source(center, width: float, lam: float) -> tuple[SmoothSource, Callable]:
    """f₁ = (Δ+λ)u* for u*(x) = exp(−|x − c|²/w²), with u* returned as the exact field.

    u* is compactly supported to double precision beyond 6w, so it is its own
    outgoing solution and ∂_νu* vanishes on a boundary farther away than that.
    """
    center = np.asarray(center, dtype=float)

    def exact(points):
        dist2 = np.sum((np.atleast_2d(points) - center) ** 2, axis=1)
        return np.exp(-dist2 / width**2)

    def func(points):
        dist2 = np.sum((points - center) ** 2, axis=1)
        laplacian = 4.0 * dist2 / width**4 - 4.0 / width**2
        return (laplacian + lam) * np.exp(-dist2 / width**2)

    def grad(points):
        rel = points - center
        dist2 = np.sum(rel**2, axis=1)
        gauss = np.exp(-dist2 / width**2)
        laplacian = 4.0 * dist2 / width**4 - 4.0 / width**2
        # ∇[(Δu* + λu*)] with ∇u* = −2(x − c)u*/w²
        coeff = 8.0 / width**4 - 2.0 / width**2 * (laplacian + lam)
        return coeff[:, None] * rel * gauss[:, None]

    return SmoothSource(func=func, center=center, radius=6.0 * width, grad=grad), exact


def smooth_preset(name: str, curve: BoundaryCurve, lam: float):
    """Analytic f₁ by name; returns (source, exact solution) or None.

    ``gaussian-source``: manufactured Gaussian of width 0.1 at the centroid,
    exact for f₂ = 0 and V = 0.
    """
    if name != "gaussian-source":
        return None
    return gaussian_source(curve.centroid(), 0.1, lam)
