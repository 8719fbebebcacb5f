"""
Compactly supported potentials on a uniform grid and the outgoing
Lippmann–Schwinger solver for the total Green kernel.

With Φ_λ = (i/4)H₀⁽¹⁾(√λ r), (Δ+λ)Φ_λ = −δ₀, the outgoing inverse of Δ+λ is

    K_λ f(x) = −∫ Φ_λ(x − z) f(z) dz,

so u_to(·, y) = u_in(·, y) + K_λ[V u_to(·, y)] with u_in = Φ_λ(· − y) solves
(Δ+λ−V) u_to(·, y) = −δ_y and is outgoing. The volume integral is the
midpoint rule over grid cells, except on a cell's own centre where the real
part of Φ_λ is integrated exactly over the disk of equal area (a = h/√π):

    ∫_{|z|<a} Φ_λ(z) dz = (iπa / 2k) H₁⁽¹⁾(ka) − 1/k²,   k = √λ.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import LinAlgWarning, get_lapack_funcs, lu_factor, lu_solve
from scipy.special import hankel1

from nevdodge.constants import LAMBDA_FLOOR, LS_RESIDUAL_TOL, SUPPORT_CUTOFF
from nevdodge.errors import (
    CoincidentPoints,
    DomainError,
    InputError,
    ResidualTooLarge,
    SolveSingular,
)
from nevdodge.geometry.boundary_geometry import BoundaryCurve, boundary_distance, contains
from nevdodge.process.special_functions import helmholtz_kernel, helmholtz_radial_derivative
from nevdodge.utils.caching import cache

log = logging.getLogger(__name__)

RCOND_FLOOR = 1e-13
COINCIDENCE = 1e-9


@dataclass(frozen=True, eq=False)
class PotentialGrid:
    """Real potential on cells [origin + (i, j)h, origin + (i+1, j+1)h].

    ``values`` has shape (ny, nx); row j holds the cells at height j.
    """

    origin: np.ndarray
    h: float
    nx: int
    ny: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.ny, self.nx):
            raise InputError(f"potential values shape {values.shape} != ({self.ny}, {self.nx})")
        if not np.all(np.isfinite(values)):
            raise InputError("potential values must be finite reals")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))

    def centers(self) -> np.ndarray:
        xs = self.origin[0] + (np.arange(self.nx) + 0.5) * self.h
        ys = self.origin[1] + (np.arange(self.ny) + 0.5) * self.h
        grid_x, grid_y = np.meshgrid(xs, ys)
        return np.column_stack([grid_x.ravel(), grid_y.ravel()])

    def support_mask(self) -> np.ndarray:
        return self.values.ravel() != 0.0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.support_mask())

    def support_box(self) -> Optional[tuple[float, float, float, float]]:
        if self.is_zero:
            return None
        cells = self.centers()[self.support_mask()]
        half = 0.5 * self.h
        return (
            float(cells[:, 0].min() - half),
            float(cells[:, 1].min() - half),
            float(cells[:, 0].max() + half),
            float(cells[:, 1].max() + half),
        )

    def sample(self, points: np.ndarray) -> np.ndarray:
        """Piecewise-constant value at arbitrary points (0 off the grid)."""
        points = np.atleast_2d(points)
        i = np.floor((points[:, 0] - self.origin[0]) / self.h).astype(int)
        j = np.floor((points[:, 1] - self.origin[1]) / self.h).astype(int)
        inside = (i >= 0) & (i < self.nx) & (j >= 0) & (j < self.ny)
        out = np.zeros(len(points))
        out[inside] = self.values[j[inside], i[inside]]
        return out

    def support_clearance(self, curve: BoundaryCurve) -> float:
        """Smallest distance from a support cell corner to ∂Ω; −inf if outside."""
        if self.is_zero:
            return np.inf
        cells = self.centers()[self.support_mask()]
        half = 0.5 * self.h
        corners = np.concatenate(
            [cells + half * np.array(offset) for offset in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
        )
        if not np.all(contains(curve, corners)):
            return -np.inf
        return float(np.min(boundary_distance(curve, corners)))

    def check_inside(self, curve: BoundaryCurve, margin: Optional[float] = None) -> None:
        margin = 2.0 * self.h if margin is None else margin
        clearance = self.support_clearance(curve)
        if clearance < margin:
            raise InputError(
                f"potential support clearance {clearance:.3g} below required {margin:.3g}"
            )

    def to_dict(self) -> dict:
        return {
            "origin": [float(c) for c in self.origin],
            "h": float(self.h),
            "nx": int(self.nx),
            "ny": int(self.ny),
            "values": [float(v) for v in self.values.ravel()],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "PotentialGrid":
        try:
            nx, ny = int(payload["nx"]), int(payload["ny"])
            return cls(
                origin=np.asarray(payload["origin"], dtype=float),
                h=float(payload["h"]),
                nx=nx,
                ny=ny,
                values=np.asarray(payload["values"], dtype=float).reshape(ny, nx),
            )
        except (KeyError, ValueError, TypeError) as err:
            raise InputError(f"malformed potential file: {err}") from err


def gaussian_bump(
    center=(0.0, 0.0),
    amplitude: float = 1.0,
    width: float = 0.1,
    half_extent: float = 0.5,
    cells: int = 32,
) -> PotentialGrid:
    """A·exp(−|z−c|²/w²) on a cells×cells grid, truncated below 1e−12."""
    h = 2.0 * half_extent / cells
    origin = np.asarray(center, dtype=float) - half_extent
    grid = PotentialGrid(origin=origin, h=h, nx=cells, ny=cells, values=np.zeros((cells, cells)))
    dist2 = np.sum((grid.centers() - np.asarray(center)) ** 2, axis=1)
    values = amplitude * np.exp(-dist2 / width**2)
    values[np.abs(values) < SUPPORT_CUTOFF] = 0.0
    return PotentialGrid(origin=origin, h=h, nx=cells, ny=cells, values=values.reshape(cells, cells))


# ---------------------------------------------------------------------------
# Cell quadrature
# ---------------------------------------------------------------------------
def self_cell_integral(k: float, h: float) -> complex:
    """∫Φ_λ over the cell containing the singularity.

    The logarithmic real part is integrated exactly over the disk of area h².
    The imaginary part J₀/4 is smooth and takes the midpoint value h²/4.
    """
    radius = h / np.sqrt(np.pi)
    disk = 1j * np.pi * radius / (2.0 * k) * hankel1(1, k * radius) - 1.0 / k**2
    return complex(disk.real, 0.25 * h**2)


def cell_operator(k: float, h: float, points: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Matrix of K_λ: entry (p, c) weighs the density on cell c at point p."""
    diff = np.atleast_2d(points)[:, None, :] - cells[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    coincident = dist < COINCIDENCE * h
    safe = np.where(coincident, 1.0, dist)
    matrix = -h**2 * helmholtz_kernel(k, safe)
    matrix[coincident] = -self_cell_integral(k, h)
    return matrix


def cell_operator_gradient(k: float, h: float, points: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """∇_x of the cell operator, shape (P, C, 2); points must avoid cell centres."""
    diff = np.atleast_2d(points)[:, None, :] - cells[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    if np.any(dist < COINCIDENCE * h):
        raise CoincidentPoints("gradient of the volume potential requested at a cell centre")
    return -h**2 * helmholtz_radial_derivative(k, dist)[..., None] * diff


# ---------------------------------------------------------------------------
# Lippmann–Schwinger solver
# ---------------------------------------------------------------------------
class ScatterSolver:
    """LU factorization of I − K_λV restricted to the support of V.

    Public methods:
        solve: u on the support for given incident values.
        incident / incident_dnu: Φ_λ(z − y) and ∂_{ν_y}Φ_λ(z − y) on the support.
        apply / apply_gradient: K_λ[ρ] and its gradient at arbitrary points for a
            density ρ living on the support cells.
    """

    def __init__(self, potential: PotentialGrid, lam: float):
        if lam < LAMBDA_FLOOR:
            raise DomainError(f"λ={lam} below the floor {LAMBDA_FLOOR}")
        self.potential = potential
        self.lam = float(lam)
        self.k = float(np.sqrt(lam))
        self.h = float(potential.h)
        mask = potential.support_mask()
        self.cells = potential.centers()[mask]
        self.v = potential.values.ravel()[mask]
        if not len(self.cells):
            self.system = np.zeros((0, 0))
            self.lu = None
            self.rcond = 1.0
            return
        kernel = cell_operator(self.k, self.h, self.cells, self.cells)
        self.system = np.eye(len(self.cells)) - kernel * self.v[None, :]
        with warnings.catch_warnings():
            warnings.simplefilter("error", LinAlgWarning)
            try:
                self.lu = lu_factor(self.system)
            except (LinAlgWarning, ValueError, np.linalg.LinAlgError) as err:
                raise SolveSingular(f"I − K_λV singular at λ={lam}: {err}") from err
        (gecon,) = get_lapack_funcs(("gecon",), (self.lu[0],))
        rcond, _ = gecon(self.lu[0], np.linalg.norm(self.system, 1), norm="1")
        self.rcond = float(rcond)
        if self.rcond < RCOND_FLOOR:
            raise SolveSingular(
                f"I − K_λV numerically singular at λ={lam} (rcond={self.rcond:.2e})"
            )
        log.debug(
            "LS factorization: %d support cells, λ=%g, rcond=%.2e",
            len(self.cells),
            lam,
            self.rcond,
        )

    @property
    def size(self) -> int:
        return len(self.cells)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.lu is None:
            return np.asarray(rhs, dtype=complex)
        solution = lu_solve(self.lu, rhs)
        scale = np.linalg.norm(rhs)
        if scale > 0:
            residual = np.linalg.norm(self.system @ solution - rhs) / scale
            if residual > LS_RESIDUAL_TOL:
                raise ResidualTooLarge(f"LS residual {residual:.2e} at λ={self.lam}")
        return solution

    def _check_sources(self, sources: np.ndarray) -> np.ndarray:
        sources = np.atleast_2d(sources)
        if self.size:
            dist = np.linalg.norm(sources[:, None, :] - self.cells[None, :, :], axis=-1)
            if np.any(dist < 0.5 * self.h):
                raise CoincidentPoints("source point inside the potential support")
        return sources

    def incident(self, sources: np.ndarray) -> np.ndarray:
        sources = self._check_sources(sources)
        dist = np.linalg.norm(self.cells[:, None, :] - sources[None, :, :], axis=-1)
        return helmholtz_kernel(self.k, dist)

    def incident_dnu(self, sources: np.ndarray, normals: np.ndarray) -> np.ndarray:
        """∂_{ν_y} Φ_λ(z − y) = −∇Φ_λ(z − y)·ν_y."""
        sources = self._check_sources(sources)
        diff = self.cells[:, None, :] - sources[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        radial = helmholtz_radial_derivative(self.k, dist)
        return -radial * np.einsum("spi,pi->sp", diff, np.atleast_2d(normals))

    def apply(self, points: np.ndarray, density: np.ndarray) -> np.ndarray:
        if not self.size:
            return np.zeros((len(np.atleast_2d(points)),) + density.shape[1:], dtype=complex)
        return cell_operator(self.k, self.h, points, self.cells) @ density

    def apply_gradient(self, points: np.ndarray, density: np.ndarray) -> np.ndarray:
        """Gradient of K_λ[ρ]; returns shape (P, 2) or (P, 2, M) for stacked densities."""
        grad = cell_operator_gradient(self.k, self.h, points, self.cells)
        return np.einsum("pci,c...->pi...", grad, density)


@cache(ttl=-1, maxsize=4)
def scatter_solver(potential: PotentialGrid, lam: float) -> ScatterSolver:
    return ScatterSolver(potential, lam)


# ---------------------------------------------------------------------------
# Point sources
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class ScatterField:
    """u_to(·, y) on every grid cell, plus the relative residual of the solve."""

    source: np.ndarray
    values: np.ndarray
    support_values: np.ndarray
    residual: float


def lippmann_schwinger(potential: PotentialGrid, lam: float, source) -> ScatterField:
    """Solve u_to = u_in + K_λ[V u_to] for the point source y = ``source``."""
    solver = scatter_solver(potential, lam)
    source = np.asarray(source, dtype=float)
    rhs = solver.incident(source)[:, 0]
    centers = potential.centers()
    incident_all = helmholtz_kernel(solver.k, np.linalg.norm(centers - source, axis=1))
    if solver.size == 0:
        return ScatterField(source, incident_all, np.zeros(0, dtype=complex), 0.0)
    support = solver.solve(rhs)
    residual = float(np.linalg.norm(solver.system @ support - rhs) / np.linalg.norm(rhs))
    total = incident_all + solver.apply(centers, solver.v * support)
    return ScatterField(source, total, support, residual)


def scattered_eval(scatter: ScatterField, potential: PotentialGrid, lam: float, x) -> complex:
    """u_sc(x, y) = K_λ[V u_to(·, y)](x), valid anywhere."""
    if potential.is_zero:
        return 0.0j
    solver = scatter_solver(potential, lam)
    return complex(solver.apply(np.atleast_2d(x), solver.v * scatter.support_values)[0])


def total_kernel(
    potential: Optional[PotentialGrid],
    lam: float,
    x,
    y,
    need: str = "value",
    normal=None,
) -> complex:
    """u_to(x, y), ∂_{ν_x}u_to(x, y) or ∂_{ν_y}u_to(x, y).

    The y-derivative uses the symmetry u_to(x, y) = u_to(y, x): swap the points
    and differentiate in the first slot.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(x - y) == 0.0:
        raise CoincidentPoints("total kernel evaluated at x = y")
    if need == "dnu_y":
        return total_kernel(potential, lam, y, x, "dnu_x", normal)
    k = np.sqrt(lam)
    dist = np.linalg.norm(x - y)
    if need == "value":
        value = complex(helmholtz_kernel(k, dist))
    elif need == "dnu_x":
        value = complex(helmholtz_radial_derivative(k, dist) * np.dot(x - y, normal))
    else:
        raise ValueError(f"unknown kernel request {need!r}")
    if potential is None or potential.is_zero:
        return value
    solver = scatter_solver(potential, lam)
    density = solver.v * solver.solve(solver.incident(y)[:, 0])
    if need == "value":
        return value + complex(solver.apply(x[None, :], density)[0])
    return value + complex(solver.apply_gradient(x[None, :], density)[0] @ np.asarray(normal))


# ---------------------------------------------------------------------------
# Volume sources
# ---------------------------------------------------------------------------
# polar rule for K_λ[f] with f smooth: Gauss–Legendre in r = r₀ + L t², trapezoid in θ
SMOOTH_RADIAL_NODES = 96
SMOOTH_ANGULAR_NODES = 256
FD_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class SmoothSource:
    """Analytic f₁ vanishing outside the disk |x − center| ≤ radius.

    ``func`` maps (M, 2) points to M values; ``grad`` to (M, 2) gradients.
    Without ``grad`` the gradient is taken by central differences.
    """

    func: Callable[[np.ndarray], np.ndarray]
    center: np.ndarray
    radius: float
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.radius <= 0:
            raise InputError(f"source radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.atleast_2d(points)), dtype=complex)

    def gradient(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if self.grad is not None:
            return np.asarray(self.grad(points), dtype=complex)
        columns = []
        for axis in range(2):
            step = np.zeros(2)
            step[axis] = FD_STEP
            columns.append((self(points + step) - self(points - step)) / (2 * FD_STEP))
        return np.stack(columns, axis=-1)

    def clearance(self, curve: BoundaryCurve) -> float:
        """Distance from the support disk to ∂Ω; negative when it sticks out."""
        if not contains(curve, self.center[None, :])[0]:
            return -np.inf
        return float(boundary_distance(curve, self.center[None, :])[0]) - self.radius


def _polar_convolution(k: float, source: SmoothSource, points: np.ndarray, gradient: bool) -> np.ndarray:
    """−∫Φ_λ(x − y) g(y) dy with g = f₁ or ∇f₁, in polar coordinates about x."""
    points = np.atleast_2d(points)
    t, t_weights = np.polynomial.legendre.leggauss(SMOOTH_RADIAL_NODES)
    t, t_weights = 0.5 * (t + 1.0), 0.5 * t_weights
    theta = 2.0 * np.pi * np.arange(SMOOTH_ANGULAR_NODES) / SMOOTH_ANGULAR_NODES
    directions = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    out = np.zeros((len(points), 2) if gradient else len(points), dtype=complex)
    for p, x in enumerate(points):
        offset = np.linalg.norm(x - source.center)
        r_min = max(0.0, offset - source.radius)
        span = offset + source.radius - r_min
        radii = r_min + span * t**2
        # r dr = r · 2 L t dt; Φ(r) r is integrable at r = 0
        weights = t_weights * 2.0 * span * t * radii * helmholtz_kernel(k, radii)
        weights = weights * (2.0 * np.pi / SMOOTH_ANGULAR_NODES)
        nodes = x + radii[:, None, None] * directions[None, :, :]
        flat = nodes.reshape(-1, 2)
        if gradient:
            values = source.gradient(flat).reshape(len(radii), len(theta), 2)
            out[p] = -np.einsum("r,rai->i", weights, values)
        else:
            values = source(flat).reshape(len(radii), len(theta))
            out[p] = -np.einsum("r,ra->", weights, values)
    return out


@dataclass(frozen=True, eq=False)
class VolumeField:
    """Outgoing w with (Δ+λ−V)w = f₁, stored as w = K_λ[ρ] + K_λ[f_smooth], ρ = f_grid + Vw."""

    lam: float
    h: float
    cells: np.ndarray
    density: np.ndarray
    smooth: Optional[SmoothSource] = None

    def value(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        values = np.zeros(len(points), dtype=complex)
        if len(self.cells):
            values = values + cell_operator(np.sqrt(self.lam), self.h, points, self.cells) @ self.density
        if self.smooth is not None:
            values = values + _polar_convolution(np.sqrt(self.lam), self.smooth, points, gradient=False)
        return values

    def gradient(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        grad = np.zeros((len(points), 2), dtype=complex)
        if len(self.cells):
            cells = cell_operator_gradient(np.sqrt(self.lam), self.h, points, self.cells)
            grad = grad + np.einsum("pci,c->pi", cells, self.density)
        if self.smooth is not None:
            grad = grad + _polar_convolution(np.sqrt(self.lam), self.smooth, points, gradient=True)
        return grad


def volume_potential(
    potential: Optional[PotentialGrid],
    lam: float,
    f1: Optional[np.ndarray] = None,
    smooth: Optional[SmoothSource] = None,
) -> VolumeField:
    """Outgoing solution of (Δ+λ−V)w = f₁.

    f₁ is the sum of values sampled on the potential grid (``f1``) and an
    analytic ``smooth`` part. With V ≠ 0 both parts are scattered by the
    support through the Lippmann–Schwinger solve.
    """
    if potential is None:
        if f1 is not None:
            raise InputError("grid samples of f1 need a grid")
        return VolumeField(lam=float(lam), h=1.0, cells=np.zeros((0, 2)), density=np.zeros(0), smooth=smooth)
    centers = potential.centers()
    k = np.sqrt(lam)
    if f1 is None:
        f1 = np.zeros(len(centers), dtype=complex)
    f1 = np.asarray(f1, dtype=complex).reshape(potential.ny, potential.nx).ravel()
    source_mask = f1 != 0
    density = f1.copy()
    if not potential.is_zero:
        solver = scatter_solver(potential, lam)
        rhs = np.zeros(solver.size, dtype=complex)
        if np.any(source_mask):
            rhs = cell_operator(k, potential.h, solver.cells, centers[source_mask]) @ f1[source_mask]
        if smooth is not None:
            rhs = rhs + _polar_convolution(k, smooth, solver.cells, gradient=False)
        w_support = solver.solve(rhs) if np.any(rhs) else rhs
        density[potential.support_mask()] += solver.v * w_support
    keep = density != 0
    return VolumeField(
        lam=float(lam), h=float(potential.h), cells=centers[keep], density=density[keep], smooth=smooth
    )
