"""
Neumann eigenvalues as the λ where 𝒟 + ½I has a kernel.

If u is a Neumann eigenfunction, ψ = −u|_{∂Ω} satisfies (𝒟 + ½I)ψ = 0 and
u = 𝒟ψ in Ω; conversely every null vector comes from an eigenfunction. The
scanner samples σ_min(𝒟(λ) + ½I) on a λ grid, brackets its dips, polishes
them by golden-section search and reads the multiplicity off the number of
vanishing singular values.

Eigenfunctions are normalised with a boundary-only Gram identity. For
Neumann eigenfunctions of one λ and x measured from the centroid c,

    λ ∫_Ω u_i u_j = ½ ∫_{∂Ω} (x·ν)(λ u_i u_j − ∇_{∂Ω}u_i·∇_{∂Ω}u_j)
                  + ½ ∫_Ω u_i u_j (2V + x·∇V),

the last term living on the potential's cells only.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from multiprocessing import Pool
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy.linalg import cholesky, svd, svdvals
from tqdm import tqdm

from nevdodge.constants import (
    DEFAULT_NODES,
    DEFAULT_SCAN_STEPS,
    DIP_RATIO,
    EPS_EIG,
    LAMBDA_FLOOR,
    MIN_SCAN_STEPS,
    MULTIPLICITY_FACTOR,
    NEAR_BOUNDARY_FACTOR,
    RADIAL_NODES,
    REFINE_TOL,
)
from nevdodge.errors import InputError, LostBracket, NotAnEigenvalue
from nevdodge.geometry.boundary_geometry import (
    BoundaryCurve,
    SurfaceQuadrature,
    arclength_derivative,
    polar_rule,
    quadrature,
)
from nevdodge.process.layer_potentials import (
    KernelMatrixSet,
    assemble,
    eval_double,
    interpolate_density,
)
from nevdodge.process.potential_field import PotentialGrid

log = logging.getLogger(__name__)

GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)
# finer boundary used to evaluate eigenfunctions close to ∂Ω
EVAL_UPSAMPLING = 4
IMAGINARY_WARN = 1e-6


def _system(kernels: KernelMatrixSet) -> np.ndarray:
    return kernels.double + 0.5 * np.eye(kernels.n)


def sigma_min(
    lam: float,
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid] = None,
    n_nodes: int = DEFAULT_NODES,
) -> float:
    """Smallest singular value of 𝒟(λ) + ½I."""
    kernels = assemble(lam, quadrature(curve, n_nodes), potential)
    return float(svdvals(_system(kernels))[-1])


def find_dips(
    lambdas: np.ndarray, sigmas: np.ndarray, dip_ratio: float = DIP_RATIO
) -> list[tuple[float, float]]:
    """Brackets around local minima of σ_min below dip_ratio·median."""
    threshold = dip_ratio * np.median(sigmas)
    brackets = []
    last = len(sigmas) - 1
    for i, value in enumerate(sigmas):
        if value >= threshold:
            continue
        left = sigmas[i - 1] if i > 0 else np.inf
        right = sigmas[i + 1] if i < last else np.inf
        if value <= left and value < right:
            brackets.append((float(lambdas[max(i - 1, 0)]), float(lambdas[min(i + 1, last)])))
    return brackets


@dataclass
class ScanReport:
    """σ_min samples, dip brackets and refined eigenvalues of one scan."""

    lambdas: np.ndarray
    sigmas: np.ndarray
    brackets: list = field(default_factory=list)
    eigenvalues: list = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"lambda": self.lambdas, "sigma_min": self.sigmas})

    def summary(self) -> dict:
        return {
            "lambda_min": float(self.lambdas[0]),
            "lambda_max": float(self.lambdas[-1]),
            "steps": len(self.lambdas),
            "brackets": [list(bracket) for bracket in self.brackets],
            "eigenvalues": [
                {"lambda": value, "multiplicity": mult} for value, mult in self.eigenvalues
            ],
        }

    def nearest(self, lam: float) -> Optional[float]:
        if not self.eigenvalues:
            return None
        values = np.array([value for value, _ in self.eigenvalues])
        return float(values[np.argmin(np.abs(values - lam))])


def scan(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    lam_min: float,
    lam_max: float,
    steps: int = DEFAULT_SCAN_STEPS,
    n_nodes: int = DEFAULT_NODES,
    threads: int = 1,
    dip_ratio: float = DIP_RATIO,
    eps_eig: float = EPS_EIG,
    multiplicity_factor: float = MULTIPLICITY_FACTOR,
    refine_tol: float = REFINE_TOL,
    progress: bool = False,
) -> ScanReport:
    """Sample σ_min on [lam_min, lam_max], then refine every dip."""
    if lam_min < LAMBDA_FLOOR:
        raise InputError(f"lam_min={lam_min} below {LAMBDA_FLOOR}")
    if lam_min >= lam_max:
        raise InputError(f"empty scan range [{lam_min}, {lam_max}]")
    if steps < MIN_SCAN_STEPS:
        raise InputError(f"steps={steps} below {MIN_SCAN_STEPS}")
    lambdas = np.linspace(lam_min, lam_max, steps)
    worker = partial(sigma_min, curve=curve, potential=potential, n_nodes=n_nodes)
    if threads > 1:
        with Pool(threads) as pool:
            sigmas = list(
                tqdm(pool.imap(worker, lambdas), total=steps, desc="σ_min scan", disable=not progress)
            )
    else:
        sigmas = [worker(lam) for lam in tqdm(lambdas, desc="σ_min scan", disable=not progress)]
    sigmas = np.asarray(sigmas)
    report = ScanReport(lambdas=lambdas, sigmas=sigmas)
    for bracket in find_dips(lambdas, sigmas, dip_ratio):
        try:
            value = refine(curve, potential, bracket, n_nodes, eps_eig, refine_tol)
        except LostBracket as err:
            log.debug("dropped dip %s: %s", bracket, err)
            continue
        mult = multiplicity(value, curve, potential, n_nodes, eps_eig, multiplicity_factor)
        report.brackets.append(bracket)
        report.eigenvalues.append((value, mult))
        log.debug("eigenvalue %.10f (m=%d) in %s", value, mult, bracket)
    return report


def refine(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    bracket: tuple[float, float],
    n_nodes: int = DEFAULT_NODES,
    eps_eig: float = EPS_EIG,
    tol: float = REFINE_TOL,
) -> float:
    """Golden-section minimiser of σ_min inside the bracket."""
    lo, hi = sorted(map(float, bracket))
    lo = max(lo, LAMBDA_FLOOR)
    objective = partial(sigma_min, curve=curve, potential=potential, n_nodes=n_nodes)
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    while hi - lo > tol:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = objective(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = objective(x2)
    best = 0.5 * (lo + hi)
    value = objective(best)
    if value > eps_eig:
        raise LostBracket(f"σ_min={value:.3e} > {eps_eig:g} in [{bracket[0]}, {bracket[1]}]")
    return best


def _cluster_threshold(values: np.ndarray, eps_eig: float, factor: float) -> float:
    """Singular values below this belong to the eigenvalue.

    The floor σ_min stands in for eps_eig when the boundary is under-resolved;
    an acceptance level looser than EPS_EIG does not widen the cluster.
    """
    return factor * max(min(eps_eig, EPS_EIG), float(values[-1]))


def multiplicity(
    lam: float,
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid] = None,
    n_nodes: int = DEFAULT_NODES,
    eps_eig: float = EPS_EIG,
    factor: float = MULTIPLICITY_FACTOR,
) -> int:
    kernels = assemble(lam, quadrature(curve, n_nodes), potential)
    values = svdvals(_system(kernels))
    return int(np.sum(values < _cluster_threshold(values, eps_eig, factor)))


# ---------------------------------------------------------------------------
# Eigenfunctions
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class EigenFunction:
    """u = 𝒟ψ in Ω; ``psi`` is real and already carries the normalisation."""

    lam: float
    kernels: KernelMatrixSet
    psi: np.ndarray

    @property
    def trace(self) -> np.ndarray:
        """u on ∂Ω at the nodes (inner trace of 𝒟ψ is −ψ)."""
        return -self.psi

    def value(self, x):
        return np.real(eval_double(self.kernels, self.psi, x))

    def tangential_derivative(self) -> np.ndarray:
        return arclength_derivative(self.kernels.quad, self.trace)


@dataclass(frozen=True, eq=False)
class EigenPair:
    lam: float
    multiplicity: int
    functions: tuple
    kernels: KernelMatrixSet
    singular_values: np.ndarray

    @property
    def quad(self) -> SurfaceQuadrature:
        return self.kernels.quad

    @property
    def is_simple(self) -> bool:
        return self.multiplicity == 1


def _real_basis(null: np.ndarray, count: int) -> np.ndarray:
    """Real basis of the span of complex null vectors (the eigenspace is real)."""
    stacked = np.concatenate([null.real, null.imag], axis=1)
    left, values, _ = svd(stacked, full_matrices=False)
    if len(values) > count and values[count] > IMAGINARY_WARN * values[0]:
        log.warning(
            "null vectors are not real up to a phase: residue %.2e", values[count] / values[0]
        )
    return left[:, :count]


def _cell_values(kernels: KernelMatrixSet, psi: np.ndarray):
    """u_i on the potential's support cells and 2V + x·∇V there."""
    potential = kernels.potential
    if potential is None or potential.is_zero:
        return None, None
    center = kernels.quad.curve.centroid()
    mask = potential.support_mask()
    cells = potential.centers()[mask]
    grad_y, grad_x = np.gradient(np.pad(potential.values, 1), potential.h)
    grad = np.column_stack([grad_x[1:-1, 1:-1].ravel()[mask], grad_y[1:-1, 1:-1].ravel()[mask]])
    weight = 2.0 * potential.values.ravel()[mask] + np.einsum("ck,ck->c", cells - center, grad)
    values = np.column_stack(
        [np.real(eval_double(kernels, psi[:, i], cells)) for i in range(psi.shape[1])]
    )
    return values, weight * potential.h**2


def rellich_gram(kernels: KernelMatrixSet, traces: np.ndarray, psi: np.ndarray = None) -> np.ndarray:
    """Gram matrix ∫_Ω u_i u_j of eigenfunctions of λ = kernels.lam.

    ``traces`` holds u_i|_{∂Ω} column-wise; ``psi`` (= −traces by default)
    gives the interior values needed on the potential's cells.
    """
    quad = kernels.quad
    lam = kernels.lam
    traces = np.atleast_2d(np.asarray(traces, dtype=float).T).T
    psi = -traces if psi is None else psi
    center = quad.curve.centroid()
    support = np.einsum("ik,ik->i", quad.points - center, quad.normals)
    slopes = arclength_derivative(quad, traces)
    weights = (quad.weights * support)[:, None]
    boundary = lam * traces.T @ (weights * traces) - slopes.T @ (weights * slopes)
    gram = 0.5 * boundary
    cell_values, cell_weights = _cell_values(kernels, psi)
    if cell_values is not None:
        gram = gram + 0.5 * cell_values.T @ (cell_weights[:, None] * cell_values)
    return gram / lam


def eigenpair(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    lam: float,
    n_nodes: int = DEFAULT_NODES,
    eps_eig: float = EPS_EIG,
    multiplicity_factor: float = MULTIPLICITY_FACTOR,
) -> EigenPair:
    """Normalised real eigenfunctions of the refined eigenvalue λ.

    Each u_i has ∫_Ω u_i u_j = δ_ij and a non-negative trace at node 0.
    """
    kernels = assemble(lam, quadrature(curve, n_nodes), potential)
    _, values, vh = svd(_system(kernels))
    if values[-1] > eps_eig:
        raise NotAnEigenvalue(f"σ_min={values[-1]:.3e} at λ={lam:.10g}")
    count = max(1, int(np.sum(values < _cluster_threshold(values, eps_eig, multiplicity_factor))))
    null = np.conj(vh[-count:]).T
    psi = _real_basis(null, count)

    gram = rellich_gram(kernels, -psi, psi)
    lower = cholesky(gram, lower=True)
    psi = psi @ np.linalg.inv(lower).T
    for i in range(count):
        if -psi[0, i] < 0:
            psi[:, i] *= -1.0
    functions = tuple(EigenFunction(lam=float(lam), kernels=kernels, psi=psi[:, i]) for i in range(count))
    log.debug("eigenpair at λ=%.10g: m=%d, σ=%s", lam, count, values[-count:])
    return EigenPair(
        lam=float(lam),
        multiplicity=count,
        functions=functions,
        kernels=kernels,
        singular_values=values,
    )


# ---------------------------------------------------------------------------
# Interior integrals
# ---------------------------------------------------------------------------
def interior_quadrature(
    curve: BoundaryCurve,
    f: Callable[[np.ndarray], np.ndarray],
    radial_nodes: int = RADIAL_NODES,
    n_angles: int = DEFAULT_NODES,
) -> float:
    """∫_Ω f on the polar map about the centroid (curve must be star-shaped)."""
    rule = polar_rule(curve, radial_nodes, n_angles)
    return rule.integrate(f(rule.points))


def _ray_samples(functions, radial_nodes: int, upsampling: int = EVAL_UPSAMPLING):
    """Eigenfunction values and weights of ∫_Ω on a polar rule.

    Inside r ≤ r₀ the double layer is evaluated on an upsampled boundary; in
    the strip r₀ < r ≤ 1 each ray uses the quadratic matching the trace, its
    ray derivative at r = 1 and the value at r₀.
    """
    quad = functions[0].kernels.quad
    fine = quadrature(quad.curve, upsampling * quad.n, check_resolution=False)
    center = quad.curve.centroid()
    rel = quad.points - center
    cross = rel[:, 0] * quad.d1[:, 1] - rel[:, 1] * quad.d1[:, 0]
    reach = np.einsum("ik,ik->i", rel, quad.normals)
    floor = NEAR_BOUNDARY_FACTOR * fine.perimeter / fine.n
    r0 = 1.0 - 1.5 * floor / np.min(reach)
    if r0 <= 0.2:
        raise InputError("boundary too coarse for interior eigenfunction quadrature")

    gl_nodes, gl_weights = np.polynomial.legendre.leggauss(radial_nodes)
    inner_r = 0.5 * r0 * (gl_nodes + 1.0)
    inner_w = 0.5 * r0 * gl_weights
    outer_r = r0 + 0.5 * (1.0 - r0) * (gl_nodes + 1.0)
    outer_w = 0.5 * (1.0 - r0) * gl_weights
    h = 2.0 * np.pi / quad.n

    inner_points = (center + inner_r[:, None, None] * rel[None, :, :]).reshape(-1, 2)
    edge_points = center + r0 * rel
    samples = []
    for fn in functions:
        fine_kernels = assemble(fn.lam, fine, fn.kernels.potential)
        psi_fine = interpolate_density(fn.psi, fine.n)
        inner = np.real(eval_double(fine_kernels, psi_fine, inner_points)).reshape(radial_nodes, -1)
        edge = np.real(eval_double(fine_kernels, psi_fine, edge_points))
        trace = fn.trace
        # d/dr of u(c + r(γ − c)) at r = 1 is (γ − c)·∇_{∂Ω}u when ∂_νu = 0
        slope = fn.tangential_derivative() * np.einsum("ik,ik->i", rel, quad.tangents)
        gap = r0 - 1.0
        curvature = (edge - trace - slope * gap) / gap**2
        delta = outer_r[:, None] - 1.0
        outer = trace[None, :] + slope[None, :] * delta + curvature[None, :] * delta**2
        samples.append(np.concatenate([inner, outer]))
    weights = np.concatenate([inner_w * inner_r, outer_w * outer_r])[:, None] * h * cross[None, :]
    return samples, weights


def inner_product(f: EigenFunction, g: EigenFunction, radial_nodes: int = RADIAL_NODES) -> float:
    """∫_Ω f g by the polar rule with the boundary-strip model."""
    if f.kernels.quad.curve is not g.kernels.quad.curve or f.kernels.quad.n != g.kernels.quad.n:
        raise InputError("eigenfunctions live on different boundaries")
    samples, weights = _ray_samples([f, g], radial_nodes)
    return float(np.sum(weights * samples[0] * samples[1]))


def orthogonality_check(pairs: list, radial_nodes: int = RADIAL_NODES) -> pd.DataFrame:
    """Table of ∫_Ω u_i u_j over all eigenfunctions of the given pairs."""
    functions = [fn for pair in pairs for fn in pair.functions]
    labels = [f"{pair.lam:.6f}#{i}" for pair in pairs for i in range(pair.multiplicity)]
    table = np.zeros((len(functions), len(functions)))
    for i, fi in enumerate(functions):
        for j in range(i, len(functions)):
            table[i, j] = table[j, i] = inner_product(fi, functions[j], radial_nodes)
    return pd.DataFrame(table, index=labels, columns=labels)
