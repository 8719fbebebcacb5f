"""
First-order sensitivity of a simple Neumann eigenvalue to a boundary
deformation h_t = id + tηX:

    λ̇(0) = ∫_{∂Ω} (|∇_{∂Ω}u|² − λu²) (ηX·ν),

u the L²-normalised eigenfunction. Only the boundary trace of u enters.
"""

import logging
from dataclasses import dataclass
from functools import partial
from multiprocessing import Pool
from typing import NamedTuple, Optional

import numpy as np

from nevdodge.constants import (
    DEFAULT_NODES,
    FD_STEP,
    LAMBDA_FLOOR,
    TRACK_WINDOW_FLOOR,
)
from nevdodge.errors import (
    DeformationTooLarge,
    InputError,
    MultipleEigenvalue,
    TrackingFailure,
)
from nevdodge.geometry.boundary_geometry import (
    BoundaryCurve,
    DeformationField,
    SurfaceQuadrature,
    deform,
)
from nevdodge.process.eigen_scanner import EigenPair, eigenpair, scan
from nevdodge.process.potential_field import PotentialGrid

log = logging.getLogger(__name__)

# |t|·‖ηX‖_{C¹} allowed in a finite-difference check
FD_STEP_BOUND = 0.1
TRACK_STEPS = 24


@dataclass(frozen=True, eq=False)
class DerivativeReport:
    lambda_dot: float
    indicator: np.ndarray
    sigma: np.ndarray
    weights: np.ndarray

    def to_dict(self) -> dict:
        return {
            "lambda_dot": self.lambda_dot,
            "indicator": [float(v) for v in self.indicator],
            "sigma": [float(v) for v in self.sigma],
        }


@dataclass(frozen=True, eq=False)
class BoundaryIndicator:
    """b_j = |∇_{∂Ω}u|² − λu² at the nodes."""

    values: np.ndarray
    argmax: int
    positive_arc: Optional[tuple[float, float]]


class DerivativeCheck(NamedTuple):
    formula: float
    finite_difference: float
    discrepancy: float
    lam_plus: float
    lam_minus: float

    @property
    def relative(self) -> float:
        return self.discrepancy / max(abs(self.formula), 1.0)


def _simple(pair: EigenPair) -> None:
    if not pair.is_simple:
        raise MultipleEigenvalue(
            f"λ={pair.lam:.10g} has multiplicity {pair.multiplicity}; "
            "the derivative formula needs a simple eigenvalue"
        )


def _indicator_values(pair: EigenPair, quad: SurfaceQuadrature) -> np.ndarray:
    fn = pair.functions[0]
    trace = fn.trace
    slope = fn.tangential_derivative()
    if quad is not pair.quad:
        raise InputError("indicator needs the quadrature the eigenpair was computed on")
    return slope**2 - pair.lam * trace**2


def _longest_run(mask: np.ndarray) -> Optional[tuple[int, int]]:
    """First and last index of the longest cyclic run of True."""
    if not np.any(mask):
        return None
    n = len(mask)
    if np.all(mask):
        return 0, n - 1
    start = int(np.argmin(mask))  # a False entry: runs cannot wrap past it
    best, best_len, run_start, run_len = None, 0, None, 0
    for offset in range(1, n + 1):
        i = (start + offset) % n
        if mask[i]:
            if run_len == 0:
                run_start = i
            run_len += 1
            if run_len > best_len:
                best, best_len = (run_start, i), run_len
        else:
            run_len = 0
    return best


def boundary_indicator(pair: EigenPair, quad: Optional[SurfaceQuadrature] = None) -> BoundaryIndicator:
    _simple(pair)
    quad = pair.quad if quad is None else quad
    values = _indicator_values(pair, quad)
    run = _longest_run(values >= 0.0)
    arc = None if run is None else (float(quad.s[run[0]]), float(quad.s[run[1]]))
    return BoundaryIndicator(values=values, argmax=int(np.argmax(values)), positive_arc=arc)


def trace_nonvanishing(pair: EigenPair, arc_nodes: int = 8) -> float:
    """Smallest sup|u| over arcs of ``arc_nodes`` consecutive nodes.

    A positive value means the trace vanishes on no sampled arc.
    """
    worst = np.inf
    for fn in pair.functions:
        magnitude = np.abs(fn.trace)
        windows = np.lib.stride_tricks.sliding_window_view(
            np.concatenate([magnitude, magnitude[: arc_nodes - 1]]), arc_nodes
        )
        worst = min(worst, float(np.min(windows.max(axis=1))))
    return worst


def eigenvalue_derivative(
    pair: EigenPair,
    deformation: DeformationField,
    quad: Optional[SurfaceQuadrature] = None,
) -> DerivativeReport:
    """λ̇(0) = Σ_j w_j σ_j b_j with σ = ηX·ν and b the boundary indicator."""
    _simple(pair)
    quad = pair.quad if quad is None else quad
    indicator = _indicator_values(pair, quad)
    sigma = np.einsum("ik,ik->i", deformation.displacement(quad.s, quad.points), quad.normals)
    lambda_dot = float(np.sum(quad.weights * sigma * indicator))
    return DerivativeReport(
        lambda_dot=lambda_dot, indicator=indicator, sigma=sigma, weights=quad.weights
    )


def track_eigenvalue(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    lam_pred: float,
    window: float = TRACK_WINDOW_FLOOR,
    n_nodes: int = DEFAULT_NODES,
    steps: int = TRACK_STEPS,
) -> float:
    """Refined eigenvalue closest to the prediction within λ_pred ± window."""
    lo = max(LAMBDA_FLOOR, lam_pred - window)
    report = scan(curve, potential, lo, lam_pred + window, steps, n_nodes)
    nearest = report.nearest(lam_pred)
    if nearest is None:
        raise TrackingFailure(f"no eigenvalue within {window:g} of {lam_pred:.10g}")
    return nearest


def _tracked(item, potential, window, n_nodes):
    curve, lam_pred = item
    return track_eigenvalue(curve, potential, lam_pred, window, n_nodes)


def finite_difference_check(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    lam: float,
    deformation: DeformationField,
    t: float = FD_STEP,
    n_nodes: int = DEFAULT_NODES,
    threads: int = 1,
) -> DerivativeCheck:
    """Compare λ̇ from the formula with (λ(t) − λ(−t)) / 2t.

    ``lam`` may be approximate; the eigenvalue nearest to it is refined first.
    """
    if t == 0.0:
        raise InputError("finite-difference step must be nonzero")
    lam_k = track_eigenvalue(curve, potential, lam, TRACK_WINDOW_FLOOR, n_nodes)
    pair = eigenpair(curve, potential, lam_k, n_nodes)
    formula = eigenvalue_derivative(pair, deformation).lambda_dot
    bound = deformation.c1_norm(curve)
    if abs(t) * bound >= FD_STEP_BOUND:
        raise DeformationTooLarge(f"|t|·b = {abs(t) * bound:.3g} ≥ {FD_STEP_BOUND}")
    window = max(TRACK_WINDOW_FLOOR, 10.0 * abs(t) * abs(formula))
    curves = [deform(curve, deformation, t), deform(curve, deformation, -t)]
    predictions = [pair.lam + t * formula, pair.lam - t * formula]
    track = partial(_tracked, potential=potential, window=window, n_nodes=n_nodes)
    items = list(zip(curves, predictions))
    if threads > 1:
        with Pool(min(threads, 2)) as pool:
            lam_plus, lam_minus = pool.map(track, items)
    else:
        lam_plus, lam_minus = map(track, items)
    finite_difference = (lam_plus - lam_minus) / (2.0 * t)
    log.debug(
        "λ̇ at %.8f: formula %.8f, central difference %.8f", pair.lam, formula, finite_difference
    )
    return DerivativeCheck(
        formula=formula,
        finite_difference=finite_difference,
        discrepancy=abs(formula - finite_difference),
        lam_plus=lam_plus,
        lam_minus=lam_minus,
    )
