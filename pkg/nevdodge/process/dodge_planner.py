"""
Deform a domain until a target λ is at least δ away from its Neumann spectrum,
keeping the arc Σ′ and a neighbourhood of supp V fixed.

Each round classifies λ against the spectrum of the current domain:

    not an eigenvalue   certify with an independent finer scan and stop
    simple eigenvalue   push it away along a normal bump where the boundary
                        indicator gives the largest |λ̇|, line-searching t
    multiple            split it with a random admissible field, then reclassify
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from tqdm import tqdm

from nevdodge.constants import (
    BUMP_WIDTH,
    CERTIFY_FACTOR,
    CERTIFY_STEPS,
    COEFF_BOUND,
    CUTOFF_TRANSITION,
    DEFAULT_NODES,
    DODGE_DELTA,
    DODGE_EPS_EIG,
    EPS_EIG,
    FIELD_ORDER,
    LAMBDA_FLOOR,
    MAX_ITER,
    MULTIPLICITY_FACTOR,
    SPLIT_MAX_STEP,
    SPLIT_RETRIES,
    SPLIT_STEPS,
    SPLIT_WINDOW,
    STEP_SCHEDULE,
)
from nevdodge.errors import (
    DeformationTooLarge,
    InputError,
    IterationBudgetExceeded,
    PlanFailure,
    SplitFailure,
)
from nevdodge.geometry.boundary_geometry import (
    BoundaryCurve,
    DeformationField,
    SurfaceQuadrature,
    bump_profile,
    deform,
    to_fourier,
)
from nevdodge.process.eigen_scanner import EigenPair, ScanReport, eigenpair, scan
from nevdodge.process.potential_field import PotentialGrid
from nevdodge.process.shape_derivative import (
    boundary_indicator,
    eigenvalue_derivative,
    trace_nonvanishing,
)

log = logging.getLogger(__name__)

NOT_EIGEN = "not_eigen"
SIMPLE = "simple"
MULTIPLE = "multiple"

CLASSIFY_STEPS = 24
# |λ̇| below which a bump is considered useless
PLAN_FLOOR = 1e-8
WIDEN_FACTOR = 1.5
WIDEN_TRIES = 4


@dataclass(frozen=True)
class DodgePlan:
    target: float
    delta: float = DODGE_DELTA
    sigma_arc: tuple = (0.0, 0.5 * np.pi)
    v_margin: float = 0.1
    max_iter: int = MAX_ITER
    step_schedule: tuple = tuple(STEP_SCHEDULE)
    seed: int = 0
    split_retries: int = SPLIT_RETRIES
    field_order: int = FIELD_ORDER
    coeff_bound: float = COEFF_BOUND
    bump_width: float = BUMP_WIDTH
    transition: float = CUTOFF_TRANSITION
    eps_detect: float = DODGE_EPS_EIG

    def __post_init__(self):
        if self.delta <= 0:
            raise InputError(f"delta must be positive, got {self.delta}")
        if self.target < LAMBDA_FLOOR:
            raise InputError(f"target λ={self.target} below {LAMBDA_FLOOR}")
        s0, s1 = self.sigma_arc
        if (s1 - s0) % (2 * np.pi) == 0.0:
            raise InputError("Σ′ must be a nonempty proper arc")
        if self.max_iter < 0 or self.v_margin < 0:
            raise InputError("max_iter and v_margin must be non-negative")
        if self.eps_detect <= 0:
            raise InputError(f"eps_detect must be positive, got {self.eps_detect}")
        if not self.step_schedule or min(self.step_schedule) <= 0:
            raise InputError("step schedule needs positive steps")

    def cutoffs(self, potential: Optional[PotentialGrid]) -> dict:
        box = None if potential is None else potential.support_box()
        return {
            "sigma_arc": tuple(float(s) for s in self.sigma_arc),
            "v_margin": self.v_margin,
            "v_box": box,
            "transition": self.transition,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "DodgePlan":
        try:
            kwargs = {"target": float(payload["target"])}
        except (KeyError, TypeError, ValueError) as err:
            raise InputError(f"plan needs a numeric target: {err}") from err
        for name, cast in (
            ("delta", float),
            ("v_margin", float),
            ("max_iter", int),
            ("seed", int),
            ("split_retries", int),
            ("field_order", int),
            ("coeff_bound", float),
            ("bump_width", float),
            ("transition", float),
            ("eps_detect", float),
        ):
            if name in payload:
                kwargs[name] = cast(payload[name])
        if "sigma_arc" in payload:
            kwargs["sigma_arc"] = tuple(float(s) for s in payload["sigma_arc"])
        if "step_schedule" in payload:
            kwargs["step_schedule"] = tuple(float(t) for t in payload["step_schedule"])
        return cls(**kwargs)


@dataclass(frozen=True, eq=False)
class Classification:
    kind: str
    eigenvalue: Optional[float] = None
    multiplicity: int = 0
    pair: Optional[EigenPair] = None


@dataclass(eq=False)
class DodgeResult:
    curve: BoundaryCurve
    trajectory: list = field(default_factory=list)
    final_distance: float = np.inf
    history: list = field(default_factory=list)
    certificate: Optional[ScanReport] = None

    @property
    def steps(self) -> int:
        return len(self.trajectory)

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "history": list(self.history),
            "trajectory": self.trajectory,
            "final_distance": None if np.isinf(self.final_distance) else self.final_distance,
            "certificate": None if self.certificate is None else self.certificate.summary(),
        }

    def export_curve(self, order: Optional[int] = None) -> BoundaryCurve:
        return to_fourier(self.curve, order) if self.curve.steps else self.curve


def classify(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    lam: float,
    tol: float,
    n_nodes: int = DEFAULT_NODES,
    threads: int = 1,
    steps: int = CLASSIFY_STEPS,
    eps_eig: float = EPS_EIG,
) -> Classification:
    """Is λ within ``tol`` of a Neumann eigenvalue, and of what multiplicity?

    The scan covers [λ−2·tol, λ+2·tol] so that a dip just inside the tolerance
    is an interior minimum of the samples.
    """
    if lam < LAMBDA_FLOOR:
        raise InputError(f"λ={lam} below {LAMBDA_FLOOR}")
    report = scan(
        curve,
        potential,
        max(LAMBDA_FLOOR, lam - 2 * tol),
        lam + 2 * tol,
        steps,
        n_nodes,
        threads,
        eps_eig=eps_eig,
    )
    nearest = report.nearest(lam)
    if nearest is None or abs(nearest - lam) >= tol:
        return Classification(NOT_EIGEN)
    pair = eigenpair(curve, potential, nearest, n_nodes, eps_eig=eps_eig)
    kind = SIMPLE if pair.is_simple else MULTIPLE
    log.debug("λ=%g: %s eigenvalue %.10f (m=%d)", lam, kind, nearest, pair.multiplicity)
    return Classification(kind, nearest, pair.multiplicity, pair)


def plan_simple(
    pair: EigenPair,
    plan: DodgePlan,
    potential: Optional[PotentialGrid] = None,
    indicator: Optional[np.ndarray] = None,
) -> DeformationField:
    """Normal bump moving the simple eigenvalue away from the target.

    The bump centre maximises |λ̇| over nodes where the cutoff η is 1; the
    field is scaled to unit C¹ norm and signed so that λ̇ points away from
    the target.
    """
    quad: SurfaceQuadrature = pair.quad
    values = boundary_indicator(pair).values if indicator is None else np.asarray(indicator)
    if trace_nonvanishing(pair) <= 0.0:
        log.warning("eigenfunction trace vanishes on a boundary arc at λ=%g", pair.lam)
    cutoffs = plan.cutoffs(potential)
    frame = DeformationField(field_x=np.zeros(1), field_y=np.zeros(1), **cutoffs)
    eta = frame.eta(quad.s, quad.points)
    candidates = np.flatnonzero(eta >= 1.0 - 1e-12)
    if not len(candidates):
        raise PlanFailure("no boundary node is free to move outside Σ′ and supp V")

    direction = np.sign(pair.lam - plan.target)
    width = plan.bump_width
    for _ in range(WIDEN_TRIES):
        scores = np.array(
            [np.sum(quad.weights * eta * bump_profile(quad.s, quad.s[c], width) * values) for c in candidates]
        )
        best = candidates[int(np.argmax(np.abs(scores)))]
        score = scores[int(np.argmax(np.abs(scores)))]
        if abs(score) >= PLAN_FLOOR:
            break
        width *= WIDEN_FACTOR
    else:
        raise PlanFailure(
            f"|λ̇| < {PLAN_FLOOR:g} for every admissible bump at λ={pair.lam:.10g}: "
            "boundary indicator numerically null"
        )

    bump = DeformationField.normal_bump(quad.curve, float(quad.s[best]), width, **cutoffs)
    bump = bump.scaled(1.0 / bump.c1_norm(quad.curve))
    lambda_dot = eigenvalue_derivative(pair, bump).lambda_dot
    if direction == 0.0:
        direction = np.sign(lambda_dot)
    if np.sign(lambda_dot) != direction:
        bump = bump.scaled(-1.0)
        lambda_dot = -lambda_dot
    log.debug(
        "bump at s=%.4f width %.3f: λ̇=%.6g for λ=%.8f", quad.s[best], width, lambda_dot, pair.lam
    )
    return bump


def _contained(curve: BoundaryCurve, potential: Optional[PotentialGrid], margin: float) -> bool:
    if potential is None or potential.is_zero:
        return True
    return potential.support_clearance(curve) >= margin


def _window(report: ScanReport) -> list[float]:
    return [value for value, _ in report.eigenvalues]


def _push_simple(curve, potential, plan, pair, n_nodes, threads=1, progress=False):
    """Line search along the schedule; returns (curve, t, tracked λ).

    A step is accepted only when the δ-window is clear both at the working
    resolution and at the certificate resolution.
    """
    bump = plan_simple(pair, plan, potential)
    lambda_dot = eigenvalue_derivative(pair, bump).lambda_dot
    lam, delta = plan.target, plan.delta
    start = abs(pair.lam - lam)
    fallback = None
    for t in tqdm(plan.step_schedule, desc="line search", disable=not progress):
        try:
            moved = deform(curve, bump, t)
        except DeformationTooLarge:
            break
        if not _contained(moved, potential, plan.v_margin):
            break
        report = scan(
            moved, potential, max(LAMBDA_FLOOR, lam - 5 * delta), lam + 5 * delta,
            CERTIFY_STEPS, n_nodes, threads, eps_eig=plan.eps_detect,
        )
        found = _window(report)
        prediction = pair.lam + t * lambda_dot
        tracked = min(found, key=lambda v: abs(v - prediction)) if found else prediction
        if all(abs(value - lam) >= delta for value in found):
            _, distance = certify(moved, potential, plan, n_nodes, threads)
            if distance >= delta:
                return moved, t, tracked
            log.debug("t=%g clears the window at N=%d only", t, n_nodes)
        if abs(tracked - lam) > start and (fallback is None or abs(tracked - lam) > abs(fallback[2] - lam)):
            fallback = (moved, t, tracked)
    if fallback is None:
        raise PlanFailure(f"no step in {list(plan.step_schedule)} moves λ_k={pair.lam:.8f} away")
    return fallback


def split_multiple(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    lam_k: float,
    plan: DodgePlan,
    multiplicity: int = 2,
    rng: Optional[np.random.Generator] = None,
    n_nodes: int = DEFAULT_NODES,
    threads: int = 1,
) -> BoundaryCurve:
    """Perturb by random admissible fields until the cluster at λ_k splits."""
    moved, _, _ = _split(curve, potential, lam_k, plan, multiplicity, rng, n_nodes, threads)
    return moved


def _split(curve, potential, lam_k, plan, multiplicity, rng, n_nodes, threads=1):
    """Each random draw is tried at growing t until the cluster separates."""
    rng = np.random.default_rng(plan.seed) if rng is None else rng
    steps = [t for t in plan.step_schedule if t <= SPLIT_MAX_STEP] or [min(plan.step_schedule)]
    separation = MULTIPLICITY_FACTOR * EPS_EIG
    cutoffs = plan.cutoffs(potential)
    for attempt in range(plan.split_retries):
        random_field = DeformationField.random_trigonometric(
            plan.field_order, plan.coeff_bound, rng, **cutoffs
        )
        for t in steps:
            try:
                moved = deform(curve, random_field, t)
            except DeformationTooLarge:
                break
            if not _contained(moved, potential, plan.v_margin):
                break
            report = scan(
                moved,
                potential,
                max(LAMBDA_FLOOR, lam_k - SPLIT_WINDOW),
                lam_k + SPLIT_WINDOW,
                SPLIT_STEPS,
                n_nodes,
                threads,
                eps_eig=plan.eps_detect,
            )
            values = sorted(value for value, _ in report.eigenvalues)
            simple = all(mult == 1 for _, mult in report.eigenvalues)
            gaps = np.diff(values)
            if len(values) >= multiplicity and simple and np.all(gaps > separation):
                log.debug("split λ=%.8f into %s at t=%g after %d draws", lam_k, values, t, attempt + 1)
                return moved, t, values
    raise SplitFailure(
        f"λ={lam_k:.10g} still multiple after {plan.split_retries} random perturbations"
    )


def _certify_nodes(n_nodes: int) -> int:
    return 2 * int(round(0.5 * CERTIFY_FACTOR * n_nodes))


def certify(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    plan: DodgePlan,
    n_nodes: int = DEFAULT_NODES,
    threads: int = 1,
) -> tuple[ScanReport, float]:
    """Fresh scan of [λ−5δ, λ+5δ] at 1.5× the working resolution."""
    lam, delta = plan.target, plan.delta
    report = scan(
        curve, potential, max(LAMBDA_FLOOR, lam - 5 * delta), lam + 5 * delta,
        CERTIFY_STEPS, _certify_nodes(n_nodes), threads, eps_eig=plan.eps_detect,
    )
    found = _window(report)
    distance = min((abs(value - lam) for value in found), default=np.inf)
    return report, distance


def dodge(
    curve: BoundaryCurve,
    potential: Optional[PotentialGrid],
    plan: DodgePlan,
    n_nodes: int = DEFAULT_NODES,
    threads: int = 1,
    progress: bool = False,
) -> DodgeResult:
    """Deform ``curve`` until ``plan.target`` is δ-far from its spectrum.

    When the certificate sees an eigenvalue the working scan missed, the
    working resolution is raised once to the certificate's and the loop goes on.
    """
    if not _contained(curve, potential, plan.v_margin):
        raise InputError(f"potential support closer than {plan.v_margin} to the boundary")
    rng = np.random.default_rng(plan.seed)
    result = DodgeResult(curve=curve)
    current = curve
    working = n_nodes
    for iteration in range(plan.max_iter + 1):
        state = classify(
            current, potential, plan.target, plan.delta, working, threads=threads,
            eps_eig=plan.eps_detect,
        )
        result.history.append(state.kind)
        if state.kind == NOT_EIGEN:
            report, distance = certify(current, potential, plan, working, threads)
            if distance < plan.delta:
                if working != n_nodes:
                    raise PlanFailure(
                        f"certificate found an eigenvalue {distance:.3g} from λ={plan.target}"
                    )
                working = _certify_nodes(n_nodes)
                log.info("certificate disagrees at N=%d, continuing at N=%d", n_nodes, working)
                continue
            result.curve = current
            result.certificate = report
            result.final_distance = distance
            log.info("λ=%g cleared after %d deformations", plan.target, result.steps)
            return result
        if iteration == plan.max_iter:
            break
        if state.kind == SIMPLE:
            current, t, tracked = _push_simple(
                current, potential, plan, state.pair, working, threads, progress
            )
            result.trajectory.append({"kind": SIMPLE, "t": t, "from": state.eigenvalue, "to": [tracked]})
        else:
            current, t, values = _split(
                current, potential, state.eigenvalue, plan, state.multiplicity, rng, working, threads
            )
            result.trajectory.append({"kind": MULTIPLE, "t": t, "from": state.eigenvalue, "to": values})
        log.debug("iteration %d: %s", iteration, result.trajectory[-1])
    raise IterationBudgetExceeded(
        f"λ={plan.target} still within δ={plan.delta} of the spectrum after {plan.max_iter} iterations"
    )
