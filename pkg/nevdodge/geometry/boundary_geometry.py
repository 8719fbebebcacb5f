"""
Fourier-parametrized closed curves, their boundary quadrature and the
deformations h_t = id + tηX that move them.

A curve is γ(s) = (x(s), y(s)), s ∈ [0, 2π), with x(s) = Σ_{|m|≤K} c_m e^{ims}
(same for y). Deformed curves keep the base coefficients together with the
chain of applied steps (t, field), so points are always evaluated exactly:

    γ_{i+1}(s) = γ_i(s) + t_i η_i(s) X_i(s)

and nodes on a frozen arc (η = 0) are reproduced bit for bit. Derivatives of
deformed curves are spectral, taken on a fine equispaced sampling.
"""

import logging
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Callable, Optional

import numpy as np
from matplotlib.path import Path as MplPath

from nevdodge.constants import (
    CUTOFF_TRANSITION,
    DEFAULT_NODES,
    RADIAL_NODES,
    REFIT_OVERSAMPLING,
    SIMPLICITY_CHECK_NODES,
    SIMPLICITY_FLOOR,
)
from nevdodge.errors import (
    DeformationTooLarge,
    DegenerateParametrization,
    NonSimpleCurve,
    NotStarShaped,
    ResolutionTooLow,
)

log = logging.getLogger(__name__)

FINE_SAMPLES = 1024
TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# Trigonometric helpers
# ---------------------------------------------------------------------------
def _modes(coeffs: np.ndarray) -> np.ndarray:
    order = (len(coeffs) - 1) // 2
    return np.arange(-order, order + 1)


def fourier_eval(coeffs: np.ndarray, s: np.ndarray, derivative: int = 0) -> np.ndarray:
    """Real trigonometric series Σ c_m (im)^d e^{ims} at the angles s."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    modes = _modes(coeffs)
    factor = (1j * modes) ** derivative * np.asarray(coeffs)
    return np.real(np.exp(1j * np.outer(s, modes)) @ factor)


def fft_coefficients(samples: np.ndarray) -> np.ndarray:
    """Centred coefficients (m = −M/2..M/2) interpolating M equispaced samples.

    The Nyquist coefficient is split evenly between ±M/2 so the series stays
    real-valued.
    """
    samples = np.asarray(samples)
    n_samples = samples.shape[0]
    if n_samples % 2:
        raise ValueError("fft_coefficients needs an even number of samples")
    half = n_samples // 2
    spectrum = np.fft.fft(samples, axis=0) / n_samples
    shifted = np.fft.fftshift(spectrum, axes=0)  # m = −half .. half−1
    coeffs = np.zeros((n_samples + 1,) + samples.shape[1:], dtype=complex)
    coeffs[:n_samples] = shifted
    coeffs[0] *= 0.5
    coeffs[n_samples] = coeffs[0]
    return coeffs


def spectral_derivative(values: np.ndarray, order: int = 1) -> np.ndarray:
    """d^order/ds^order of equispaced periodic samples (Nyquist mode dropped)."""
    values = np.asarray(values)
    n_samples = values.shape[0]
    wavenumbers = np.fft.fftfreq(n_samples, d=1.0 / n_samples)
    if n_samples % 2 == 0:
        wavenumbers[n_samples // 2] = 0.0
    multiplier = (1j * wavenumbers) ** order
    multiplier = multiplier.reshape((-1,) + (1,) * (values.ndim - 1))
    result = np.fft.ifft(multiplier * np.fft.fft(values, axis=0), axis=0)
    if np.isrealobj(values):
        return np.real(result)
    return result


def nodes(n_nodes: int) -> np.ndarray:
    return TWO_PI * np.arange(n_nodes) / n_nodes


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """C∞ transition from 0 (u ≤ 0) to 1 (u ≥ 1)."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        right = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return left / (left + right)


def _arc_distance(s: np.ndarray, arc: tuple[float, float]) -> np.ndarray:
    """Parameter distance from s to the periodic arc [s0, s1] (0 inside)."""
    s0, s1 = arc
    length = (s1 - s0) % TWO_PI
    rel = (np.asarray(s) - s0) % TWO_PI
    inside = rel <= length
    return np.where(inside, 0.0, np.minimum(rel - length, TWO_PI - rel))


def _box_distance(points: np.ndarray, box: tuple[float, float, float, float]) -> np.ndarray:
    xmin, ymin, xmax, ymax = box
    dx = np.maximum(np.maximum(xmin - points[:, 0], points[:, 0] - xmax), 0.0)
    dy = np.maximum(np.maximum(ymin - points[:, 1], points[:, 1] - ymax), 0.0)
    return np.hypot(dx, dy)


def bump_profile(s: np.ndarray, center_s: float, width: float) -> np.ndarray:
    """C∞ bump exp(1 − 1/(1 − ρ²)) of parameter width ``width``, 1 at center_s."""
    offset = (np.asarray(s) - center_s + np.pi) % TWO_PI - np.pi
    ratio = np.minimum(np.abs(offset) / (0.5 * width), 1.0)
    inside = ratio < 1.0
    safe = np.where(inside, ratio, 0.0)
    return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe**2)), 0.0)


def _normal_bump_profile(curve, center_s: float, width: float, amplitude: float, s: np.ndarray) -> np.ndarray:
    d1, _ = curve.derivatives_at(s)
    normals = np.column_stack([d1[:, 1], -d1[:, 0]]) / np.linalg.norm(d1, axis=1)[:, None]
    return amplitude * bump_profile(s, center_s, width)[:, None] * normals


def _scaled_profile(profile: Callable, factor: float, s: np.ndarray) -> np.ndarray:
    return factor * profile(s)


def _to_complex(pairs) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


# ---------------------------------------------------------------------------
# Deformation fields
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class DeformationField:
    """Boundary field ηX with X a trigonometric polynomial in s.

    η = χ₁χ₂ vanishes on the frozen arc ``sigma_arc`` (χ₁) and within
    ``v_margin`` of the potential's bounding box ``v_box`` (χ₂); both rise
    smoothly to 1 over ``transition``.
    """

    field_x: np.ndarray
    field_y: np.ndarray
    sigma_arc: Optional[tuple[float, float]] = None
    v_margin: float = 0.0
    v_box: Optional[tuple[float, float, float, float]] = None
    transition: float = CUTOFF_TRANSITION
    profile: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if len(self.field_x) != len(self.field_y) or len(self.field_x) % 2 == 0:
            raise ValueError("field coefficient lists need equal odd length 2L+1")

    def vector(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(s)
        values = np.column_stack([fourier_eval(self.field_x, s), fourier_eval(self.field_y, s)])
        if self.profile is not None:
            values = values + self.profile(s)
        return values

    def eta(self, s: np.ndarray, points: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(s)
        cut = np.ones_like(s, dtype=float)
        if self.sigma_arc is not None:
            cut *= _smooth_step(_arc_distance(s, self.sigma_arc) / self.transition)
        if self.v_box is not None:
            gap = _box_distance(np.atleast_2d(points), self.v_box) - self.v_margin
            cut *= _smooth_step(gap / self.transition)
        return cut

    def displacement(self, s: np.ndarray, points: np.ndarray) -> np.ndarray:
        return self.eta(s, points)[:, None] * self.vector(s)

    def with_potential_box(self, box, margin: Optional[float] = None) -> "DeformationField":
        return replace(
            self, v_box=tuple(box), v_margin=self.v_margin if margin is None else margin
        )

    def scaled(self, factor: float) -> "DeformationField":
        profile = self.profile
        if profile is not None:
            profile = partial(_scaled_profile, profile, factor)
        return replace(
            self, field_x=factor * self.field_x, field_y=factor * self.field_y, profile=profile
        )

    def c1_norm(self, curve: "BoundaryCurve") -> float:
        """max(sup|ηX|, sup|∂(ηX)/∂S|) along the curve, S the arclength."""
        s = nodes(FINE_SAMPLES)
        pts = curve.points(s)
        values = self.displacement(s, pts)
        speed = np.linalg.norm(curve.derivatives(FINE_SAMPLES)[1], axis=1)
        slope = np.linalg.norm(spectral_derivative(values), axis=1) / speed
        return float(max(np.max(np.linalg.norm(values, axis=1)), np.max(slope)))

    # -- constructors -----------------------------------------------------
    @classmethod
    def dilation(cls, curve: "BoundaryCurve", center=None, **cutoffs) -> "DeformationField":
        """X(γ(s)) = γ(s) − center; on a circle about ``center`` X·ν ≡ R."""
        base = curve if not curve.steps else to_fourier(curve, 2 * curve.order + 16)
        center = np.zeros(2) if center is None else np.asarray(center, dtype=float)
        field_x = base.coeff_x.copy()
        field_y = base.coeff_y.copy()
        field_x[base.order] -= center[0]
        field_y[base.order] -= center[1]
        return cls(field_x=field_x, field_y=field_y, **cutoffs)

    @classmethod
    def normal_bump(
        cls,
        curve: "BoundaryCurve",
        center_s: float,
        width: float,
        amplitude: float = 1.0,
        **cutoffs,
    ) -> "DeformationField":
        """X = amplitude·β(s)·ν(s), β a C∞ bump of parameter width ``width``.

        The profile is evaluated exactly at any s rather than refit, so X·ν
        vanishes outside the bump.
        """
        profile = partial(_normal_bump_profile, curve, center_s, width, amplitude)
        zero = np.zeros(1, dtype=complex)
        return cls(field_x=zero, field_y=zero.copy(), profile=profile, **cutoffs)

    @classmethod
    def random_trigonometric(
        cls, order: int, bound: float, rng: np.random.Generator, **cutoffs
    ) -> "DeformationField":
        """Seeded trigonometric field, modes 1..order, cosine and sine amplitudes
        drawn uniformly in [−bound/order, bound/order]."""
        limit = bound / order
        field_x = np.zeros(2 * order + 1, dtype=complex)
        field_y = np.zeros(2 * order + 1, dtype=complex)
        for coeffs in (field_x, field_y):
            for m in range(1, order + 1):
                a_m, b_m = rng.uniform(-limit, limit, size=2)
                # a cos(ms) + b sin(ms) = ((a − ib)/2) e^{ims} + ((a + ib)/2) e^{−ims}
                coeffs[order + m] = 0.5 * (a_m - 1j * b_m)
                coeffs[order - m] = 0.5 * (a_m + 1j * b_m)
        return cls(field_x=field_x, field_y=field_y, **cutoffs)

    @classmethod
    def from_dict(cls, payload: dict) -> "DeformationField":
        arc = payload.get("sigma_arc")
        return cls(
            field_x=_to_complex(payload["field_x"]),
            field_y=_to_complex(payload["field_y"]),
            sigma_arc=None if arc is None else (float(arc[0]), float(arc[1])),
            v_margin=float(payload.get("v_margin", 0.0)),
        )


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Closed counterclockwise curve; ``steps`` holds applied deformations."""

    coeff_x: np.ndarray
    coeff_y: np.ndarray
    steps: tuple = field(default_factory=tuple)

    @property
    def order(self) -> int:
        return (len(self.coeff_x) - 1) // 2

    def base_points(self, s: np.ndarray, derivative: int = 0) -> np.ndarray:
        return np.column_stack(
            [
                fourier_eval(self.coeff_x, s, derivative),
                fourier_eval(self.coeff_y, s, derivative),
            ]
        )

    def points(self, s: np.ndarray) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        pts = self.base_points(s)
        for t, step_field in self.steps:
            pts = pts + t * step_field.displacement(s, pts)
        return pts

    def derivatives(self, n_nodes: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """γ, γ′, γ″ at the equispaced nodes s_j = 2πj/n."""
        s = nodes(n_nodes)
        pts = self.points(s)
        d1 = self.base_points(s, 1)
        d2 = self.base_points(s, 2)
        if self.steps:
            ratio = max(1, int(np.ceil(FINE_SAMPLES / n_nodes)))
            fine = nodes(n_nodes * ratio)
            disp = self.points(fine) - self.base_points(fine)
            d1 = d1 + spectral_derivative(disp, 1)[::ratio]
            d2 = d2 + spectral_derivative(disp, 2)[::ratio]
        return pts, d1, d2

    def derivatives_at(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """γ′ and γ″ at arbitrary angles."""
        d1 = self.base_points(s, 1)
        d2 = self.base_points(s, 2)
        if self.steps:
            fine = nodes(FINE_SAMPLES)
            coeffs = fft_coefficients(self.points(fine) - self.base_points(fine))
            d1 = d1 + np.column_stack([fourier_eval(coeffs[:, i], s, 1) for i in range(2)])
            d2 = d2 + np.column_stack([fourier_eval(coeffs[:, i], s, 2) for i in range(2)])
        return d1, d2

    def signed_area(self, n_nodes: int = SIMPLICITY_CHECK_NODES) -> float:
        pts, d1, _ = self.derivatives(n_nodes)
        integrand = pts[:, 0] * d1[:, 1] - pts[:, 1] * d1[:, 0]
        return float(0.5 * TWO_PI / n_nodes * np.sum(integrand))

    def centroid(self, n_nodes: int = SIMPLICITY_CHECK_NODES) -> np.ndarray:
        pts, d1, _ = self.derivatives(n_nodes)
        area = self.signed_area(n_nodes)
        h = TWO_PI / n_nodes
        cx = 0.5 * h * np.sum(pts[:, 0] ** 2 * d1[:, 1]) / area
        cy = -0.5 * h * np.sum(pts[:, 1] ** 2 * d1[:, 0]) / area
        return np.array([cx, cy])

    def to_dict(self) -> dict:
        if self.steps:
            raise ValueError("refit deformed curves with to_fourier before export")
        return {
            "K": self.order,
            "coeff_x": [[c.real, c.imag] for c in self.coeff_x],
            "coeff_y": [[c.real, c.imag] for c in self.coeff_y],
        }

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_dict(cls, payload: dict) -> "BoundaryCurve":
        curve = make_curve(_to_complex(payload["coeff_x"]), _to_complex(payload["coeff_y"]))
        if "K" in payload and int(payload["K"]) != curve.order:
            raise DegenerateParametrization(
                f"K={payload['K']} does not match {len(curve.coeff_x)} coefficients"
            )
        return curve


def circle(radius: float = 1.0, center=(0.0, 0.0)) -> BoundaryCurve:
    return ellipse(radius, radius, center)


def ellipse(a: float, b: float, center=(0.0, 0.0)) -> BoundaryCurve:
    coeff_x = np.array([0.5 * a, center[0], 0.5 * a], dtype=complex)
    coeff_y = np.array([0.5j * b, center[1], -0.5j * b], dtype=complex)
    return make_curve(coeff_x, coeff_y)


def radial_curve(radius: float = 1.0, eps: float = 0.1, mode: int = 3) -> BoundaryCurve:
    """r(s) = R(1 + ε cos(ms)) traced counterclockwise."""
    order = mode + 1
    s = nodes(4 * order + 4)
    r = radius * (1.0 + eps * np.cos(mode * s))
    coeffs = fft_coefficients(np.column_stack([r * np.cos(s), r * np.sin(s)]))
    half = len(coeffs) // 2
    window = slice(half - order, half + order + 1)
    return make_curve(coeffs[window, 0], coeffs[window, 1])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------
def _segments_cross(pts: np.ndarray) -> bool:
    start = pts
    end = np.roll(pts, -1, axis=0)
    n_seg = len(pts)

    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (
            b[..., 1] - a[..., 1]
        ) * (c[..., 0] - a[..., 0])

    a1, a2 = start[:, None, :], end[:, None, :]
    b1, b2 = start[None, :, :], end[None, :, :]
    d1 = orient(a1, a2, b1)
    d2 = orient(a1, a2, b2)
    d3 = orient(b1, b2, a1)
    d4 = orient(b1, b2, a2)
    crossing = (d1 * d2 < 0) & (d3 * d4 < 0)
    index = np.arange(n_seg)
    gap = np.abs(index[:, None] - index[None, :])
    gap = np.minimum(gap, n_seg - gap)
    return bool(np.any(crossing & (gap >= 2)))


def validate_curve(curve: BoundaryCurve, n_check: Optional[int] = None) -> None:
    """Raise unless the curve is regular, simple and counterclockwise."""
    n_check = n_check or max(SIMPLICITY_CHECK_NODES, 8 * curve.order)
    pts, d1, _ = curve.derivatives(n_check)
    speed = np.linalg.norm(d1, axis=1)
    if not np.all(np.isfinite(pts)) or np.min(speed) <= 1e-10 * max(np.max(speed), 1e-300):
        raise DegenerateParametrization("|γ′(s)| vanishes at a node")

    arc = np.sum(speed) * TWO_PI / n_check / n_check
    dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
    index = np.arange(n_check)
    gap = np.abs(index[:, None] - index[None, :])
    gap = np.minimum(gap, n_check - gap)
    if np.any((gap >= 2) & (dist < SIMPLICITY_FLOOR * arc)):
        raise NonSimpleCurve("two non-adjacent nodes nearly coincide")
    if _segments_cross(pts):
        raise NonSimpleCurve("boundary polygon intersects itself")

    if curve.signed_area(n_check) <= 0.0:
        raise DegenerateParametrization("curve must be traced counterclockwise")


def make_curve(coeff_x, coeff_y) -> BoundaryCurve:
    """Validated curve from 2K+1 complex Fourier coefficients per coordinate."""
    coeff_x = np.asarray(coeff_x, dtype=complex)
    coeff_y = np.asarray(coeff_y, dtype=complex)
    if coeff_x.shape != coeff_y.shape or coeff_x.ndim != 1 or len(coeff_x) % 2 == 0:
        raise DegenerateParametrization("need two coefficient lists of equal length 2K+1")
    scale = max(np.max(np.abs(coeff_x)), np.max(np.abs(coeff_y)), 1.0)
    for coeffs in (coeff_x, coeff_y):
        if np.max(np.abs(coeffs - np.conj(coeffs[::-1]))) > 1e-12 * scale:
            raise DegenerateParametrization("coefficients must be conjugate symmetric")
    curve = BoundaryCurve(coeff_x=coeff_x, coeff_y=coeff_y)
    validate_curve(curve)
    return curve


# ---------------------------------------------------------------------------
# Quadrature and tangential calculus
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SurfaceQuadrature:
    """Trapezoidal rule on ∂Ω at s_j = 2πj/N (arclength weights)."""

    curve: BoundaryCurve
    n: int
    s: np.ndarray
    points: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    speed: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    curvature: np.ndarray

    @property
    def perimeter(self) -> float:
        return float(np.sum(self.weights))

    @property
    def tangents(self) -> np.ndarray:
        return self.d1 / self.speed[:, None]


def quadrature(
    curve: BoundaryCurve, n_nodes: int = DEFAULT_NODES, check_resolution: bool = True
) -> SurfaceQuadrature:
    if n_nodes % 2:
        raise ResolutionTooLow(f"node count must be even, got {n_nodes}")
    if check_resolution and n_nodes < 4 * curve.order:
        raise ResolutionTooLow(f"N={n_nodes} below 4K={4 * curve.order}")
    pts, d1, d2 = curve.derivatives(n_nodes)
    speed = np.linalg.norm(d1, axis=1)
    normals = np.column_stack([d1[:, 1], -d1[:, 0]]) / speed[:, None]
    curvature = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    return SurfaceQuadrature(
        curve=curve,
        n=n_nodes,
        s=nodes(n_nodes),
        points=pts,
        d1=d1,
        d2=d2,
        speed=speed,
        normals=normals,
        weights=TWO_PI / n_nodes * speed,
        curvature=curvature,
    )


def curvature_at(curve: BoundaryCurve, s) -> np.ndarray:
    """Signed curvature, positive for convex counterclockwise curves."""
    d1, d2 = curve.derivatives_at(np.atleast_1d(s))
    speed = np.linalg.norm(d1, axis=1)
    kappa = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    return kappa if np.ndim(s) else float(kappa[0])


def arclength_derivative(quad: SurfaceQuadrature, values: np.ndarray) -> np.ndarray:
    """∂f/∂S at the nodes (spectral in s, divided by |γ′|)."""
    values = np.asarray(values)
    scale = quad.speed.reshape((-1,) + (1,) * (values.ndim - 1))
    return spectral_derivative(values) / scale


def tangential_gradient(quad: SurfaceQuadrature, values: np.ndarray) -> np.ndarray:
    """∇_{∂Ω} f as vectors along the unit tangent."""
    return arclength_derivative(quad, values)[:, None] * quad.tangents


@dataclass(frozen=True, eq=False)
class PolarRule:
    """Nodes and weights of ∫_Ω on the map (r, s) ↦ c + r(γ(s) − c)."""

    center: np.ndarray
    points: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.real(np.sum(self.weights * np.asarray(values))))


def polar_rule(
    curve: BoundaryCurve,
    radial_nodes: int = RADIAL_NODES,
    n_angles: int = DEFAULT_NODES,
    center=None,
) -> PolarRule:
    """Gauss–Legendre in r times the trapezoid rule in s.

    The Jacobian is r·((γ − c) × γ′), so the curve must be star-shaped about
    c (the centroid by default): the cross product stays positive.
    """
    center = curve.centroid() if center is None else np.asarray(center, dtype=float)
    pts, d1, _ = curve.derivatives(n_angles)
    rel = pts - center
    cross = rel[:, 0] * d1[:, 1] - rel[:, 1] * d1[:, 0]
    if np.any(cross <= 0.0):
        raise NotStarShaped(f"curve is not star-shaped about {center.tolist()}")
    gl_nodes, gl_weights = np.polynomial.legendre.leggauss(radial_nodes)
    radii = 0.5 * (gl_nodes + 1.0)
    radial_weights = 0.5 * gl_weights
    points = center + radii[:, None, None] * rel[None, :, :]
    weights = (radial_weights * radii)[:, None] * (TWO_PI / n_angles) * cross[None, :]
    return PolarRule(center=center, points=points.reshape(-1, 2), weights=weights.ravel())


def contains(curve: BoundaryCurve, points: np.ndarray, n_nodes: int = FINE_SAMPLES) -> np.ndarray:
    """Winding test: which points lie strictly inside the curve."""
    polygon = MplPath(curve.points(nodes(n_nodes)))
    return polygon.contains_points(np.atleast_2d(points))


def boundary_distance(curve: BoundaryCurve, points: np.ndarray, n_nodes: int = FINE_SAMPLES) -> np.ndarray:
    """Distance from points to the densely sampled curve."""
    boundary = curve.points(nodes(n_nodes))
    points = np.atleast_2d(points)
    return np.min(np.linalg.norm(points[:, None, :] - boundary[None, :, :], axis=-1), axis=1)


# ---------------------------------------------------------------------------
# Deformation
# ---------------------------------------------------------------------------
def deform(curve: BoundaryCurve, deformation: DeformationField, t: float) -> BoundaryCurve:
    """Apply h_t = id + tηX to the curve."""
    if t == 0.0:
        return curve
    bound = deformation.c1_norm(curve)
    if abs(t) * bound >= 1.0:
        raise DeformationTooLarge(f"|t|·b = {abs(t) * bound:.3g} ≥ 1")
    moved = BoundaryCurve(
        coeff_x=curve.coeff_x, coeff_y=curve.coeff_y, steps=curve.steps + ((t, deformation),)
    )
    validate_curve(moved)
    log.debug("deformed curve by t=%g (b=%.3g), %d steps", t, bound, len(moved.steps))
    return moved


def to_fourier(curve: BoundaryCurve, order: Optional[int] = None) -> BoundaryCurve:
    """Least-squares trigonometric refit of a (deformed) curve at the given order."""
    order = order or max(curve.order, 32)
    n_samples = REFIT_OVERSAMPLING * (2 * order + 1)
    n_samples += n_samples % 2
    coeffs = fft_coefficients(curve.points(nodes(n_samples)))
    half = n_samples // 2
    window = slice(half - order, half + order + 1)
    coeff_x = coeffs[window, 0]
    coeff_y = coeffs[window, 1]
    # enforce exact conjugate symmetry after the truncation
    coeff_x = 0.5 * (coeff_x + np.conj(coeff_x[::-1]))
    coeff_y = 0.5 * (coeff_y + np.conj(coeff_y[::-1]))
    return make_curve(coeff_x, coeff_y)
