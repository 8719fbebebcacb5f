"""
Plain SVG figures: σ_min scan curves with the dips marked, and before/after
domain overlays with the frozen arc Σ′ highlighted.
"""

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from nevdodge.geometry.boundary_geometry import BoundaryCurve, nodes

WIDTH = 640
HEIGHT = 480
MARGIN = 48
CURVE_SAMPLES = 400


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def _polyline(points: np.ndarray, stroke: str, width: float = 1.5, closed: bool = False) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    tag = "polygon" if closed else "polyline"
    return (
        f'<{tag} points="{coords}" fill="none" stroke="{stroke}" '
        f'stroke-width="{width}" stroke-linejoin="round"/>'
    )


def _text(x: float, y: float, label: str, anchor: str = "middle", size: int = 12) -> str:
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="sans-serif" font-size="{size}" '
        f'text-anchor="{anchor}">{label}</text>'
    )


def _document(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    background = f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>'
    return "\n".join([head, background, *body, "</svg>"]) + "\n"


class _Frame:
    """Affine map from data coordinates to the drawing area (y up)."""

    def __init__(self, xlim, ylim, equal: bool = False):
        (x0, x1), (y0, y1) = xlim, ylim
        sx = (WIDTH - 2 * MARGIN) / max(x1 - x0, 1e-300)
        sy = (HEIGHT - 2 * MARGIN) / max(y1 - y0, 1e-300)
        if equal:
            sx = sy = min(sx, sy)
        self.x0, self.y0, self.sx, self.sy = x0, y0, sx, sy

    def __call__(self, xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(xy)
        return np.column_stack(
            [MARGIN + (xy[:, 0] - self.x0) * self.sx, HEIGHT - MARGIN - (xy[:, 1] - self.y0) * self.sy]
        )


def scan_svg(
    lambdas: np.ndarray,
    sigmas: np.ndarray,
    eigenvalues: Sequence[float] = (),
    title: str = "σ_min(λ)",
) -> str:
    """σ_min against λ on a log axis, refined eigenvalues as red ticks."""
    lambdas = np.asarray(lambdas, dtype=float)
    logs = np.log10(np.maximum(np.asarray(sigmas, dtype=float), 1e-16))
    frame = _Frame((lambdas[0], lambdas[-1]), (logs.min(), max(logs.max(), logs.min() + 1e-3)))
    body = [
        _polyline(frame(np.column_stack([lambdas, logs])), "#1f4e79"),
        _text(WIDTH / 2, MARGIN / 2, title, size=14),
        _text(WIDTH / 2, HEIGHT - 12, "λ"),
        _text(12, HEIGHT / 2, "log₁₀ σ_min", anchor="start"),
    ]
    for value in eigenvalues:
        (x, _), = frame(np.array([[value, logs.min()]]))
        body.append(
            f'<line x1="{_fmt(x)}" y1="{MARGIN}" x2="{_fmt(x)}" y2="{HEIGHT - MARGIN}" '
            'stroke="#c00000" stroke-width="1" stroke-dasharray="4,3"/>'
        )
        body.append(_text(x, MARGIN - 4, f"{value:.6f}", size=10))
    for value, end in ((lambdas[0], "start"), (lambdas[-1], "end")):
        (x, y), = frame(np.array([[value, logs.min()]]))
        body.append(_text(x, y + 16, f"{value:g}", anchor=end, size=10))
    return _document(body)


def _arc_mask(s: np.ndarray, arc: tuple[float, float]) -> np.ndarray:
    s0, s1 = arc
    length = (s1 - s0) % (2 * np.pi)
    return (s - s0) % (2 * np.pi) <= length


def domain_svg(
    curves: Sequence[BoundaryCurve],
    sigma_arc: Optional[tuple[float, float]] = None,
    support_box: Optional[tuple[float, float, float, float]] = None,
    labels: Sequence[str] = ("before", "after"),
) -> str:
    """Overlay of domains; Σ′ of the first curve drawn thick in orange."""
    s = nodes(CURVE_SAMPLES)
    outlines = [curve.points(s) for curve in curves]
    stacked = np.concatenate(outlines)
    lo, hi = stacked.min(axis=0), stacked.max(axis=0)
    pad = 0.05 * float(np.max(hi - lo))
    frame = _Frame((lo[0] - pad, hi[0] + pad), (lo[1] - pad, hi[1] + pad), equal=True)
    colours = ["#7f7f7f", "#1f4e79", "#2e7d32", "#6a1b9a"]
    body = [_text(WIDTH / 2, MARGIN / 2, "domain", size=14)]
    for i, (outline, label) in enumerate(zip(outlines, list(labels) + [""] * len(outlines))):
        body.append(_polyline(frame(outline), colours[i % len(colours)], closed=True))
        if label:
            body.append(_text(MARGIN, HEIGHT - MARGIN + 16 + 14 * i, label, anchor="start", size=10))
    if sigma_arc is not None:
        mask = _arc_mask(s, sigma_arc)
        # rotate so the arc is contiguous
        start = int(np.argmin(mask)) if not mask.all() else 0
        order = np.roll(np.arange(len(s)), -start)
        arc_points = outlines[0][order][mask[order]]
        if len(arc_points) > 1:
            body.append(_polyline(frame(arc_points), "#ef6c00", width=4.0))
    if support_box is not None:
        xmin, ymin, xmax, ymax = support_box
        corners = frame(np.array([[xmin, ymin], [xmax, ymin], [xmax, ymax], [xmin, ymax]]))
        body.append(_polyline(corners, "#c00000", width=1.0, closed=True))
    return _document(body)


def write_svg(text: str, file_name: str | Path) -> Path:
    path = Path(file_name)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path
