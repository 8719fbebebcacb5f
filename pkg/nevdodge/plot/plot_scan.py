"""
Figures for scans and dodge runs. SVG is written directly; .pdf and .png go
through matplotlib.
"""

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from nevdodge.geometry.boundary_geometry import BoundaryCurve, nodes
from nevdodge.plot.svg_writer import domain_svg, scan_svg, write_svg
from nevdodge.process.eigen_scanner import ScanReport

CURVE_SAMPLES = 400


def _is_svg(file_name: str | Path) -> bool:
    return Path(file_name).suffix.lower() == ".svg"


def plot_scan(report: ScanReport, file_name: str | Path) -> Path:
    """
    σ_min against λ with the refined eigenvalues marked.
    """

    eigenvalues = [value for value, _ in report.eigenvalues]
    if _is_svg(file_name):
        return write_svg(scan_svg(report.lambdas, report.sigmas, eigenvalues), file_name)

    plt.figure(figsize=(8, 5))
    plt.semilogy(report.lambdas, report.sigmas, color="#1f4e79", linewidth=1.5)
    for value in eigenvalues:
        plt.axvline(x=value, color="red", linewidth=1, alpha=0.5, linestyle="--")
    plt.xlabel("λ")
    plt.ylabel("σ_min")
    plt.xlim(report.lambdas[0], report.lambdas[-1])

    # save the plot to the figure path
    Path(file_name).parent.mkdir(parents=True, exist_ok=True)
    plt.savefig(file_name, bbox_inches="tight")
    plt.close()
    return Path(file_name)


def plot_domains(
    curves: Sequence[BoundaryCurve],
    file_name: str | Path,
    sigma_arc: Optional[tuple[float, float]] = None,
    support_box: Optional[tuple[float, float, float, float]] = None,
    labels: Sequence[str] = ("before", "after"),
) -> Path:
    """
    Domains overlaid, frozen arc Σ′ highlighted and supp V boxed.
    """

    if _is_svg(file_name):
        return write_svg(domain_svg(curves, sigma_arc, support_box, labels), file_name)

    s = nodes(CURVE_SAMPLES)
    plt.figure(figsize=(6, 6))
    for curve, label in zip(curves, list(labels) + [None] * len(curves)):
        outline = curve.points(np.append(s, 0.0))
        plt.plot(outline[:, 0], outline[:, 1], linewidth=1.5, label=label)
    if sigma_arc is not None:
        s0, s1 = sigma_arc
        arc = np.linspace(s0, s0 + (s1 - s0) % (2 * np.pi), 100)
        points = curves[0].points(arc)
        plt.plot(points[:, 0], points[:, 1], color="#ef6c00", linewidth=4, label="Σ′")
    if support_box is not None:
        xmin, ymin, xmax, ymax = support_box
        plt.plot(
            [xmin, xmax, xmax, xmin, xmin], [ymin, ymin, ymax, ymax, ymin], color="red", linewidth=1
        )
    plt.gca().set_aspect("equal")
    plt.legend(bbox_to_anchor=(1.01, 1), loc="upper left")

    # save the plot to the figure path
    Path(file_name).parent.mkdir(parents=True, exist_ok=True)
    plt.savefig(file_name, bbox_inches="tight")
    plt.close()
    return Path(file_name)
