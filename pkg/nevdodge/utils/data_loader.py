"""
Loaders for the JSON input files: domains, potentials, deformation fields,
dodge plans and boundary data.
"""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from nevdodge.errors import GeometryError, InputError
from nevdodge.geometry.boundary_geometry import BoundaryCurve, DeformationField
from nevdodge.process.dodge_planner import DodgePlan
from nevdodge.process.potential_field import PotentialGrid

log = logging.getLogger(__name__)


def load_json(path: str | Path) -> Any:
    """
    Read a JSON file, turning every failure into an InputError naming the path.
    """

    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except FileNotFoundError as err:
        raise InputError(f"no such file: {path}") from err
    except (OSError, json.JSONDecodeError) as err:
        raise InputError(f"cannot parse {path}: {err}") from err
    log.debug("loaded %s", path)
    return payload


def _build(path, builder, what):
    payload = load_json(path)
    if not isinstance(payload, dict):
        raise InputError(f"{path}: {what} file must hold a JSON object")
    try:
        return builder(payload)
    except (InputError, GeometryError):
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise InputError(f"{path}: malformed {what} file ({err!r})") from err


def load_domain(path: str | Path) -> BoundaryCurve:
    """{"K": int, "coeff_x": [[re, im], ...], "coeff_y": [[re, im], ...]}"""
    return _build(path, BoundaryCurve.from_dict, "domain")


def load_potential(path: str | Path) -> PotentialGrid:
    """{"origin": [x, y], "h": f, "nx": int, "ny": int, "values": [...]}"""
    return _build(path, PotentialGrid.from_dict, "potential")


def load_field(path: str | Path) -> DeformationField:
    """{"field_x": [...], "field_y": [...], "sigma_arc": [s0, s1], "v_margin": r}"""
    return _build(path, DeformationField.from_dict, "deformation")


def load_plan(path: str | Path) -> DodgePlan:
    return _build(path, DodgePlan.from_dict, "plan")


def load_boundary_data(path: str | Path, n_nodes: int) -> np.ndarray:
    """{"f2": [[re, im], ...]} with one entry per quadrature node."""
    payload = load_json(path)
    try:
        f2 = np.array([complex(re, im) for re, im in payload["f2"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as err:
        raise InputError(f"{path}: malformed boundary-condition file ({err!r})") from err
    if len(f2) != n_nodes:
        raise InputError(f"{path}: {len(f2)} values of f2 for {n_nodes} quadrature nodes")
    return f2
