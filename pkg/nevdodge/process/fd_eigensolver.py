"""
Independent Neumann eigensolver for −Δ + V on a disk: cell-centred finite
volumes on a polar grid, zero flux through r = 0 and r = R.
"""

import logging
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from nevdodge.constants import LAMBDA_FLOOR
from nevdodge.process.potential_field import PotentialGrid

log = logging.getLogger(__name__)

# shift for the shift-invert mode; the operator is positive semidefinite
SHIFT = -1.0


def polar_operator(
    radius: float,
    potential: Optional[PotentialGrid],
    nr: int,
    ntheta: int,
    center=(0.0, 0.0),
) -> tuple[sparse.csr_matrix, sparse.dia_matrix]:
    """Stiffness plus potential (symmetric) and the diagonal cell-area mass."""
    dr = radius / nr
    dtheta = 2.0 * np.pi / ntheta
    r = (np.arange(nr) + 0.5) * dr
    faces = np.arange(1, nr) * dr
    theta = (np.arange(ntheta) + 0.5) * dtheta

    def index(i, j):
        return i * ntheta + j % ntheta

    rows, cols, vals = [], [], []

    def couple(a, b, weight):
        rows.extend([a, b, a, b])
        cols.extend([a, b, b, a])
        vals.extend([weight, weight, -weight, -weight])

    for i in range(nr):
        for j in range(ntheta):
            # angular faces
            couple(index(i, j), index(i, j + 1), dr / (r[i] * dtheta))
            if i < nr - 1:
                couple(index(i, j), index(i + 1, j), faces[i] * dtheta / dr)
    size = nr * ntheta
    stiffness = sparse.csr_matrix((vals, (rows, cols)), shape=(size, size))
    area = np.repeat(r * dr * dtheta, ntheta)
    if potential is not None and not potential.is_zero:
        grid_r, grid_t = np.meshgrid(r, theta, indexing="ij")
        points = np.column_stack(
            [center[0] + (grid_r * np.cos(grid_t)).ravel(), center[1] + (grid_r * np.sin(grid_t)).ravel()]
        )
        stiffness = stiffness + sparse.diags(area * potential.sample(points))
    return stiffness.tocsr(), sparse.diags(area)


def polar_neumann_eigenvalues(
    radius: float = 1.0,
    potential: Optional[PotentialGrid] = None,
    count: int = 3,
    nr: int = 121,
    ntheta: int = 128,
    center=(0.0, 0.0),
    lam_floor: float = LAMBDA_FLOOR,
) -> np.ndarray:
    """Lowest ``count`` eigenvalues ≥ lam_floor, repeated by multiplicity."""
    stiffness, mass = polar_operator(radius, potential, nr, ntheta, center)
    wanted = count + 4
    while True:
        values = eigsh(stiffness, k=wanted, M=mass, sigma=SHIFT, which="LM", return_eigenvectors=False)
        values = np.sort(values)
        kept = values[values >= lam_floor]
        if len(kept) >= count or wanted >= stiffness.shape[0] - 1:
            break
        wanted *= 2
    log.debug("polar FD eigenvalues (%d×%d): %s", nr, ntheta, kept[:count])
    return kept[:count]
