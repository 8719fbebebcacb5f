"""
Constants for the project.
"""

from pathlib import Path

from nevdodge.settings import PROJECT_ROOT

CONFIG_PATH: Path = PROJECT_ROOT / "config" / "conf.yaml"
DATA_PATH: Path = PROJECT_ROOT / "data"
DOMAIN_PATH: Path = DATA_PATH / "domains"
POTENTIAL_PATH: Path = DATA_PATH / "potentials"
FIELD_PATH: Path = DATA_PATH / "fields"
PLAN_PATH: Path = DATA_PATH / "plans"
BC_PATH: Path = DATA_PATH / "bc"
FIGURE_PATH: Path = PROJECT_ROOT / "figures"
RESULT_PATH: Path = PROJECT_ROOT / "results"
CACHE_PATH: Path = PROJECT_ROOT / ".cache"

EULER_GAMMA: float = 0.57721566490153286061

# boundary quadrature
DEFAULT_NODES: int = 128
SIMPLICITY_FLOOR: float = 0.5
SIMPLICITY_CHECK_NODES: int = 256
NEAR_BOUNDARY_FACTOR: float = 3.0
REFIT_OVERSAMPLING: int = 4

# scanning and eigenpairs
LAMBDA_FLOOR: float = 0.5
MIN_SCAN_STEPS: int = 16
DEFAULT_SCAN_STEPS: int = 60
DIP_RATIO: float = 0.2
EPS_EIG: float = 1e-6
MULTIPLICITY_FACTOR: float = 10.0
REFINE_TOL: float = 1e-9
RADIAL_NODES: int = 32

# solvers
NEAR_EIGEN_COND: float = 1e6
LS_RESIDUAL_TOL: float = 1e-8
SUPPORT_CUTOFF: float = 1e-12

# shape derivative
FD_STEP: float = 1e-3
DISCREPANCY_TOL: float = 1e-2
TRACK_WINDOW_FLOOR: float = 0.5

# dodge
DODGE_DELTA: float = 0.05
STEP_SCHEDULE: list[float] = [0.01, 0.02, 0.04, 0.08, 0.16, 0.32]
MAX_ITER: int = 8
SPLIT_RETRIES: int = 8
FIELD_ORDER: int = 4
COEFF_BOUND: float = 0.5
BUMP_WIDTH: float = 1.2
CUTOFF_TRANSITION: float = 0.3
CERTIFY_FACTOR: float = 1.5
CERTIFY_STEPS: int = 40
# σ_min level that counts as an eigenvalue on deformed, under-resolved curves
DODGE_EPS_EIG: float = 1e-3
SPLIT_WINDOW: float = 0.3
SPLIT_STEPS: int = 240
SPLIT_MAX_STEP: float = 0.08

# reporting
FLOAT_DIGITS: int = 17

# exit codes
EXIT_OK: int = 0
EXIT_INPUT: int = 2
EXIT_NUMERIC: int = 3
EXIT_NEAR_EIGEN: int = 4
EXIT_MULTIPLE: int = 5
EXIT_DODGE: int = 6
