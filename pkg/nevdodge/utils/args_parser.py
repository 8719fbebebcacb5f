"""

Project : nevdodge
Topic   : args_parser.py
Desc    : Parse the command line of the nevdodge tool.

"""

# Import python modules
import argparse
import os

from nevdodge.constants import CONFIG_PATH


def _common(parser: argparse.ArgumentParser, domain_required: bool = True) -> None:

    """
    Flags shared by every subcommand.
    """

    parser.add_argument(
        "--domain", required=domain_required, help="Domain file (JSON Fourier coefficients)."
    )
    parser.add_argument("--potential", default=None, help="Potential grid file (JSON).")
    parser.add_argument(
        "--N", dest="n_nodes", type=int, default=None, help="Boundary quadrature nodes (even)."
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"Worker processes (default: {os.cpu_count()}; 1 runs serially).",
    )
    parser.add_argument("--out", default=None, help="Output file (CSV or JSON).")
    parser.add_argument("--plot", default=None, help="Figure path (.svg, .pdf or .png).")
    parser.add_argument("--seed", type=int, default=None, help="Random seed.")
    parser.add_argument("--config", default=str(CONFIG_PATH), help="YAML configuration file.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging.")


def arg_parse_cmd() -> argparse.ArgumentParser:

    """
    Function for user to interact with terminal.
    """

    # Argument description
    parser = argparse.ArgumentParser(
        prog="nevdodge",
        description="Neumann eigenvalues, shape derivatives and eigenvalue dodging "
        "for Δ+λ−V on planar domains.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    # eigscan: σ_min curve and eigenvalues in a window
    eigscan = commands.add_parser("eigscan", help="Scan [lmin, lmax] for Neumann eigenvalues.")
    _common(eigscan)
    eigscan.add_argument("--lmin", type=float, required=True, help="Lower end of the λ window.")
    eigscan.add_argument("--lmax", type=float, required=True, help="Upper end of the λ window.")
    eigscan.add_argument("--steps", type=int, default=None, help="Scan grid size (≥ 16).")

    # refine: one bracket
    refine = commands.add_parser("refine", help="Refine one eigenvalue inside a bracket.")
    _common(refine)
    refine.add_argument("--lo", type=float, required=True, help="Left end of the bracket.")
    refine.add_argument("--hi", type=float, required=True, help="Right end of the bracket.")

    # solve: reduced Neumann problem
    solve = commands.add_parser("solve", help="Solve the Neumann problem at a fixed λ.")
    _common(solve)
    solve.add_argument("--lam", type=float, required=True, help="Energy λ (≥ 0.5).")
    solve.add_argument(
        "--bc",
        default="preset:zeros",
        help="Boundary data file {'f2': [[re, im], ...]} or preset:zeros / preset:exterior-source.",
    )
    solve.add_argument("--f1", default="zero", help="Source preset: zero, bump-source or gaussian-source.")
    solve.add_argument(
        "--probes", type=int, default=5, help="Number of interior probe points."
    )

    # derivcheck: formula against central differences
    derivcheck = commands.add_parser(
        "derivcheck", help="Compare the eigenvalue derivative with finite differences."
    )
    _common(derivcheck)
    derivcheck.add_argument("--field", required=True, help="Deformation field file (JSON).")
    derivcheck.add_argument("--lam", type=float, default=None, help="Approximate eigenvalue.")
    derivcheck.add_argument(
        "--index", type=int, default=None, help="Eigenvalue index (1-based, with multiplicity)."
    )
    derivcheck.add_argument("--t", type=float, default=None, help="Finite-difference step.")

    # dodge: deform until λ leaves the spectrum
    dodge = commands.add_parser("dodge", help="Deform the domain until λ is not an eigenvalue.")
    _common(dodge)
    dodge.add_argument("--plan", required=True, help="Dodge plan file (JSON).")
    dodge.add_argument("--domain-out", default=None, help="Where to write the final domain.")
    dodge.add_argument("--max-iter", type=int, default=None, help="Override the plan budget.")

    # jumps: jump-relation suite
    jumps = commands.add_parser("jumps", help="Run the layer-potential jump-relation suite.")
    _common(jumps)
    jumps.add_argument("--lam", type=float, required=True, help="Energy λ (≥ 0.5).")

    return parser
