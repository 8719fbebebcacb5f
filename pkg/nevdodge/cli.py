"""
Command-line entry point: eigscan, refine, solve, derivcheck, dodge, jumps.

Every failure prints one line ``error[<code>] <ErrorClass>: <message>`` to
stderr and exits with the code carried by the error class.
"""

import dataclasses
import logging
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from nevdodge.constants import (
    DEFAULT_NODES,
    DEFAULT_SCAN_STEPS,
    DISCREPANCY_TOL,
    EPS_EIG,
    EXIT_INPUT,
    EXIT_NUMERIC,
    EXIT_OK,
    FD_STEP,
    FLOAT_DIGITS,
    LAMBDA_FLOOR,
    MULTIPLICITY_FACTOR,
    NEAR_EIGEN_COND,
    REFINE_TOL,
    RESULT_PATH,
)
from nevdodge.errors import InputError, NevDodgeError
from nevdodge.geometry.boundary_geometry import nodes, quadrature
from nevdodge.plot.plot_scan import plot_domains, plot_scan
from nevdodge.process.dodge_planner import DodgePlan, dodge
from nevdodge.process.eigen_scanner import multiplicity, refine, scan
from nevdodge.process.layer_potentials import assemble, jump_suite
from nevdodge.process.neumann_solver import (
    BOUNDARY_PRESETS,
    default_probes,
    solve_full,
    smooth_preset,
    source_preset,
)
from nevdodge.process.shape_derivative import finite_difference_check
from nevdodge.tabulate.render_report import jump_table, write_csv, write_json
from nevdodge.utils.args_parser import arg_parse_cmd
from nevdodge.utils.config_parser import Config
from nevdodge.utils.data_loader import (
    load_boundary_data,
    load_domain,
    load_field,
    load_json,
    load_potential,
)
from nevdodge.utils.info_logger import print_info_log

log = logging.getLogger(__name__)

# eigenvalue-index search: first window end and scan density per unit λ
INDEX_WINDOW = 10.0
INDEX_DENSITY = 20


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one invocation: CLI flags over conf.yaml over defaults."""

    command: str
    n_nodes: int = DEFAULT_NODES
    threads: int = 1
    steps: int = DEFAULT_SCAN_STEPS
    eps_eig: float = EPS_EIG
    multiplicity_factor: float = MULTIPLICITY_FACTOR
    refine_tol: float = REFINE_TOL
    near_eigen_cond: float = NEAR_EIGEN_COND
    fd_step: float = FD_STEP
    discrepancy_tol: float = DISCREPANCY_TOL
    digits: int = FLOAT_DIGITS
    dodge: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        if self.n_nodes < 16 or self.n_nodes % 2:
            raise InputError(f"--N must be an even number ≥ 16, got {self.n_nodes}")
        if self.threads < 1:
            raise InputError(f"--threads must be positive, got {self.threads}")

    @classmethod
    def from_args(cls, args, config: Config) -> "RunConfig":
        quad = config.section("quadrature")
        scan_conf = config.section("scan")
        solver = config.section("solver")
        derivative = config.section("derivative")
        runtime = config.section("runtime")
        output = config.section("output")
        threads = args.threads or runtime.get("threads") or os.cpu_count() or 1
        return cls(
            command=args.command,
            n_nodes=int(args.n_nodes or quad.get("n_nodes", DEFAULT_NODES)),
            threads=int(threads),
            steps=int(getattr(args, "steps", None) or scan_conf.get("steps", DEFAULT_SCAN_STEPS)),
            eps_eig=float(scan_conf.get("eps_eig", EPS_EIG)),
            multiplicity_factor=float(scan_conf.get("multiplicity_factor", MULTIPLICITY_FACTOR)),
            refine_tol=float(scan_conf.get("refine_tol", REFINE_TOL)),
            near_eigen_cond=float(solver.get("near_eigen_cond", NEAR_EIGEN_COND)),
            fd_step=float(getattr(args, "t", None) or derivative.get("fd_step", FD_STEP)),
            discrepancy_tol=float(derivative.get("discrepancy_tol", DISCREPANCY_TOL)),
            digits=int(output.get("precision", FLOAT_DIGITS)),
            dodge=config.section("dodge"),
        )


def _out(args, default: str) -> Path:
    return Path(args.out) if args.out else RESULT_PATH / default


def _inputs(args):
    curve = load_domain(args.domain)
    potential = load_potential(args.potential) if args.potential else None
    if potential is not None:
        potential.check_inside(curve)
    return curve, potential


def _complex_pairs(values) -> list:
    return [[float(np.real(v)), float(np.imag(v))] for v in np.atleast_1d(values)]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------
def cmd_eigscan(args, run: RunConfig) -> int:
    curve, potential = _inputs(args)
    report = scan(
        curve,
        potential,
        args.lmin,
        args.lmax,
        run.steps,
        run.n_nodes,
        threads=run.threads,
        eps_eig=run.eps_eig,
        multiplicity_factor=run.multiplicity_factor,
        refine_tol=run.refine_tol,
        progress=sys.stderr.isatty(),
    )
    out = _out(args, "scan.csv")
    write_csv(report.to_frame(), out, run.digits)
    summary = {"n_nodes": run.n_nodes, **report.summary()}
    write_json(summary, out.with_suffix(".json"), run.digits)
    if args.plot:
        plot_scan(report, args.plot)
    for value, mult in report.eigenvalues:
        print(f"{value:.{run.digits}g}\t{mult}")
    print_info_log(f"{len(report.eigenvalues)} eigenvalues, scan written to {out}", "eigscan")
    return EXIT_OK


def cmd_refine(args, run: RunConfig) -> int:
    curve, potential = _inputs(args)
    value = refine(curve, potential, (args.lo, args.hi), run.n_nodes, run.eps_eig, run.refine_tol)
    mult = multiplicity(value, curve, potential, run.n_nodes, run.eps_eig, run.multiplicity_factor)
    write_json(
        {"bracket": [args.lo, args.hi], "lambda": value, "multiplicity": mult, "n_nodes": run.n_nodes},
        _out(args, "refine.json"),
        run.digits,
    )
    print(f"{value:.{run.digits}g}\t{mult}")
    return EXIT_OK


def cmd_solve(args, run: RunConfig) -> int:
    curve, potential = _inputs(args)
    if args.lam < LAMBDA_FLOOR:
        raise InputError(f"λ={args.lam} below {LAMBDA_FLOOR}")
    quad = quadrature(curve, run.n_nodes)
    kernels = assemble(args.lam, quad, potential)
    preset = None
    if args.bc.startswith("preset:"):
        name = args.bc.split(":", 1)[1]
        if name not in BOUNDARY_PRESETS:
            raise InputError(f"unknown boundary preset {name!r}; known: {sorted(BOUNDARY_PRESETS)}")
        preset = BOUNDARY_PRESETS[name]
        f2 = preset.f2(kernels)
    else:
        f2 = load_boundary_data(args.bc, run.n_nodes)
    manufactured = smooth_preset(args.f1, curve, args.lam)
    smooth, smooth_exact = manufactured if manufactured else (None, None)
    f1 = None if smooth else source_preset(args.f1, curve, potential)
    solution = solve_full(
        curve, args.lam, potential, f1, f2, run.n_nodes, run.near_eigen_cond, smooth=smooth
    )
    probes = default_probes(curve, count=args.probes)
    values = np.atleast_1d(solution.value(probes))
    report = {
        "lambda": args.lam,
        "n_nodes": run.n_nodes,
        "condition": solution.condition,
        "solve_residual": solution.residual,
        "boundary_residual": float(np.max(np.abs(solution.boundary_dnu() - f2))),
        "probes": probes,
        "values": _complex_pairs(values),
    }
    if preset is not None and preset.exact is not None and f1 is None and smooth is None:
        exact = preset.exact(kernels, probes)
        report["exact"] = _complex_pairs(exact)
        report["max_probe_error"] = float(np.max(np.abs(values - exact)))
    elif smooth_exact is not None and preset is not None and preset.name == "zeros" and potential is None:
        exact = smooth_exact(probes)
        report["exact"] = _complex_pairs(exact)
        report["max_probe_error"] = float(np.max(np.abs(values - exact)))
    write_json(report, _out(args, "solve.json"), run.digits)
    print_info_log(f"boundary residual {report['boundary_residual']:.3e}", "solve")
    return EXIT_OK


def eigenvalue_by_index(curve, potential, index: int, run: RunConfig) -> float:
    """The index-th eigenvalue ≥ 0.5 (1-based, counted with multiplicity)."""
    if index < 1:
        raise InputError(f"eigenvalue index must be ≥ 1, got {index}")
    lam_max = INDEX_WINDOW
    while True:
        steps = max(DEFAULT_SCAN_STEPS, int(INDEX_DENSITY * lam_max))
        report = scan(curve, potential, LAMBDA_FLOOR, lam_max, steps, run.n_nodes, run.threads)
        listed = [value for value, mult in sorted(report.eigenvalues) for _ in range(mult)]
        if len(listed) >= index:
            return listed[index - 1]
        lam_max *= 2.0


def cmd_derivcheck(args, run: RunConfig) -> int:
    curve, potential = _inputs(args)
    deformation = load_field(args.field)
    if potential is not None and deformation.v_box is None:
        deformation = deformation.with_potential_box(potential.support_box())
    if args.lam is None and args.index is None:
        raise InputError("derivcheck needs --lam or --index")
    lam = args.lam if args.lam is not None else eigenvalue_by_index(curve, potential, args.index, run)
    check = finite_difference_check(
        curve, potential, lam, deformation, run.fd_step, run.n_nodes, run.threads
    )
    passed = check.relative < run.discrepancy_tol
    write_json(
        {
            "lambda": 0.5 * (check.lam_plus + check.lam_minus),
            "t": run.fd_step,
            "lambda_dot_formula": check.formula,
            "lambda_dot_fd": check.finite_difference,
            "discrepancy": check.discrepancy,
            "relative": check.relative,
            "lambda_plus": check.lam_plus,
            "lambda_minus": check.lam_minus,
            "pass": passed,
        },
        _out(args, "derivcheck.json"),
        run.digits,
    )
    print(f"{check.formula:.10g}\t{check.finite_difference:.10g}\t{check.relative:.3e}")
    return EXIT_OK if passed else EXIT_NUMERIC


def cmd_dodge(args, run: RunConfig) -> int:
    curve, potential = _inputs(args)
    payload = load_json(args.plan)
    if not isinstance(payload, dict):
        raise InputError(f"{args.plan}: plan file must hold a JSON object")
    plan = DodgePlan.from_dict({**run.dodge, **payload})
    if args.seed is not None:
        plan = dataclasses.replace(plan, seed=args.seed)
    if args.max_iter is not None:
        plan = dataclasses.replace(plan, max_iter=args.max_iter)
    result = dodge(
        curve, potential, plan, run.n_nodes, threads=run.threads, progress=sys.stderr.isatty()
    )

    # Σ′ nodes of the working grid before and after
    s = nodes(run.n_nodes)
    on_arc = (s - plan.sigma_arc[0]) % (2 * np.pi) <= (plan.sigma_arc[1] - plan.sigma_arc[0]) % (2 * np.pi)
    moved = np.linalg.norm(result.curve.points(s[on_arc]) - curve.points(s[on_arc]), axis=1)
    report = {
        **result.to_dict(),
        "target": plan.target,
        "delta": plan.delta,
        "seed": plan.seed,
        "n_nodes": run.n_nodes,
        "sigma_displacement": float(moved.max()) if len(moved) else 0.0,
        "support_clearance": None if potential is None else potential.support_clearance(result.curve),
    }
    out = _out(args, "dodge.json")
    write_json(report, out, run.digits)
    domain_out = Path(args.domain_out) if args.domain_out else out.with_name(out.stem + "_domain.json")
    write_json(result.export_curve().to_dict(), domain_out, run.digits)
    if args.plot:
        box = None if potential is None else potential.support_box()
        plot_domains([curve, result.curve], args.plot, plan.sigma_arc, box)
    print_info_log(
        f"λ={plan.target:g} cleared after {result.steps} steps, distance {result.final_distance:.4g}",
        "dodge",
    )
    return EXIT_OK


def cmd_jumps(args, run: RunConfig) -> int:
    curve, potential = _inputs(args)
    if args.lam < LAMBDA_FLOOR:
        raise InputError(f"λ={args.lam} below {LAMBDA_FLOOR}")
    kernels = assemble(args.lam, quadrature(curve, run.n_nodes), potential)
    suite = jump_suite(kernels)
    out = _out(args, "jumps.json")
    if out.suffix.lower() == ".csv":
        write_csv(jump_table(suite), out, run.digits)
        out = out.with_suffix(".json")
    write_json(suite, out, run.digits)
    print(jump_table(suite).to_string(index=False))
    return EXIT_OK


COMMANDS = {
    "eigscan": cmd_eigscan,
    "refine": cmd_refine,
    "solve": cmd_solve,
    "derivcheck": cmd_derivcheck,
    "dodge": cmd_dodge,
    "jumps": cmd_jumps,
}


def _error_line(code: int, err: BaseException) -> str:
    message = " ".join(str(err).split())
    return f"error[{code}] {type(err).__name__}: {message}"


def main(argv: Optional[list[str]] = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    parser = arg_parse_cmd()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = Config(args.config, exit_on_error=False)
        run = RunConfig.from_args(args, config)
        return COMMANDS[args.command](args, run)
    except NevDodgeError as err:
        print(_error_line(err.exit_code, err), file=sys.stderr)
        return err.exit_code
    except np.linalg.LinAlgError as err:
        print(_error_line(EXIT_NUMERIC, err), file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as err:
        print(_error_line(EXIT_INPUT, err), file=sys.stderr)
        return EXIT_INPUT
