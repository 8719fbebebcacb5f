import json

import pytest

from nevdodge.cli import main
from nevdodge.constants import BC_PATH, DOMAIN_PATH, FIELD_PATH, PLAN_PATH, POTENTIAL_PATH

from tests.conftest import FIRST_PAIR, RADIAL_MODE

DISK = str(DOMAIN_PATH / "disk.json")
BASE = ["--domain", DISK, "--N", "64", "--threads", "1"]


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_missing_domain_file(capsys, tmp_path):
    code, out = run(capsys, "eigscan", "--domain", str(tmp_path / "none.json"), "--lmin", "3", "--lmax", "4")
    assert code == 2
    assert out.err.startswith("error[2] InputError:")


def test_empty_scan_window(capsys, tmp_path):
    code, out = run(capsys, "eigscan", *BASE, "--lmin", "4", "--lmax", "3", "--out", str(tmp_path / "s.csv"))
    assert code == 2


def test_odd_node_count(capsys):
    code, _ = run(capsys, "eigscan", "--domain", DISK, "--N", "63", "--lmin", "3", "--lmax", "4")
    assert code == 2


def test_eigscan_outputs(capsys, tmp_path):
    out = tmp_path / "scan.csv"
    code, printed = run(
        capsys, "eigscan", *BASE, "--lmin", "13", "--lmax", "16", "--steps", "31", "--out", str(out),
        "--plot", str(tmp_path / "scan.svg"),
    )
    assert code == 0
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["n_nodes"] == 64
    (row,) = summary["eigenvalues"]
    assert row["lambda"] == pytest.approx(RADIAL_MODE, abs=1e-7)
    assert out.read_text().splitlines()[0] == "lambda,sigma_min"
    assert (tmp_path / "scan.svg").read_text().startswith("<svg")
    assert printed.out.split("\t")[1].strip() == "1"


def test_refine(capsys, tmp_path):
    out = tmp_path / "refine.json"
    code, _ = run(capsys, "refine", *BASE, "--lo", "3.3", "--hi", "3.5", "--out", str(out))
    assert code == 0
    report = json.loads(out.read_text())
    assert report["multiplicity"] == 2
    assert report["lambda"] == pytest.approx(FIRST_PAIR, abs=1e-7)


def test_solve_exterior_source(capsys, tmp_path):
    out = tmp_path / "solve.json"
    code, _ = run(
        capsys, "solve", *BASE, "--lam", "5", "--bc", "preset:exterior-source", "--out", str(out),
        "--potential", str(POTENTIAL_PATH / "center_bump.json"),
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["max_probe_error"] < 1e-6
    assert len(report["values"]) == 5


def test_solve_boundary_file(capsys, tmp_path):
    code, _ = run(
        capsys, "solve", "--domain", DISK, "--N", "128", "--threads", "1", "--lam", "5",
        "--bc", str(BC_PATH / "cos_s_128.json"), "--f1", "bump-source", "--out", str(tmp_path / "s.json"),
    )
    assert code == 0


def test_solve_gaussian_source(capsys, tmp_path):
    out = tmp_path / "solve.json"
    code, _ = run(
        capsys, "solve", "--domain", DISK, "--N", "128", "--threads", "1", "--lam", "2",
        "--f1", "gaussian-source", "--out", str(out),
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["max_probe_error"] < 1e-6


def test_solve_at_an_eigenvalue(capsys, tmp_path):
    code, out = run(
        capsys, "solve", *BASE, "--lam", repr(RADIAL_MODE), "--bc", "preset:exterior-source",
        "--out", str(tmp_path / "s.json"),
    )
    assert code == 4
    assert "NearEigenvalue" in out.err


def test_jumps(capsys, tmp_path):
    out = tmp_path / "jumps.json"
    code, printed = run(capsys, "jumps", *BASE, "--lam", "5", "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["green_representation"] < 1e-8
    assert "single_dnu_jump" in printed.out


def test_derivcheck(capsys, tmp_path):
    out = tmp_path / "d.json"
    field = str(FIELD_PATH / "tangential.json")
    code, _ = run(capsys, "derivcheck", *BASE, "--field", field, "--lam", "14.6", "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["pass"] is True
    code, printed = run(capsys, "derivcheck", *BASE, "--field", field, "--lam", "3.4", "--out", str(out))
    assert code == 5
    assert printed.err.startswith("error[5] MultipleEigenvalue:")


def test_dodge_regular_target(capsys, tmp_path):
    out = tmp_path / "dodge.json"
    code, _ = run(
        capsys, "dodge", *BASE, "--plan", str(PLAN_PATH / "regular_energy.json"), "--out", str(out),
        "--plot", str(tmp_path / "domains.svg"),
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["steps"] == 0 and report["sigma_displacement"] == 0.0
    assert (tmp_path / "dodge_domain.json").exists()


def test_dodge_budget(capsys, tmp_path):
    code, out = run(
        capsys, "dodge", *BASE, "--plan", str(PLAN_PATH / "radial_mode.json"), "--max-iter", "0",
        "--out", str(tmp_path / "dodge.json"),
    )
    assert code == 6
    assert "IterationBudgetExceeded" in out.err


def _twice(capsys, *argv, outputs):
    contents = []
    for _ in range(2):
        code, _ = run(capsys, *argv)
        assert code == 0
        contents.append([path.read_bytes() for path in outputs])
    return contents


def test_eigscan_is_byte_identical(capsys, tmp_path):
    out = tmp_path / "scan.csv"
    first, second = _twice(
        capsys, "eigscan", *BASE, "--lmin", "3", "--lmax", "4", "--steps", "21", "--out", str(out),
        outputs=[out, out.with_suffix(".json")],
    )
    assert first == second


@pytest.mark.slow
def test_dodge_report_is_byte_identical(capsys, tmp_path):
    out = tmp_path / "dodge.json"
    first, second = _twice(
        capsys, "dodge", *BASE, "--plan", str(PLAN_PATH / "radial_mode.json"), "--out", str(out),
        outputs=[out, tmp_path / "dodge_domain.json"],
    )
    assert first == second
    assert json.loads(first[0])["final_distance"] >= 0.05
