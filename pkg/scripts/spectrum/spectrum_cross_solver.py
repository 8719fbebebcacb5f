# -*- coding: utf-8 -*-
"""

Project : nevdodge
Topic   : spectrum_cross_solver.py
Desc    : Boundary-integral eigenvalues against the polar finite-volume solver
          for the unit disk with a centred Gaussian potential.

"""

# Import python modules
from multiprocessing import cpu_count

import numpy as np
import pandas as pd

# Import internal modules.
from nevdodge.constants import DOMAIN_PATH, RESULT_PATH
from nevdodge.process.eigen_scanner import scan
from nevdodge.process.fd_eigensolver import polar_neumann_eigenvalues
from nevdodge.process.potential_field import gaussian_bump
from nevdodge.tabulate.render_report import write_csv
from nevdodge.utils.config_parser import Config
from nevdodge.utils.data_loader import load_domain
from nevdodge.utils.info_logger import print_info_log, stage

if __name__ == "__main__":

    print_info_log("Cross-solver script started", "progress")
    config = Config()
    settings = config.section("scripts")["cross_solver"]
    threads = config.section("runtime").get("threads") or cpu_count()

    disk = load_domain(DOMAIN_PATH / "disk.json")
    bump = gaussian_bump(amplitude=settings["amplitude"], width=settings["width"], half_extent=0.5, cells=32)

    with stage("finite-volume eigensolve"):
        reference = polar_neumann_eigenvalues(
            1.0, bump, settings["count"], settings["nr"], settings["ntheta"]
        )
    print_info_log(f"finite volumes: {np.round(reference, 6)}", "progress")

    report = scan(disk, bump, 0.5, float(reference[-1]) + 1.0, 80, threads=threads, progress=True)
    listed = [value for value, mult in report.eigenvalues for _ in range(mult)]
    table = pd.DataFrame(
        {"finite_volume": reference, "boundary_integral": listed[: len(reference)]}
    )
    table["relative"] = np.abs(table["boundary_integral"] - table["finite_volume"]) / table[
        "finite_volume"
    ]
    write_csv(table, RESULT_PATH / "cross_solver.csv")
    print(table.to_string(index=False))

    print_info_log("Cross-solver script finished", "progress")
