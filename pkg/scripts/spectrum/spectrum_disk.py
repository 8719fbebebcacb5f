# -*- coding: utf-8 -*-
"""

Project : nevdodge
Topic   : spectrum_disk.py
Desc    : Neumann spectrum of the unit disk against the Bessel oracle.

"""

# Import python modules
from multiprocessing import cpu_count

import numpy as np
import pandas as pd

# Import internal modules.
from nevdodge.constants import DOMAIN_PATH, FIGURE_PATH, RESULT_PATH
from nevdodge.plot.plot_scan import plot_scan
from nevdodge.process.eigen_scanner import scan
from nevdodge.process.special_functions import disk_neumann_eigenvalues
from nevdodge.tabulate.render_report import write_csv
from nevdodge.utils.config_parser import Config
from nevdodge.utils.data_loader import load_domain
from nevdodge.utils.info_logger import print_info_log, stage


if __name__ == "__main__":

    print_info_log("Disk spectrum script started", "progress")
    config = Config()
    window = config.section("scripts")["disk_spectrum"]
    threads = config.section("runtime").get("threads") or cpu_count()
    n_nodes = config.section("quadrature")["n_nodes"]

    disk = load_domain(DOMAIN_PATH / "disk.json")
    with stage("σ_min scan", "scan"):
        report = scan(
            disk,
            None,
            window["lam_min"],
            window["lam_max"],
            window["steps"],
            n_nodes,
            threads=threads,
            progress=True,
        )
    found = pd.DataFrame(report.eigenvalues, columns=["found", "found_multiplicity"])
    oracle = pd.DataFrame(
        disk_neumann_eigenvalues(window["lam_min"], window["lam_max"]),
        columns=["lambda", "multiplicity"],
    )

    # compare in ascending order
    table = pd.concat([oracle, found], axis=1)
    table["relative_error"] = np.abs(table["found"] - table["lambda"]) / table["lambda"]
    write_csv(table, RESULT_PATH / "disk_spectrum.csv")
    plot_scan(report, FIGURE_PATH / "disk_scan.pdf")
    print(table.to_string(index=False))

    print_info_log("Disk spectrum script finished", "progress")
