# -*- coding: utf-8 -*-
"""

Project : nevdodge
Topic   : dodge_disk.py
Desc    : Dodge the configured targets on the unit disk with a centred bump.

"""

# Import python modules
from functools import partial
from multiprocessing import Pool

# Import internal modules.
from nevdodge.constants import DOMAIN_PATH, FIGURE_PATH, POTENTIAL_PATH, RESULT_PATH
from nevdodge.plot.plot_scan import plot_domains
from nevdodge.process.dodge_planner import DodgePlan, dodge
from nevdodge.tabulate.render_report import write_json
from nevdodge.utils.config_parser import Config
from nevdodge.utils.data_loader import load_domain, load_potential
from nevdodge.utils.info_logger import print_info_log, stage


def dodge_target(target: float, settings: dict, n_nodes: int) -> dict:
    """
    One dodge run; returns the report written for it.
    """

    disk = load_domain(DOMAIN_PATH / "disk.json")
    bump = load_potential(POTENTIAL_PATH / "center_bump.json")
    plan = DodgePlan.from_dict({**settings, "target": target, "sigma_arc": [0.0, 1.5707963267948966]})
    result = dodge(disk, bump, plan, n_nodes)
    report = {"target": target, **result.to_dict()}
    write_json(report, RESULT_PATH / f"dodge_{target:.6f}.json")
    plot_domains(
        [disk, result.curve],
        FIGURE_PATH / f"dodge_{target:.6f}.pdf",
        plan.sigma_arc,
        bump.support_box(),
    )
    return report


if __name__ == "__main__":

    print_info_log("Dodge script started", "progress")
    config = Config()
    targets = config.section("scripts")["dodge_targets"]

    # targets are independent
    with stage("dodge runs", "dodge"), Pool() as p:
        reports = p.map(
            partial(
                dodge_target,
                settings=config.section("dodge"),
                n_nodes=config.section("quadrature")["n_nodes"],
            ),
            targets,
        )
    for report in reports:
        print_info_log(
            f"λ={report['target']:.6f}: {report['steps']} steps, "
            f"distance {report['final_distance']:.4f}, path {report['history']}",
            "dodge",
        )

    print_info_log("Dodge script finished", "progress")
