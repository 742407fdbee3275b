"""
simulate.py — Monte Carlo check of a solution's learning time.

Usage:
    python netlearn.py simulate \\
        --instance data/example_instance.json \\
        --solution runs/example/solution.json \\
        --reps 10000 --seed 7 --out-dir runs/example

Writes:
    gantt.csv        activity bars of one replication (node,kind,epoch,start,end)
    simstats.json    per-epoch means, total mean, standard error, reps, seed
    comparison.csv   analytic vs Monte Carlo per epoch and in total

Output (JSON to stdout): the SimStats fields, the analytic total and the worst |z|.
Exit code: 0 agreement, 3 when analytic and Monte Carlo differ by more than
5 standard errors (plus a small grid tolerance), 1 error (e.g. reps < 100).
"""
from __future__ import annotations

import math
import os
import sys
from pathlib import Path
from typing import Any

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.base import EXIT_VALIDATION, BaseScript
from lib.serialization import (
    load_instance,
    load_solution,
    simstats_to_dict,
    write_csv,
    write_gantt,
    write_json,
)
from lib.simulate import monte_carlo, run_replication
from lib.stochastic import epoch_means
from scripts.common import add_instance_argument

Z_LIMIT = 5.0
# Relative slack for the discretisation error of the grid engine.
GRID_REL_TOL = 1e-3

COMPARISON_FIELDS = ("epoch", "analytic", "mc_mean", "std_error", "z")


def _z(analytic: float, mean: float, se: float) -> float:
    diff = analytic - mean
    slack = GRID_REL_TOL * abs(analytic)
    excess = max(abs(diff) - slack, 0.0)
    if se > 0.0:
        return math.copysign(excess / se, diff)
    return 0.0 if excess == 0.0 else math.copysign(math.inf, diff)


class SimulateScript(BaseScript):
    """Run the Monte Carlo simulator on a solution and compare with the grid engine."""

    command = "simulate"

    @classmethod
    def add_arguments(cls, parser) -> None:
        add_instance_argument(parser)
        parser.add_argument("--solution", type=Path, required=True, metavar="PATH",
                            help="solution.json written by optimize.")
        parser.add_argument("--reps", type=int, default=10_000)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--shared-draw", action="store_true",
                            help="One delivery draw per I-node per epoch.")
        parser.add_argument("--out-dir", type=Path, default=Path("."))

    def run(self) -> dict[str, Any]:
        topology = load_instance(self.args.instance)
        selection = load_solution(self.args.solution, topology)
        out_dir: Path = self.args.out_dir

        stats = monte_carlo(topology, selection, self.args.reps, self.args.seed,
                            shared_draw=self.args.shared_draw, threads=self.settings.threads)
        _, events = run_replication(topology, selection, self.args.seed,
                                    shared_draw=self.args.shared_draw)
        analytic = epoch_means(topology, selection,
                               resolution=self.settings.grid_resolution,
                               quantile_cut=self.settings.quantile_cut)

        rows = []
        for k, (a, m, se) in enumerate(zip(analytic, stats.epoch_means,
                                           stats.epoch_std_errors), start=1):
            rows.append({"epoch": k, "analytic": float(a), "mc_mean": m,
                         "std_error": se, "z": _z(float(a), m, se)})
        total = float(analytic.sum())
        rows.append({"epoch": "total", "analytic": total, "mc_mean": stats.total_mean,
                     "std_error": stats.std_error,
                     "z": _z(total, stats.total_mean, stats.std_error)})
        worst = max(abs(r["z"]) for r in rows)

        write_gantt(out_dir / "gantt.csv", events)
        write_json(out_dir / "simstats.json", simstats_to_dict(stats))
        write_csv(out_dir / "comparison.csv", COMPARISON_FIELDS, rows)

        if worst > Z_LIMIT:
            self.logger.warning("Analytic and Monte Carlo disagree: |z| = %.2f", worst)
            self.exit_code = EXIT_VALIDATION
        return {**simstats_to_dict(stats), "analytic_total": total, "max_abs_z": worst}


if __name__ == "__main__":
    sys.exit(SimulateScript.main())
