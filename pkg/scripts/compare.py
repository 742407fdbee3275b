"""
compare.py — Run DoubleClimb and the baselines on one instance.

Usage:
    python netlearn.py compare \\
        --instance data/example_instance.json \\
        --profile data/classification_profile.json \\
        --brute-force --out-dir runs/compare

Writes <out-dir>/comparison.csv with one row per algorithm:
    algorithm, cost, normalized_d_L, il_fraction, extra_samples, feasible
where normalized_d_L = d_L / (|L| - 1), il_fraction is the share of I-L
candidates selected and extra_samples the samples delivered per epoch.

Output (JSON to stdout): {rows, path}
Exit code: 0 when DoubleClimb is feasible, 2 otherwise.
"""
from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Any

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.base import EXIT_INFEASIBLE, BaseScript
from lib.evaluator import Evaluator
from lib.models import GaParams, OptimizationOutcome, Topology
from lib.optimize import brute_force, double_climb, genetic, opt_unif
from lib.scenario import with_rate_multiplier
from lib.serialization import load_instance, resolve_profile, write_csv
from scripts.common import (
    add_instance_argument,
    add_profile_arguments,
    add_scenario_arguments,
    run_config,
)

FIELDS = ("algorithm", "cost", "normalized_d_L", "il_fraction", "extra_samples", "feasible")


def summary_row(topology: Topology, outcome: OptimizationOutcome) -> dict[str, Any]:
    """One comparison row; metrics are empty for an infeasible outcome."""
    sol = outcome.solution
    if sol is None:
        return {"algorithm": outcome.algorithm, "cost": "", "normalized_d_L": "",
                "il_fraction": "", "extra_samples": "", "feasible": False}
    n_l = len(topology.l_nodes)
    d_L = 2 * len(sol.selection.ll_edges) / n_l
    il = sol.selection.il_edges
    n_il = len(topology.il_candidates)
    return {
        "algorithm": outcome.algorithm,
        "cost": sol.cost,
        "normalized_d_L": d_L / (n_l - 1) if n_l > 1 else 0.0,
        "il_fraction": len(il) / n_il if n_il else 0.0,
        "extra_samples": sum(topology.i_by_id[i].rate for i, _ in il),
        "feasible": sol.feasible,
    }


class CompareScript(BaseScript):
    """Compare DoubleClimb, Opt-Unif, GA and (optionally) brute force."""

    command = "compare"

    @classmethod
    def add_arguments(cls, parser) -> None:
        add_instance_argument(parser)
        add_profile_arguments(parser)
        add_scenario_arguments(parser)
        parser.add_argument("--seed", type=int, default=0, help="GA seed.")
        parser.add_argument("--brute-force", action="store_true",
                            help="Also run brute force (small instances only).")
        parser.add_argument("--out-dir", type=Path, default=Path("."))

    def run(self) -> dict[str, Any]:
        config = run_config(self.args)
        topology = with_rate_multiplier(load_instance(config.instance), config.multiplier)
        profile = resolve_profile(config)
        ev = Evaluator(topology, profile, self.settings)

        outcomes: list[OptimizationOutcome] = [
            double_climb(topology, profile, self.settings, ev),
            opt_unif(topology, profile, self.settings, ev),
            genetic(topology, profile, GaParams(), config.seed, self.settings, ev),
        ]
        if self.args.brute_force:
            outcomes.append(brute_force(topology, profile, self.settings, ev))

        rows = [summary_row(topology, o) for o in outcomes]
        path = write_csv(config.out_dir / "comparison.csv", FIELDS, rows)
        if not outcomes[0].feasible:
            self.exit_code = EXIT_INFEASIBLE
        self.logger.info("Compared %d algorithms, %d evaluations", len(outcomes), ev.evaluations)
        return {"rows": rows, "path": str(path)}


if __name__ == "__main__":
    sys.exit(CompareScript.main())
